#pragma once

#include "scatter/line.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace scatter {

// Config files are YAML (plain JSON is accepted as is). Errors carry file:line.

// {n, cells: [{a, b, matrix}]}. A matrix is a number, rows of reals, rows of [re, im] pairs,
// or a flat row-major list of n*n pairs.
PotentialSpec read_potential(const std::filesystem::path& file, bool half_line = true);
// {A, B} | {robin: theta or [thetas]} | {neumann: n} | {dirichlet: n} | {delta: Lambda}
BoundaryPair read_boundary(const std::filesystem::path& file);
// {n, potential: {cells}, interaction: {delta: Lambda} | {general: {A1, A2, B1, B2}}}
LineProblem read_line_problem(const std::filesystem::path& file);

PotentialSpec parse_potential(const std::string& text, const std::string& origin = "<string>", bool half_line = true);
BoundaryPair parse_boundary(const std::string& text, const std::string& origin = "<string>");
LineProblem parse_line_problem(const std::string& text, const std::string& origin = "<string>");

struct Tolerances {
    double hypothesis = 1e-3;
    double unitarity = 1e-6;
    double agreement = 2e-3;
};

struct ScenarioConfig {
    std::optional<PotentialSpec> potential;
    std::optional<BoundaryPair> boundary;
    std::optional<LineProblem> line;
    GridParams grid;
    Tolerances tol;
    std::filesystem::path output = ".";
};

// potential/boundary/line may be inline mappings or paths relative to the config file.
ScenarioConfig read_config(const std::filesystem::path& file);

// x, re_1, im_1, ..., re_n, im_n on a uniform grid starting at 0 (half line) or symmetric about 0.
Field read_field_csv(const std::filesystem::path& file);
void write_field_csv(std::ostream& os, const Field& f);

// var, re_<name>, im_<name> (n = 1) or re_<name>ij, im_<name>ij in row-major order.
void write_series_csv(std::ostream& os, const std::string& var, const std::vector<double>& at, const MatSeries& s,
                      const std::string& name);
// several series sharing one abscissa, columns in the order given
struct NamedSeries {
    std::string name;
    const MatSeries* series = nullptr;
};
void write_series_csv(std::ostream& os, const std::string& var, const std::vector<double>& at,
                      const std::vector<NamedSeries>& all);
// x, y, re_ij, im_ij; rows with y < x are skipped.
void write_kernel_csv(std::ostream& os, const KernelTable& K, int stride = 1);

// Shortest round-trip representation, so identical runs give identical bytes.
std::string format_number(double v);

// Opens for writing or throws IoError.
std::ofstream open_output(const std::filesystem::path& file);

}  // namespace scatter
