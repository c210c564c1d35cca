#pragma once

#include "scatter/io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace scatter {

enum class Relation { Below, AtMost, Above };

struct Check {
    std::string id;  // "3.b"
    std::string name;
    double measured = 0.0;
    double threshold = 0.0;
    Relation rel = Relation::Below;
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;
    bool pass() const;
};

struct VerifyReport {
    std::string scenario;
    std::vector<Criterion> criteria;
    bool pass() const;
};

// The full acceptance suite; `only` restricts to the listed criterion ids.
VerifyReport run_acceptance(const std::vector<int>& only = {});

// neumann-free | remark-3-3 | dirichlet-counterexample
std::vector<std::string> scenario_names();
VerifyReport run_scenario(const std::string& name);

// Generic checks for a user problem, half line or line.
VerifyReport verify_config(const ScenarioConfig& cfg);
VerifyReport verify_line(const LineProblem& lp, const GridParams& g, const Tolerances& tol = {});

// id,name,measured,threshold,pass
void write_report_csv(std::ostream& os, const VerifyReport& r);
// one human-readable line per criterion
void print_summary(std::ostream& os, const VerifyReport& r);

}  // namespace scatter
