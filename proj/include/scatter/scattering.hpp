#pragma once

#include "scatter/jost.hpp"

#include <optional>

namespace scatter {

// Uniform grid symmetric about 0: x_j = (j - half) dx, j = 0..2 half.
struct LineGrid {
    double dx = 1.0 / 256;
    int half = 0;

    double operator[](int j) const { return (j - half) * dx; }
    int size() const { return 2 * half + 1; }
    double xmax() const { return half * dx; }
};

struct ScatteringTable {
    KGrid kgrid;
    int n = 1;
    MatSeries S;
    Mat S0;
    Mat Sinf;
    double plateau_deviation = 0.0;
    double j0_min_singular = 0.0;
    bool exceptional = false;
};

struct SmatrixOptions {
    double exclude = 0.0;  // skip |k| < exclude when checking J for singularity
    bool check_plateau = true;
};

double min_singular(const Mat& m);

ScatteringTable smatrix(const JostMatrixTable& J, const SmatrixOptions& opt = {});

// Fills S0 (Richardson over the 6 nodes nearest 0) and Sinf (outer 10% average of the
// k <-> -k symmetrized samples). Throws NoPlateau when the deviation exceeds 1e-2.
void s_limits(ScatteringTable& st, bool check_plateau = true);

struct SymbolSamples {
    LineGrid grid;
    MatSeries values;
    double l1 = 0.0;          // trapezoid int |.|
    double outer_mass = 0.0;  // fraction of l1 beyond |y| > ymax/2
};

// F_s(y) = (1/2pi) int (S(k) - S_ref) e^{iky} dk, tapered trapezoid.
SymbolSamples fs_symbol(const ScatteringTable& st, const LineGrid& ygrid, std::optional<Mat> s_ref = std::nullopt);

// P+(x) = (1/2pi) int_0^K e^{-ikx} (S(-k) - S_ref) dk and P-(x) = (1/2pi) int_0^K e^{ikx} (S(k) - S_ref) dk.
struct PSymbols {
    SymbolSamples plus;
    SymbolSamples minus;
};
PSymbols p_symbols(const ScatteringTable& st, const LineGrid& xgrid, std::optional<Mat> s_ref = std::nullopt);

// Same transforms for an arbitrary symbol given on the positive half of a k grid, k_i = (i + 1/2) dk.
SymbolSamples half_line_symbol_transform(const MatSeries& sym, double dk, double kmax, const LineGrid& xgrid, int sign);

// Fourier reconstruction of S - S_ref at node k from F_s: int F_s(y) e^{-iky} dy.
Mat fs_reconstruct(const SymbolSamples& fs, double k);

struct AsymptoticsReport {
    bool trivial = false;          // S' vanishes identically
    double slope = 0.0;            // log |S'| vs log k on [kmax/5, kmax/1.2]
    double fit_lo = 0.0, fit_hi = 0.0;
    double low_max = 0.0;          // max |S'| over |k| < 0.5
    double at_one = 0.0;           // |S'| at k = 1
    double h1 = 0.0;
    bool exceptional = false;
};

MatSeries sdot(const ScatteringTable& st);
AsymptoticsReport sdot_asymptotics(const ScatteringTable& st);
// int (|S - Sinf|^2 + |S'|^2) dk with Frobenius norms
double h1_membership(const ScatteringTable& st);

}  // namespace scatter
