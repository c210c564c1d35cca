#pragma once

#include "scatter/core.hpp"

#include <functional>
#include <vector>

namespace scatter {

// Constant matrix value on [a, b).
struct Cell {
    double a = 0.0;
    double b = 0.0;
    Mat v;
};

// Piecewise-constant Hermitian matrix potential. Cells are sorted and disjoint; gaps mean V = 0.
// Half-line potentials live on [0, X_V); line potentials may have cells on negative x.
struct PotentialSpec {
    int n = 1;
    std::vector<Cell> cells;

    double support_bound() const;  // X_V: right end of the last cell (0 if empty)
    double support_left() const;   // left end of the first cell (0 if empty)
    Mat value(double x) const;     // right-continuous, zero outside the cells
    bool is_zero() const { return cells.empty(); }

    // cell breakpoints merged with the points of a uniform grid, clipped to [lo, hi]
    std::vector<double> breakpoints(double lo, double hi, double dx) const;
};

struct PotentialDiagnostics {
    double hermiticity_defect = 0.0;
    double l1 = 0.0;
    double l1_1 = 0.0;
};

struct Moments {
    std::vector<double> x;
    std::vector<double> sigma;   // int_x^inf |V|
    std::vector<double> sigma1;  // int_x^inf y |V|
};

struct FoldedPotential {
    PotentialSpec plus;   // V(x), x > 0
    PotentialSpec minus;  // V(-x), x > 0
    PotentialSpec block;  // diag(plus, minus), 2n x 2n
};

double opnorm(const Mat& m);

// Throws NonHermitian (defect > 1e-10) or EmptySupport (degenerate or overlapping cell).
PotentialDiagnostics validate_potential(const PotentialSpec& spec, bool half_line = true);

Moments moments(const PotentialSpec& spec, const std::vector<double>& xs);
double sigma_at(const PotentialSpec& spec, double x);
double sigma1_at(const PotentialSpec& spec, double x);

// int (1 + |x|)^gamma |V(x)| dx
double l1gamma_norm(const PotentialSpec& spec, double gamma);

// Q(x) = int_x^inf V and C(x) = int_x^inf V(t) Q(t) dt, both exact on cells.
Mat tail_integral(const PotentialSpec& spec, double x);
Mat tail_product_integral(const PotentialSpec& spec, double x);

FoldedPotential fold_line_potential(const PotentialSpec& line);
PotentialSpec unfold_line_potential(const PotentialSpec& plus, const PotentialSpec& minus);

// Built-ins.
PotentialSpec zero_potential(int n);
PotentialSpec step_potential(double value, double a, double b);
PotentialSpec matrix_step(const Mat& value, double a, double b);
// f sampled at cell midpoints on [a, b) with spacing dx
PotentialSpec sampled_potential(int n, const std::function<Mat(double)>& f, double a, double b, double dx);
PotentialSpec exponential_potential(double amplitude, double rate, double xmax, double dx);

}  // namespace scatter
