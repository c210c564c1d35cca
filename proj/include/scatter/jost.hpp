#pragma once

#include "scatter/boundary.hpp"
#include "scatter/potentials.hpp"

namespace scatter {

enum class FaddeevMethod {
    CellTransfer,   // exact propagation across constant cells
    NeumannSeries,  // Picard sweeps of the Volterra equation, linear m per interval
};

// m(k,x) = e^{-ikx} f(k,x) and m'(k,x) on x_j = j dx, j < nx, for every node of a symmetric k grid.
// The last stored node is the first one at or beyond X_V; further out m = I and m' = 0.
struct JostTable {
    PotentialSpec potential;
    KGrid kgrid;
    double dx = 1.0 / 256;
    int nx = 1;
    int n = 1;
    MatSeries m;       // index i * nx + j
    MatSeries mprime;  // same layout
    MatSeries m0;      // k = 0, index j
    MatSeries m0prime;

    Mat m_at(int i, int j) const;
    Mat mprime_at(int i, int j) const;
    Mat f(int i, int j) const;       // e^{ikx} m
    Mat fprime(int i, int j) const;  // e^{ikx} (ik m + m')
    double x(int j) const { return j * dx; }
};

struct JostMatrixTable {
    KGrid kgrid;
    MatSeries J;  // J(k_i)
    Mat J0;
};

// Single-k solve on x_j = j dx, j < nx. Returns m and m' side by side (index j).
void faddeev_solve(const PotentialSpec& V, double k, double dx, int nx, MatSeries& m, MatSeries& mprime,
                   FaddeevMethod method = FaddeevMethod::CellTransfer);

int jost_node_count(const PotentialSpec& V, double dx);

JostTable solve_faddeev(const PotentialSpec& V, const KGrid& kg, double dx,
                        FaddeevMethod method = FaddeevMethod::CellTransfer);

// J(k) = f(-k,0)^dag B - f'(-k,0)^dag A
JostMatrixTable jost_matrix(const JostTable& jt, const BoundaryPair& bp);
Mat jost_matrix_at(const Mat& m_minus, const Mat& mprime_minus, double k, const BoundaryPair& bp);

// K(x_j, y_l) on x_j = j dx (j < nx) and y_l = l dx (l < ny), zero for y < x.
struct KernelTable {
    int n = 1;
    double dx = 1.0 / 256;
    int nx = 1;
    int ny = 1;
    MatSeries K;  // index j * ny + l
    double tail_ratio = 0.0;

    auto at(int j, int l) const { return K[Eigen::Index(j) * ny + l]; }
    double x(int j) const { return j * dx; }
    double y(int l) const { return l * dx; }
};

KernelTable marchenko_kernel(const JostTable& jt);

struct RepresentationSample {
    double k;
    double x;
};

// max |f(k,x) - e^{ikx} - int_x^inf e^{iky} K(x,y) dy| over the samples
double jost_representation_check(const PotentialSpec& V, const KernelTable& K,
                                 const std::vector<RepresentationSample>& samples);

// First Born term int_x^inf D_k(y-x) V(y) dy, exact on cells.
Mat born_term(const PotentialSpec& V, double k, double x);

}  // namespace scatter
