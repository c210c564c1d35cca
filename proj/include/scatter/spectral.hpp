#pragma once

#include "scatter/field.hpp"
#include "scatter/scattering.hpp"

#include <Eigen/SparseCore>

namespace scatter {

// Everything the stationary machinery needs for one half-line problem.
struct HalfLineModel {
    PotentialSpec V;
    BoundaryPair bp;
    JostTable jost;
    JostMatrixTable J;
    ScatteringTable S;
};

HalfLineModel build_model(const PotentialSpec& V, const BoundaryPair& bp, const GridParams& g,
                          const SmatrixOptions& opt = {});

// Psi(k_i, x_j) = f(-k, x) + f(k, x) S(k) on the stored nodes; beyond them the free form
// e^{-ikx} + e^{ikx} S(k) is exact and evaluated on the fly.
struct PhysicalSolutionTable {
    KGrid kgrid;
    int n = 1;
    double dx = 1.0 / 256;
    int nx = 1;
    MatSeries psi;  // i * nx + j
    MatSeries S;

    Mat at(int i, int j) const;
    double x(int j) const { return j * dx; }
};

PhysicalSolutionTable physical_solution(const JostTable& jt, const ScatteringTable& st);

// Cosine transform sqrt(2/pi) int_0^inf cos(kx) Y dx on k_q = (q + 1/2) dk, q < count (trapezoid in x).
KField f0_transform(const Field& Y, double dk, int count);
// sqrt(2/pi) sum_q dk cos(k_q x) Z_q on the half-line grid (dx, m).
Field f0_adjoint(const KField& Z, double dx, int m);

// sqrt(2/pi) int_0^inf sin(kx) Y dx and sqrt(2/pi) sum_q dk sin(k_q x) Z_q, same grids as above.
KField sine_transform(const Field& Y, double dk, int count);
Field sine_adjoint(const KField& Z, double dx, int m);

// (F^s Y)(k) = (2pi)^{-1/2} int Psi(-s k, x)^dag Y(x) dx on the positive half of the table's k grid.
KField fourier_maps(const PhysicalSolutionTable& P, const Field& Y, int sign);
Field fourier_maps_adjoint(const PhysicalSolutionTable& P, const KField& Z, int sign, double dx, int m);

// (F^s)^dag F^s Y
Field pac_projection(const PhysicalSolutionTable& P, const Field& Y, int sign = +1);
// (F^s)^dag e^{-itk^2} F^s Y
Field evolve_spectral(const PhysicalSolutionTable& P, const Field& Y, double t, int sign = +1);

// -d^2/dx^2 + V on x_j = j dx, j < nodes, with Y = 0 at x = nodes dx. Unknowns live in the
// frame Z = M^dag Y where the boundary condition splits into -cos(theta) Z(0) - sin(theta) Z'(0) = 0.
// Robin and Neumann channels use a ghost point; Dirichlet channels drop node 0.
// Generalized form S z = lambda W z with W = dx diag(1/2 at node 0, 1 elsewhere).
struct DiscreteHamiltonian {
    int n = 1;
    double dx = 1.0 / 256;
    int nodes = 0;
    Mat M;
    RVec thetas;
    std::vector<int> index;  // j * n + c -> unknown or -1
    Eigen::SparseMatrix<cplx> S;
    RVec w;
    double hermiticity_defect = 0.0;

    int size() const { return int(w.size()); }
    Vec to_frame(const Field& Y) const;
    Field from_frame(const Vec& z) const;
};

DiscreteHamiltonian discrete_hamiltonian(const PotentialSpec& V, const BoundaryPair& bp, double dx, int nodes);

// Eigenvalues below `below`, located by inertia counts and bisection.
std::vector<double> bound_states(const DiscreteHamiltonian& dh, double below = -1e-8, double tol = 1e-11);
int eigen_count_below(const DiscreteHamiltonian& dh, double sigma);

// Crank-Nicolson for e^{-itH}.
Field evolve_cn(const DiscreteHamiltonian& dh, const Field& Y, double t, int steps);

// A e^{-(x-a)^2 / (2 sigma^2) + i p x}
struct GaussianPacket {
    Vec amplitude;
    double center = 0.0;
    double width = 1.0;
    double momentum = 0.0;
};

// e^{-itH0} applied to the packet on the line, or to its even (Neumann) / odd (Dirichlet)
// image sum on the half line, sampled on x_r = r dx, r <= m.
Field free_gaussian_line(const GaussianPacket& g, double t, double dx, int m);
Field free_gaussian_half(const GaussianPacket& g, double t, double dx, int m, bool dirichlet = false);

}  // namespace scatter
