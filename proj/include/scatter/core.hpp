#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace scatter {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx iu{0.0, 1.0};

enum class ErrorCode {
    NonHermitian,
    EmptySupport,
    NotSelfAdjointPair,
    DegeneratePair,
    NonHermitianCoupling,
    NoConvergence,
    GridTooCoarse,
    TailNotNegligible,
    SingularJost,
    NoPlateau,
    WindowTooSmall,
    SchurUnbounded,
    HypothesisViolated,
    DomainReflection,
    GridMismatch,
    StiffIntegration,
    IoError,
    ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// A sequence of n x n blocks stored side by side in one n x (n*count) matrix.
struct MatSeries {
    int n = 0;
    Mat data;

    MatSeries() = default;
    MatSeries(int n_, Eigen::Index count) : n(n_), data(Mat::Zero(n_, n_ * count)) {}

    Eigen::Index size() const { return n ? data.cols() / n : 0; }
    auto operator[](Eigen::Index i) { return data.middleCols(i * n, n); }
    auto operator[](Eigen::Index i) const { return data.middleCols(i * n, n); }
};

struct GridParams {
    double kmax = 40.0;
    int nk = 4096;
    double dx = 1.0 / 256.0;
    double xmax = 40.0;
};

// Symmetric midpoint grid on (-kmax, kmax): k_i = -kmax + (i + 1/2) dk, so 0 is never a node
// and k -> -k maps node i to node nk-1-i.
struct KGrid {
    double kmax = 40.0;
    int nk = 4096;
    double dk = 80.0 / 4096;

    KGrid() = default;
    KGrid(double kmax_, int nk_);

    double operator[](int i) const { return -kmax + (i + 0.5) * dk; }
    int size() const { return nk; }
    int mirror(int i) const { return nk - 1 - i; }
    int first_positive() const { return nk / 2; }
    std::vector<double> values() const;
    std::vector<double> positive() const;
};

// Uniform grid x_j = j dx, j = 0..intervals.
struct XGrid {
    double dx = 1.0 / 256;
    int intervals = 0;

    XGrid() = default;
    XGrid(double dx_, int intervals_) : dx(dx_), intervals(intervals_) {}
    static XGrid covering(double xmax, double dx);

    double operator[](int j) const { return j * dx; }
    int size() const { return intervals + 1; }
    double xmax() const { return intervals * dx; }
};

// Quadrature weights on a uniform grid of `points` nodes with spacing h.
RVec trapezoid_weights(int points, double h);
// Composite Simpson; falls back to Simpson + one trapezoid panel if the interval count is odd.
RVec simpson_weights(int points, double h);

// Cosine taper over the outer `fraction` of a symmetric range, evaluated at |k| / kmax.
double edge_taper(double k, double kmax, double fraction = 0.1);

// Worker count honoring SCATTER_THREADS.
int thread_count();

void check_grid(const KGrid& kg, double dx);

}  // namespace scatter
