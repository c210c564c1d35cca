#include "scatter/core.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace scatter {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::NotSelfAdjointPair: return "NotSelfAdjointPair";
    case ErrorCode::DegeneratePair: return "DegeneratePair";
    case ErrorCode::NonHermitianCoupling: return "NonHermitianCoupling";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::TailNotNegligible: return "TailNotNegligible";
    case ErrorCode::SingularJost: return "SingularJost";
    case ErrorCode::NoPlateau: return "NoPlateau";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::SchurUnbounded: return "SchurUnbounded";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::DomainReflection: return "DomainReflection";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::StiffIntegration: return "StiffIntegration";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

KGrid::KGrid(double kmax_, int nk_) : kmax(kmax_), nk(nk_), dk(2.0 * kmax_ / nk_)
{
    if (nk <= 0 || nk % 2 != 0 || !(kmax > 0))
        throw Error(ErrorCode::ConfigError, "k grid needs an even positive node count and kmax > 0");
}

std::vector<double> KGrid::values() const
{
    std::vector<double> k(nk);
    for (int i = 0; i < nk; ++i) k[i] = (*this)[i];
    return k;
}

std::vector<double> KGrid::positive() const
{
    std::vector<double> k;
    k.reserve(nk / 2);
    for (int i = first_positive(); i < nk; ++i) k.push_back((*this)[i]);
    return k;
}

XGrid XGrid::covering(double xmax, double dx)
{
    int m = int(std::ceil(xmax / dx - 1e-9));
    return XGrid(dx, std::max(m, 0));
}

RVec trapezoid_weights(int points, double h)
{
    RVec w = RVec::Constant(points, h);
    if (points == 1) {
        w[0] = 0.0;
        return w;
    }
    w[0] = w[points - 1] = 0.5 * h;
    return w;
}

RVec simpson_weights(int points, double h)
{
    int intervals = points - 1;
    if (intervals < 2) return trapezoid_weights(points, h);
    RVec w = RVec::Zero(points);
    int even = intervals - intervals % 2;
    for (int j = 0; j < even; j += 2) {
        w[j] += h / 3.0;
        w[j + 1] += 4.0 * h / 3.0;
        w[j + 2] += h / 3.0;
    }
    if (even < intervals) {
        w[points - 2] += 0.5 * h;
        w[points - 1] += 0.5 * h;
    }
    return w;
}

double edge_taper(double k, double kmax, double fraction)
{
    double a = std::abs(k) / kmax;
    double start = 1.0 - fraction;
    if (a <= start) return 1.0;
    if (a >= 1.0) return 0.0;
    double s = (a - start) / fraction;
    return 0.5 * (1.0 + std::cos(pi * s));
}

int thread_count()
{
    int cap = 0;
    if (const char* env = std::getenv("SCATTER_THREADS")) cap = std::atoi(env);
#ifdef _OPENMP
    int avail = omp_get_max_threads();
    return cap > 0 ? std::min(cap, avail) : avail;
#else
    return 1;
#endif
}

void check_grid(const KGrid& kg, double dx)
{
    if (dx > pi / (4.0 * kg.kmax) + 1e-15)
        throw Error(ErrorCode::GridTooCoarse,
                    "dx = " + std::to_string(dx) + " exceeds pi/(4 kmax) = " + std::to_string(pi / (4.0 * kg.kmax)));
}

}  // namespace scatter
