#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "scatter/scattering.hpp"

#include <cmath>

using namespace scatter;

namespace {

const double robin_theta = std::atan(1.0 / std::tanh(1.0));

ScatteringTable build(const PotentialSpec& v, const BoundaryPair& bp, double kmax = 40.0, int nk = 4096,
                      double dx = 1.0 / 256)
{
    auto jt = solve_faddeev(v, KGrid(kmax, nk), dx);
    return smatrix(jost_matrix(jt, bp));
}

double max_dev(const ScatteringTable& st, const Mat& ref)
{
    double d = 0.0;
    for (int i = 0; i < st.kgrid.nk; ++i) d = std::max(d, (st.S[i] - ref).cwiseAbs().maxCoeff());
    return d;
}

}  // namespace

TEST_CASE("free closed forms")
{
    auto neu = build(zero_potential(2), neumann(2), 20.0, 256, 1.0 / 64);
    CHECK(max_dev(neu, Mat::Identity(2, 2)) < 1e-15);
    CHECK((neu.S0 - Mat::Identity(2, 2)).norm() < 1e-12);
    CHECK((neu.Sinf - Mat::Identity(2, 2)).norm() < 1e-15);

    auto dir = build(zero_potential(1), dirichlet(1), 20.0, 256, 1.0 / 64);
    CHECK(max_dev(dir, -Mat::Identity(1, 1)) == 0.0);
    CHECK(std::abs(dir.S0(0, 0) + 1.0) < 1e-12);
    CHECK(std::abs(dir.Sinf(0, 0) + 1.0) == 0.0);

    auto swap = build(zero_potential(2), line_interaction_matrices(Mat::Zero(1, 1)), 20.0, 256, 1.0 / 64);
    Mat sw(2, 2);
    sw << 0, 1, 1, 0;
    CHECK(max_dev(swap, sw) < 1e-15);
}

TEST_CASE("Robin example: unitarity, symmetry and limits")
{
    auto st = build(step_potential(1.0, 0.0, 1.0), robin(robin_theta));
    CHECK(st.exceptional);
    double unit = 0.0, sym = 0.0;
    for (int i = 0; i < st.kgrid.nk; ++i) {
        unit = std::max(unit, (st.S[i].adjoint() * st.S[i] - Mat::Identity(1, 1)).norm());
        sym = std::max(sym, (st.S[st.kgrid.mirror(i)] - st.S[i].adjoint()).norm());
    }
    CHECK(unit < 1e-8);
    CHECK(sym < 1e-8);
    CHECK(std::abs(st.S0(0, 0) - 1.0) < 1e-3);
    CHECK(std::abs(st.Sinf(0, 0) - 1.0) < 1e-3);
    MESSAGE("S0 = " << st.S0(0, 0) << ", Sinf = " << st.Sinf(0, 0) << ", plateau " << st.plateau_deviation);
}

TEST_CASE("matrix potential with mixed boundary stays unitary")
{
    Mat v(2, 2);
    v << 1.5, cplx(0.2, -0.6), cplx(0.2, 0.6), -0.8;
    BoundaryPair bp = robin((RVec(2) << 0.7, pi).finished());
    auto st = build(matrix_step(v, 0.0, 1.2), bp, 40.0, 1024, 1.0 / 128);
    for (int i = 0; i < st.kgrid.nk; ++i) {
        CHECK((st.S[i].adjoint() * st.S[i] - Mat::Identity(2, 2)).norm() < 1e-8);
        CHECK((st.S[st.kgrid.mirror(i)] - st.S[i].adjoint()).norm() < 1e-8);
    }
    // one Dirichlet channel, so the limit is not the identity
    CHECK((st.Sinf - Mat::Identity(2, 2)).norm() > 0.5);
}

TEST_CASE("dilation covariance with Dirichlet data")
{
    auto a = build(step_potential(1.0, 0.0, 1.0), dirichlet(1), 20.0, 512, 1.0 / 256);
    auto b = build(step_potential(4.0, 0.0, 0.5), dirichlet(1), 40.0, 512, 1.0 / 256);
    for (int i = 0; i < 512; ++i) CHECK(std::abs(a.S[i](0, 0) - b.S[i](0, 0)) < 1e-6);
}

TEST_CASE("symbols vanish for constant S")
{
    auto st = build(zero_potential(1), dirichlet(1), 20.0, 256, 1.0 / 64);
    LineGrid g{0.05, 200};
    auto fs = fs_symbol(st, g);
    CHECK(fs.values.data.norm() == 0.0);
    auto p = p_symbols(st, g);
    CHECK(p.plus.values.data.norm() == 0.0);
    CHECK(p.minus.values.data.norm() == 0.0);
}

TEST_CASE("Robin example symbols are integrable and reproduce S")
{
    auto st = build(step_potential(1.0, 0.0, 1.0), robin(robin_theta));
    LineGrid g{1.0 / 64, 64 * 80};
    auto fs = fs_symbol(st, g);
    MESSAGE("int |F_s| = " << fs.l1 << ", outer fraction " << fs.outer_mass);
    CHECK(std::isfinite(fs.l1));
    CHECK(fs.outer_mass < 0.05);
    double worst = 0.0;
    for (int i = 0; i < st.kgrid.nk; i += 37) {
        double k = st.kgrid[i];
        if (std::abs(k) > 0.85 * st.kgrid.kmax) continue;
        worst = std::max(worst, std::abs(fs_reconstruct(fs, k)(0, 0) - (st.S[i](0, 0) - st.Sinf(0, 0))));
    }
    MESSAGE("F_s reconstruction error " << worst);
    CHECK(worst < 1e-3);
    auto p = p_symbols(st, g);
    CHECK(std::isfinite(p.plus.l1));
    CHECK(std::isfinite(p.minus.l1));
    MESSAGE("int |P+| = " << p.plus.l1 << ", int |P-| = " << p.minus.l1);
}

TEST_CASE("analytic Fourier pairs for the half-line transform")
{
    double dk = 0.01, kmax = 60.0;
    int half = int(kmax / dk);
    MatSeries e(1, half);
    for (int i = 0; i < half; ++i) e[i](0, 0) = std::exp(-(i + 0.5) * dk);
    LineGrid g{0.25, 20};
    auto pm = half_line_symbol_transform(e, dk, kmax, g, +1);
    for (int j = 0; j < g.size(); ++j) {
        cplx expect = 1.0 / (2.0 * pi * (1.0 - iu * g[j]));
        CHECK(std::abs(pm.values[j](0, 0) - expect) < 1e-5);
    }

    dk = 0.005;
    kmax = 400.0;
    half = int(kmax / dk);
    MatSeries r(1, half);
    for (int i = 0; i < half; ++i) r[i](0, 0) = 1.0 / (1.0 + iu * ((i + 0.5) * dk));
    LineGrid g2{0.25, 20};
    auto pr = half_line_symbol_transform(r, dk, kmax, g2, +1);
    for (int j = 0; j < g2.size(); ++j) {
        double x = g2[j];
        if (std::abs(x) < 0.5) continue;
        double expect = x > 0 ? std::exp(-x) : 0.0;
        CHECK(std::abs(2.0 * pr.values[j](0, 0).real() - expect) < 1e-3);
    }
}

TEST_CASE("derivative asymptotics")
{
    auto free = build(zero_potential(1), neumann(1), 20.0, 256, 1.0 / 64);
    auto rf = sdot_asymptotics(free);
    CHECK(rf.trivial);
    CHECK(std::isnan(rf.slope));
    CHECK(rf.h1 < 1e-20);
    CHECK(h1_membership(build(zero_potential(1), dirichlet(1), 20.0, 256, 1.0 / 64)) == 0.0);

    auto gen = build(step_potential(1.0, 0.0, 1.0), dirichlet(1));
    CHECK_FALSE(gen.exceptional);
    auto rg = sdot_asymptotics(gen);
    CHECK(rg.low_max < 10.0 * rg.at_one);

    auto rob = build(step_potential(1.0, 0.0, 1.0), robin(robin_theta));
    auto rr = sdot_asymptotics(rob);
    MESSAGE("Robin slope " << rr.slope << ", low max " << rr.low_max << ", at one " << rr.at_one);
    CHECK(std::isfinite(rr.slope));
    CHECK(rr.slope < -0.8);  // at least the 1/k decay

    auto rob2 = build(step_potential(1.0, 0.0, 1.0), robin(robin_theta), 80.0, 8192, 1.0 / 512);
    double h1a = h1_membership(rob), h1b = h1_membership(rob2);
    MESSAGE("H1 " << h1a << " vs " << h1b);
    CHECK(std::abs(h1a - h1b) < 0.1 * h1a);
}

TEST_CASE("singular Jost matrix is reported")
{
    JostMatrixTable J;
    J.kgrid = KGrid(1.0, 4);
    J.J = MatSeries(1, 4);
    for (int i = 0; i < 4; ++i) J.J[i](0, 0) = 1.0;
    J.J[1](0, 0) = 0.0;
    J.J0 = Mat::Identity(1, 1);
    try {
        smatrix(J);
        FAIL("expected SingularJost");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularJost);
    }
}
