#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "scatter/spectral.hpp"

#include <cmath>

using namespace scatter;

namespace {

const double robin_theta = std::atan(1.0 / std::tanh(1.0));

GridParams small_grid()
{
    GridParams g;
    g.kmax = 20.0;
    g.nk = 1024;
    g.dx = 1.0 / 128;
    return g;
}

Field gaussian(double a, double sigma, double dx, int m, int n = 1)
{
    GaussianPacket g;
    g.amplitude = Vec::Ones(n);
    g.center = a;
    g.width = sigma;
    Field f = Field::half(dx, m, n);
    for (int r = 0; r <= m; ++r) f.v.row(r).setConstant(std::exp(-std::pow(f.x(r) - a, 2) / (2 * sigma * sigma)));
    return f;
}

double rel(const Field& a, const Field& b) { return l2_norm(a - b) / l2_norm(b); }

}  // namespace

TEST_CASE("physical solution closed forms")
{
    auto neu = build_model(zero_potential(1), neumann(1), small_grid());
    auto P = physical_solution(neu.jost, neu.S);
    auto dir = build_model(zero_potential(1), dirichlet(1), small_grid());
    auto Q = physical_solution(dir.jost, dir.S);
    for (int i = 0; i < P.kgrid.nk; i += 17)
        for (int j : {0, 3, 50, 400}) {
            double k = P.kgrid[i], x = j * P.dx;
            CHECK(std::abs(P.at(i, j)(0, 0) - 2.0 * std::cos(k * x)) < 1e-12);
            CHECK(std::abs(Q.at(i, j)(0, 0) + 2.0 * iu * std::sin(k * x)) < 1e-12);
        }
}

TEST_CASE("physical solution for the Robin example")
{
    auto md = build_model(step_potential(1.0, 0.0, 1.0), robin(robin_theta), small_grid());
    auto P = physical_solution(md.jost, md.S);
    const auto& jt = md.jost;
    const auto& bp = md.bp;
    double bc = 0.0, outer = 0.0;
    for (int i = 0; i < jt.kgrid.nk; i += 7) {
        Mat psi0 = P.at(i, 0);
        Mat dpsi0 = jt.fprime(jt.kgrid.mirror(i), 0) + jt.fprime(i, 0) * md.S.S[i];
        bc = std::max(bc, (-bp.B.adjoint() * psi0 + bp.A.adjoint() * dpsi0).norm());
        int j = P.nx - 1;
        double k = jt.kgrid[i], x = P.x(j);
        Mat free = std::polar(1.0, -k * x) * Mat::Identity(1, 1) + std::polar(1.0, k * x) * md.S.S[i];
        outer = std::max(outer, (P.at(i, j) - free).norm());
    }
    CHECK(bc < 1e-6);
    CHECK(outer < 1e-8);

    // second-difference residual of the stationary equation shrinks like dx^2
    auto residual = [&](double dx) {
        GridParams g = small_grid();
        g.dx = dx;
        auto m = build_model(step_potential(1.0, 0.0, 1.0), robin(robin_theta), g);
        auto T = physical_solution(m.jost, m.S);
        int i = T.kgrid.first_positive() + int(3.0 / T.kgrid.dk);
        double k = T.kgrid[i], worst = 0.0;
        for (int j = 1; j + 1 < T.nx; ++j) {
            double x = T.x(j);
            if (std::abs(x - 1.0) < 2 * dx) continue;
            Mat d2 = (T.at(i, j + 1) - 2.0 * T.at(i, j) + T.at(i, j - 1)) / (dx * dx);
            worst = std::max(worst, (-d2 + m.V.value(x) * T.at(i, j) - k * k * T.at(i, j)).norm());
        }
        return worst;
    };
    double r1 = residual(1.0 / 64), r2 = residual(1.0 / 128);
    MESSAGE("residual " << r1 << " -> " << r2);
    CHECK(r2 < 0.3 * r1);
}

TEST_CASE("cosine transform")
{
    double dx = 1.0 / 256;
    int m = 60 * 256;
    Field e = Field::half(dx, m, 1);
    for (int r = 0; r <= m; ++r) e.v(r, 0) = std::exp(-e.x(r));
    auto z = f0_transform(e, 0.01, 1000);
    for (int q = 0; q < z.count(); q += 13) CHECK(std::abs(z.v(q, 0) - std::sqrt(2 / pi) / (1 + z.k(q) * z.k(q))) < 1e-5);

    Field zero = Field::half(dx, m, 1);
    CHECK(f0_transform(zero, 0.01, 100).v.norm() == 0.0);

    // centred far enough from 0 that the even extension is smooth
    Field g = gaussian(8.0, 1.0, 1.0 / 128, 40 * 128);
    auto gz = f0_transform(g, 0.01, 1500);
    CHECK(std::abs(l2_norm(gz) - l2_norm(g)) < 1e-6);
    Field back = f0_adjoint(gz, g.dx, g.m);
    CHECK(rel(back, g) < 1e-6);
}

TEST_CASE("sine transform")
{
    double dx = 1.0 / 256;
    int m = 60 * 256;
    Field e = Field::half(dx, m, 1);
    for (int r = 0; r <= m; ++r) e.v(r, 0) = std::exp(-e.x(r));
    auto z = sine_transform(e, 0.01, 1000);
    for (int q = 0; q < z.count(); q += 13) {
        double k = z.k(q);
        // trapezoid endpoint error grows like dx^2 k / 12
        CHECK(std::abs(z.v(q, 0) - std::sqrt(2 / pi) * k / (1 + k * k)) < 1e-6 * (1 + k));
    }

    // x e^{-x^2/2} is odd-smooth even though it does not vanish quickly near 0
    Field g = Field::half(1.0 / 128, 40 * 128, 2);
    for (int r = 0; r <= g.m; ++r) {
        double x = g.x(r);
        g.v(r, 0) = x * std::exp(-x * x / 2);
        g.v(r, 1) = cplx(0, 2) * std::exp(-std::pow(x - 6, 2));
    }
    auto gz = sine_transform(g, 0.01, 1500);
    CHECK(std::abs(l2_norm(gz) - l2_norm(g)) < 1e-6);
    CHECK(rel(sine_adjoint(gz, g.dx, g.m), g) < 1e-6);

    KField w = gz;
    for (int q = 0; q < w.count(); ++q) w.v.row(q) *= std::polar(1.0, 0.3 * q);
    CHECK(std::abs(inner(sine_transform(g, 0.01, 1500), w) - inner(g, sine_adjoint(w, g.dx, g.m))) < 1e-10);
}

TEST_CASE("generalized Fourier maps")
{
    auto neu = build_model(zero_potential(1), neumann(1), small_grid());
    auto P = physical_solution(neu.jost, neu.S);
    Field g = gaussian(4.0, 1.0, 1.0 / 128, 40 * 128);
    auto f0 = f0_transform(g, P.kgrid.dk, P.kgrid.nk / 2);
    for (int s : {+1, -1}) CHECK((fourier_maps(P, g, s).v - f0.v).norm() < 1e-10);
    CHECK(fourier_maps(P, Field::half(g.dx, g.m, 1), +1).v.norm() == 0.0);

    auto md = build_model(step_potential(1.0, 0.0, 1.0), robin(robin_theta), small_grid());
    auto R = physical_solution(md.jost, md.S);
    auto dh = discrete_hamiltonian(md.V, md.bp, 1.0 / 128, 40 * 128);
    CHECK(bound_states(dh).empty());
    for (int s : {+1, -1}) {
        auto z = fourier_maps(R, g, s);
        CHECK(std::abs(l2_norm(z) - l2_norm(g)) < 2e-3 * l2_norm(g));
        CHECK(rel(pac_projection(R, g, s), g) < 2e-3);

        Field y2 = gaussian(2.0, 0.7, g.dx, g.m);
        KField w = fourier_maps(R, y2, -s);
        cplx lhs = inner(fourier_maps(R, g, s), w);
        cplx rhs = inner(g, fourier_maps_adjoint(R, w, s, g.dx, g.m));
        CHECK(std::abs(lhs - rhs) < 1e-8 * std::abs(lhs));
    }
}

TEST_CASE("spectral evolution")
{
    auto neu = build_model(zero_potential(1), neumann(1), small_grid());
    auto P = physical_solution(neu.jost, neu.S);
    GaussianPacket pk{Vec::Ones(1), 3.0, 1.0, 0.0};
    double dx = 1.0 / 128;
    int m = 60 * 128;
    Field y0 = free_gaussian_half(pk, 0.0, dx, m);
    for (double t : {0.5, 2.0, 4.0}) {
        Field exact = free_gaussian_half(pk, t, dx, m);
        CHECK(rel(evolve_spectral(P, y0, t), exact) < 2e-3);
    }

    auto md = build_model(step_potential(1.0, 0.0, 1.0), robin(robin_theta), small_grid());
    auto R = physical_solution(md.jost, md.S);
    Field g = gaussian(5.0, 1.0, dx, m);
    Field p0 = pac_projection(R, g);
    CHECK(rel(evolve_spectral(R, g, 0.0), p0) < 1e-12);
    double n0 = l2_norm(p0);
    for (double t : {0.5, 1.0, 2.0}) CHECK(std::abs(l2_norm(evolve_spectral(R, g, t)) - n0) < 1e-6);
}

TEST_CASE("discrete Hamiltonian spectra")
{
    double dx = 1.0 / 64;
    int nodes = 20 * 64;
    for (const auto& bp : {neumann(1), dirichlet(1), neumann(2), robin((RVec(2) << pi / 2, pi).finished())}) {
        auto dh = discrete_hamiltonian(zero_potential(bp.n()), bp, dx, nodes);
        CHECK(dh.hermiticity_defect < 1e-10);
        CHECK(bound_states(dh).empty());
        CHECK(eigen_count_below(dh, 4.0 / (dx * dx)) == dh.size());
    }

    // V = -5 on (0,1), Neumann: q tan q = kappa with q^2 + kappa^2 = 5
    auto dh = discrete_hamiltonian(step_potential(-5.0, 0.0, 1.0), neumann(1), 1.0 / 256, 30 * 256);
    auto ev = bound_states(dh);
    REQUIRE(ev.size() == 1);
    double lo = std::sqrt(5.0 - pi * pi / 4) + 1e-12, hi = std::sqrt(5.0);
    for (int it = 0; it < 200; ++it) {
        double kap = 0.5 * (lo + hi), q = std::sqrt(5.0 - kap * kap);
        if (q * std::tan(q) - kap > 0)
            lo = kap;
        else
            hi = kap;
    }
    double kap = 0.5 * (lo + hi);
    MESSAGE("bound state " << ev[0] << " vs " << -kap * kap);
    CHECK(std::abs(ev[0] + kap * kap) < 1e-3);

    auto rob = discrete_hamiltonian(step_potential(1.0, 0.0, 1.0), robin(robin_theta), 1.0 / 256, 40 * 256);
    CHECK(bound_states(rob).empty());

    Mat v(2, 2);
    v << 1.0, cplx(0.5, 0.5), cplx(0.5, -0.5), -2.0;
    BoundaryPair base = robin((RVec(2) << 0.6, pi).finished());
    Mat U(2, 2);
    U << std::cos(0.4), -std::sin(0.4) * iu, -std::sin(0.4) * iu, std::cos(0.4);
    BoundaryPair rotated{U * base.A * U.adjoint(), U * base.B * U.adjoint()};
    auto mixed = discrete_hamiltonian(matrix_step(v, 0.0, 2.0), rotated, dx, nodes);
    CHECK(mixed.hermiticity_defect < 1e-10);
}

TEST_CASE("Crank-Nicolson against closed forms and the spectral route")
{
    GaussianPacket pk{Vec::Ones(1), 6.0, 1.5, 0.0};
    double dx = 1.0 / 64;
    int m = 120 * 64;
    auto dh = discrete_hamiltonian(zero_potential(1), neumann(1), dx, m);
    Field y0 = free_gaussian_half(pk, 0.0, dx, m);
    for (double t : {5.0, 20.0}) {
        Field cn = evolve_cn(dh, y0, t, int(t / 0.01));
        CHECK(rel(cn, free_gaussian_half(pk, t, dx, m)) < 2e-3);
    }

    auto md = build_model(step_potential(1.0, 0.0, 1.0), robin(robin_theta), GridParams{});
    auto R = physical_solution(md.jost, md.S);
    double h = 1.0 / 256;
    int mm = 40 * 256;
    Field g = gaussian(5.0, 1.0, h, mm);
    auto rob = discrete_hamiltonian(md.V, md.bp, h, mm);
    Field a = evolve_cn(rob, g, 1.0, 200);
    Field b = evolve_spectral(R, g, 1.0);
    MESSAGE("CN vs spectral " << rel(a, b));
    CHECK(rel(a, b) < 2e-3);
}
