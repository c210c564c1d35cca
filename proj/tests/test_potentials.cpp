#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "scatter/potentials.hpp"

#include <cmath>

using namespace scatter;

TEST_CASE("zero potential is valid with vanishing norms")
{
    auto d = validate_potential(zero_potential(2));
    CHECK(d.l1_1 == 0.0);
    CHECK(l1gamma_norm(zero_potential(1), 2.5) == 0.0);
    auto m = moments(zero_potential(1), {0.0, 0.5, 3.0});
    for (size_t i = 0; i < 3; ++i) {
        CHECK(m.sigma[i] == 0.0);
        CHECK(m.sigma1[i] == 0.0);
    }
}

TEST_CASE("unit step norms and moments")
{
    auto v = step_potential(1.0, 0.0, 1.0);
    auto d = validate_potential(v);
    CHECK(d.l1_1 == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(l1gamma_norm(v, 1.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(l1gamma_norm(v, 3.0) == doctest::Approx(15.0 / 4.0).epsilon(1e-14));
    CHECK(sigma_at(v, 0.0) == doctest::Approx(1.0));
    CHECK(sigma1_at(v, 0.0) == doctest::Approx(0.5));
    CHECK(sigma_at(v, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("anti-Hermitian value is rejected")
{
    Mat v(2, 2);
    v << 0.0, iu, iu, 0.0;
    try {
        validate_potential(matrix_step(v, 0.0, 1.0));
        FAIL("expected NonHermitian");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonHermitian);
    }
}

TEST_CASE("overlapping or empty cells are rejected")
{
    PotentialSpec p;
    p.n = 1;
    p.cells.push_back({0.0, 1.0, Mat::Constant(1, 1, 1.0)});
    p.cells.push_back({0.5, 2.0, Mat::Constant(1, 1, 1.0)});
    CHECK_THROWS_AS(validate_potential(p), Error);
    PotentialSpec q;
    q.cells.push_back({1.0, 1.0, Mat::Constant(1, 1, 1.0)});
    try {
        validate_potential(q);
        FAIL("expected EmptySupport");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptySupport);
    }
}

TEST_CASE("moments are antitone and integrate to the first moment")
{
    Mat v(2, 2);
    v << 2.0, cplx(0.0, 1.0), cplx(0.0, -1.0), -1.0;
    PotentialSpec p = sampled_potential(
        2, [&](double x) { Mat m = v * std::exp(-x); return m; }, 0.0, 6.0, 1.0 / 64);
    validate_potential(p);
    std::vector<double> xs;
    for (int j = 0; j <= 6 * 64; ++j) xs.push_back(j / 64.0);
    auto m = moments(p, xs);
    for (size_t i = 1; i < xs.size(); ++i) {
        CHECK(m.sigma[i] <= m.sigma[i - 1] + 1e-15);
        CHECK(m.sigma1[i] <= m.sigma1[i - 1] + 1e-15);
    }
    // sigma is piecewise linear between cell edges, so the trapezoid rule on the edges is exact
    double integral = 0.0;
    for (size_t i = 1; i < xs.size(); ++i) integral += 0.5 * (m.sigma[i] + m.sigma[i - 1]) / 64.0;
    CHECK(std::abs(integral - m.sigma1[0]) < 1e-8);
}

TEST_CASE("folding the line potential")
{
    PotentialSpec left;
    left.n = 1;
    left.cells.push_back({-1.0, 0.0, Mat::Constant(1, 1, 1.0)});
    auto f = fold_line_potential(left);
    CHECK(f.plus.is_zero());
    REQUIRE(f.minus.cells.size() == 1);
    CHECK(f.minus.cells[0].a == 0.0);
    CHECK(f.minus.cells[0].b == 1.0);

    PotentialSpec even;
    even.n = 1;
    even.cells.push_back({-2.0, -1.0, Mat::Constant(1, 1, 0.3)});
    even.cells.push_back({-1.0, 1.0, Mat::Constant(1, 1, 0.7)});
    even.cells.push_back({1.0, 2.0, Mat::Constant(1, 1, 0.3)});
    auto g = fold_line_potential(even);
    for (double x = 0.01; x < 2.5; x += 0.1) CHECK(std::abs(g.plus.value(x)(0, 0) - g.minus.value(x)(0, 0)) == 0.0);

    // x on (0,1) sampled, then round trip through unfold
    auto ramp = sampled_potential(
        1, [](double x) { return Mat::Constant(1, 1, x); }, 0.0, 1.0, 1.0 / 32);
    auto h = fold_line_potential(ramp);
    CHECK(h.minus.is_zero());
    auto back = unfold_line_potential(h.plus, h.minus);
    for (int j = -40; j <= 40; ++j) {
        double x = j / 32.0 + 1.0 / 64;
        CHECK(std::abs(back.value(x)(0, 0) - ramp.value(x)(0, 0)) == 0.0);
    }
    // block form is diag(V+, V-)
    auto b = g.block.value(0.5);
    CHECK(b.rows() == 2);
    CHECK(std::abs(b(0, 0) - 0.7) < 1e-15);
    CHECK(std::abs(b(1, 1) - 0.7) < 1e-15);
    CHECK(std::abs(b(0, 1)) == 0.0);
}

TEST_CASE("tail integrals of a step")
{
    auto v = step_potential(2.0, 0.0, 1.0);
    CHECK(std::abs(tail_integral(v, 0.25)(0, 0) - 1.5) < 1e-15);
    // C(x) = int_x^1 2 * 2(1-t) dt = 2 (1-x)^2
    CHECK(std::abs(tail_product_integral(v, 0.25)(0, 0) - 2.0 * 0.75 * 0.75) < 1e-14);
}
