#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "scatter/boundary.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <random>

using namespace scatter;

namespace {

Mat random_unitary(int n, std::mt19937& gen)
{
    std::normal_distribution<double> g;
    Mat z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = cplx(g(gen), g(gen));
    Eigen::HouseholderQR<Mat> qr(z);
    return qr.householderQ() * Mat::Identity(n, n);
}

Mat random_invertible(int n, std::mt19937& gen)
{
    std::normal_distribution<double> g;
    Mat z(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) z(i, j) = cplx(g(gen), g(gen));
    return z + 3.0 * Mat::Identity(n, n);
}

std::vector<double> sorted(const RVec& v)
{
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

TEST_CASE("validation")
{
    CHECK_NOTHROW(validate_boundary(neumann(3)));
    CHECK_NOTHROW(validate_boundary(dirichlet(2)));
    Mat lam(2, 2);
    lam << 1.0, cplx(0.5, 0.2), cplx(0.5, -0.2), -2.0;
    CHECK_NOTHROW(validate_boundary(line_interaction_matrices(lam)));
    try {
        validate_boundary({Mat::Identity(2, 2), iu * Mat::Identity(2, 2)});
        FAIL("expected NotSelfAdjointPair");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotSelfAdjointPair);
    }
    try {
        validate_boundary({Mat::Zero(2, 2), Mat::Zero(2, 2)});
        FAIL("expected DegeneratePair");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegeneratePair);
    }
}

TEST_CASE("interaction matrices")
{
    auto bp = line_interaction_matrices(Mat::Zero(1, 1));
    Mat a(2, 2), b(2, 2);
    a << 0, 1, 0, 1;
    b << -1, 0, 1, 0;
    CHECK((bp.A - a).norm() == 0.0);
    CHECK((bp.B - b).norm() == 0.0);

    std::mt19937 gen(7);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        Mat z(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) z(i, j) = cplx(g(gen), g(gen));
        Mat lam = z + z.adjoint();
        auto p = line_interaction_matrices(lam);
        CHECK((p.B.adjoint() * p.A - p.A.adjoint() * p.B).cwiseAbs().maxCoeff() < 1e-14);
    }
    Mat bad(1, 1);
    bad << iu;
    try {
        line_interaction_matrices(bad);
        FAIL("expected NonHermitianCoupling");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonHermitianCoupling);
    }

    // Lambda = 2, folded data Z = (Y(0+), Y(0-)), Z' = (Y'(0+), -Y'(0-)):
    // continuity plus Y'(0+) - Y'(0-) = 2 Y(0) satisfies the condition, a wrong jump does not
    auto d = line_interaction_matrices(Mat::Constant(1, 1, 2.0));
    Vec z(2), zp(2);
    double y0 = 0.7, right = 1.1, left = right - 2.0 * y0;
    z << y0, y0;
    zp << right, -left;
    CHECK((-d.B.adjoint() * z + d.A.adjoint() * zp).norm() < 1e-14);
    zp << right, -(right - y0);
    CHECK((-d.B.adjoint() * z + d.A.adjoint() * zp).norm() > 0.1);
}

TEST_CASE("diagonal form of the free line pair")
{
    auto df = diagonalize(line_interaction_matrices(Mat::Zero(1, 1)));
    CHECK(std::abs(df.thetas[0] - pi) < 1e-12);
    CHECK(std::abs(df.thetas[1] - 0.5 * pi) < 1e-12);
    CHECK(df.n_dirichlet == 1);
    CHECK(df.n_neumann == 1);
    CHECK_FALSE(predicted_s_infinity_identity(df));
    // columns (e1 - e2)/sqrt2 and (e1 + e2)/sqrt2
    double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(df.M(0, 0) - r) < 1e-12);
    CHECK(std::abs(df.M(1, 0) + r) < 1e-12);
    CHECK(std::abs(df.M(0, 1) - r) < 1e-12);
    CHECK(std::abs(df.M(1, 1) - r) < 1e-12);

    Mat lam = Mat::Zero(3, 3);
    auto df3 = diagonalize(line_interaction_matrices(lam));
    CHECK(df3.n_dirichlet == 3);
    CHECK(df3.n_neumann == 3);
    for (int j = 0; j < 3; ++j) {
        CHECK(std::abs(df3.thetas[j] - pi) < 1e-12);
        CHECK(std::abs(df3.thetas[j + 3] - 0.5 * pi) < 1e-12);
    }
    Mat swap = Mat::Zero(6, 6);
    swap.topRightCorner(3, 3) = -Mat::Identity(3, 3);
    swap.bottomLeftCorner(3, 3) = -Mat::Identity(3, 3);
    Mat d = df3.M.adjoint() * swap * df3.M;
    Mat expect = Mat::Identity(6, 6);
    expect.bottomRightCorner(3, 3) *= -1.0;
    CHECK((d - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scalar Robin and the simple cases")
{
    double theta = std::atan(1.0 / std::tanh(1.0));
    auto df = diagonalize(robin(theta));
    CHECK(std::abs(df.thetas[0] - theta) < 1e-12);
    CHECK(std::abs(std::abs(df.M(0, 0)) - 1.0) < 1e-12);
    CHECK(df.n_mixed == 1);
    CHECK(predicted_s_infinity_identity(diagonalize(neumann(2))));
    CHECK_FALSE(predicted_s_infinity_identity(diagonalize(dirichlet(2))));
    CHECK(diagonalize(dirichlet(2)).n_dirichlet == 2);
}

TEST_CASE("random pairs reconstruct and keep their angles under right multiplication")
{
    std::mt19937 gen(2024);
    std::uniform_real_distribution<double> ang(0.05, pi);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + trial % 4;
        RVec th(n);
        for (int j = 0; j < n; ++j) th[j] = ang(gen);
        if (trial % 5 == 0) th[0] = pi;
        if (trial % 7 == 0) th[n - 1] = 0.5 * pi;
        Mat M = random_unitary(n, gen);
        Mat T2 = random_invertible(n, gen);
        Eigen::VectorXcd ph(n);
        for (int j = 0; j < n; ++j) ph[j] = std::polar(1.0, th[j]);
        Mat T1 = ph.asDiagonal();
        Mat at = (-th.array().sin()).matrix().cast<cplx>().asDiagonal();
        Mat bt = th.array().cos().matrix().cast<cplx>().asDiagonal();
        BoundaryPair bp{M * at * T1 * M.adjoint() * T2, M * bt * T1 * M.adjoint() * T2};

        auto df = diagonalize(bp);
        CHECK((df.M.adjoint() * df.M - Mat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        Mat u = boundary_unitary(bp);
        Mat d = df.M.adjoint() * u * df.M;
        for (int i = 0; i < n; ++i) {
            CHECK(std::abs(std::abs(d(i, i)) - 1.0) < 1e-10);
            for (int j = 0; j < n; ++j)
                if (i != j) CHECK(std::abs(d(i, j)) < 1e-10);
        }
        auto rec = reconstruct(df);
        CHECK((rec.A - bp.A).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((rec.B - bp.B).cwiseAbs().maxCoeff() < 1e-9);

        auto s1 = sorted(th), s2 = sorted(df.thetas);
        for (int j = 0; j < n; ++j) CHECK(std::abs(s1[j] - s2[j]) < 1e-8);

        Mat T = random_invertible(n, gen);
        auto df2 = diagonalize({bp.A * T, bp.B * T});
        auto s3 = sorted(df2.thetas);
        for (int j = 0; j < n; ++j) CHECK(std::abs(s2[j] - s3[j]) < 1e-8);
    }
}
