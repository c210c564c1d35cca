#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "scatter/fourier.hpp"

#include <cmath>
#include <random>

using namespace scatter;

namespace {

Mat brute(const Mat& a, double u0, double du, double v0, double dv, int nv, int sign)
{
    Mat out = Mat::Zero(a.rows(), nv);
    for (int l = 0; l < nv; ++l)
        for (Eigen::Index i = 0; i < a.cols(); ++i)
            out.col(l) += a.col(i) * std::polar(1.0, sign * (u0 + i * du) * (v0 + l * dv));
    return out;
}

Mat random_mat(int rows, int cols, unsigned seed)
{
    std::mt19937 gen(seed);
    std::normal_distribution<double> d;
    Mat a(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) a(i, j) = cplx(d(gen), d(gen));
    return a;
}

}  // namespace

TEST_CASE("phase sums match the direct double loop")
{
    // many rows and few points: blocked products
    Mat a = random_mat(8, 40, 1);
    Mat ref = brute(a, -3.1, 0.07, 0.5, 0.013, 30, +1);
    CHECK((phase_sum(a, -3.1, 0.07, 0.5, 0.013, 30, +1) - ref).norm() < 1e-12 * ref.norm());

    // one row and long grids: chirp-z path
    Mat b = random_mat(1, 3000, 2);
    for (int sign : {+1, -1}) {
        Mat r = brute(b, -20.0 + 0.5 * 40.0 / 3000, 40.0 / 3000, -25.0, 1.0 / 64, 3200, sign);
        Mat f = phase_sum(b, -20.0 + 0.5 * 40.0 / 3000, 40.0 / 3000, -25.0, 1.0 / 64, 3200, sign, 2.0);
        CHECK((f - 2.0 * r).norm() < 1e-11 * r.norm());
    }

    CHECK(phase_sum(Mat(2, 0), 0.0, 1.0, 0.0, 1.0, 5, +1).norm() == 0.0);
}

TEST_CASE("moments")
{
    cplx z(0.3, -2.0);
    double h = 0.7;
    // closed forms away from the small-argument branch
    CHECK(std::abs(phi_moment(0, z, h) - (std::exp(z * h) - 1.0) / z) < 1e-14);
    CHECK(std::abs(phi_moment(1, z, h) - (h * std::exp(z * h) / z - (std::exp(z * h) - 1.0) / (z * z))) < 1e-14);
    // series branch against plain quadrature
    cplx small(1e-3, 2e-3);
    cplx acc = 0.0;
    int n = 20000;
    for (int i = 0; i < n; ++i) {
        double s = (i + 0.5) * h / n;
        acc += s * std::exp(small * s) * (h / n);
    }
    CHECK(std::abs(phi_moment(1, small, h) - acc) < 1e-9);
}

TEST_CASE("linear convolution")
{
    Eigen::VectorXcd a(3), b(2);
    a << 1.0, 2.0, cplx(0, 1);
    b << 1.0, -1.0;
    Eigen::VectorXcd c = linear_convolution(a, b);
    REQUIRE(c.size() == 4);
    CHECK(std::abs(c[0] - 1.0) < 1e-14);
    CHECK(std::abs(c[1] - 1.0) < 1e-14);
    CHECK(std::abs(c[2] - cplx(-2, 1)) < 1e-14);
    CHECK(std::abs(c[3] - cplx(0, -1)) < 1e-14);
}
