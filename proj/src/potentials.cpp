#include "scatter/potentials.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace scatter {

double PotentialSpec::support_bound() const { return cells.empty() ? 0.0 : cells.back().b; }

double PotentialSpec::support_left() const { return cells.empty() ? 0.0 : cells.front().a; }

Mat PotentialSpec::value(double x) const
{
    for (const auto& c : cells)
        if (x >= c.a && x < c.b) return c.v;
    return Mat::Zero(n, n);
}

std::vector<double> PotentialSpec::breakpoints(double lo, double hi, double dx) const
{
    std::vector<double> pts;
    int m = int(std::floor((hi - lo) / dx + 1e-9));
    for (int j = 0; j <= m; ++j) pts.push_back(lo + j * dx);
    pts.push_back(hi);
    for (const auto& c : cells) {
        if (c.a > lo && c.a < hi) pts.push_back(c.a);
        if (c.b > lo && c.b < hi) pts.push_back(c.b);
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double p : pts)
        if (out.empty() || p - out.back() > 1e-12) out.push_back(p);
    return out;
}

double opnorm(const Mat& m)
{
    if (m.size() == 0) return 0.0;
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

PotentialDiagnostics validate_potential(const PotentialSpec& spec, bool half_line)
{
    PotentialDiagnostics d;
    double prev_b = -std::numeric_limits<double>::infinity();
    for (const auto& c : spec.cells) {
        if (c.v.rows() != spec.n || c.v.cols() != spec.n)
            throw Error(ErrorCode::ConfigError, "cell matrix has the wrong size");
        if (!(c.b > c.a) || c.a < prev_b - 1e-14 || (half_line && c.a < 0.0)) {
            std::ostringstream os;
            os << "cell [" << c.a << ", " << c.b << ") is empty, overlapping or off the half line";
            throw Error(ErrorCode::EmptySupport, os.str());
        }
        prev_b = c.b;
        double defect = (c.v - c.v.adjoint()).cwiseAbs().maxCoeff();
        if (defect > d.hermiticity_defect) d.hermiticity_defect = defect;
        if (defect > 1e-10) {
            std::ostringstream os;
            os << "at x = " << c.a << " defect " << defect;
            throw Error(ErrorCode::NonHermitian, os.str());
        }
    }
    d.l1 = l1gamma_norm(spec, 0.0);
    d.l1_1 = l1gamma_norm(spec, 1.0);
    return d;
}

double sigma_at(const PotentialSpec& spec, double x)
{
    double s = 0.0;
    for (const auto& c : spec.cells) {
        double a = std::max(c.a, x);
        if (c.b > a) s += opnorm(c.v) * (c.b - a);
    }
    return s;
}

double sigma1_at(const PotentialSpec& spec, double x)
{
    double s = 0.0;
    for (const auto& c : spec.cells) {
        double a = std::max(c.a, x);
        if (c.b > a) s += opnorm(c.v) * 0.5 * (c.b * c.b - a * a);
    }
    return s;
}

Moments moments(const PotentialSpec& spec, const std::vector<double>& xs)
{
    Moments m;
    m.x = xs;
    m.sigma.reserve(xs.size());
    m.sigma1.reserve(xs.size());
    for (double x : xs) {
        m.sigma.push_back(sigma_at(spec, x));
        m.sigma1.push_back(sigma1_at(spec, x));
    }
    return m;
}

namespace {

// int_a^b (1 + |x|)^gamma dx
double weight_integral(double a, double b, double gamma)
{
    auto prim = [gamma](double u) { return std::pow(1.0 + u, gamma + 1.0) / (gamma + 1.0); };
    if (a >= 0.0) return prim(b) - prim(a);
    if (b <= 0.0) return prim(-a) - prim(-b);
    return prim(-a) - prim(0.0) + prim(b) - prim(0.0);
}

}  // namespace

double l1gamma_norm(const PotentialSpec& spec, double gamma)
{
    double s = 0.0;
    for (const auto& c : spec.cells) s += opnorm(c.v) * weight_integral(c.a, c.b, gamma);
    return s;
}

Mat tail_integral(const PotentialSpec& spec, double x)
{
    Mat q = Mat::Zero(spec.n, spec.n);
    for (const auto& c : spec.cells) {
        double a = std::max(c.a, x);
        if (c.b > a) q += c.v * (c.b - a);
    }
    return q;
}

Mat tail_product_integral(const PotentialSpec& spec, double x)
{
    Mat acc = Mat::Zero(spec.n, spec.n);
    for (const auto& c : spec.cells) {
        double a = std::max(c.a, x);
        if (c.b <= a) continue;
        double len = c.b - a;
        Mat qb = tail_integral(spec, c.b);
        acc += c.v * c.v * (0.5 * len * len) + c.v * qb * len;
    }
    return acc;
}

FoldedPotential fold_line_potential(const PotentialSpec& line)
{
    FoldedPotential f;
    int n = line.n;
    f.plus.n = f.minus.n = n;
    f.block.n = 2 * n;
    for (const auto& c : line.cells) {
        if (c.b > 0.0) f.plus.cells.push_back({std::max(c.a, 0.0), c.b, c.v});
        if (c.a < 0.0) f.minus.cells.push_back({std::max(-c.b, 0.0), -c.a, c.v});
    }
    std::reverse(f.minus.cells.begin(), f.minus.cells.end());

    std::vector<double> edges{0.0};
    for (const auto* p : {&f.plus, &f.minus})
        for (const auto& c : p->cells) {
            edges.push_back(c.a);
            edges.push_back(c.b);
        }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end(), [](double u, double v) { return std::abs(u - v) < 1e-14; }),
                edges.end());
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        double mid = 0.5 * (edges[i] + edges[i + 1]);
        Mat vp = f.plus.value(mid), vm = f.minus.value(mid);
        if (vp.isZero(0.0) && vm.isZero(0.0)) continue;
        Mat blk = Mat::Zero(2 * n, 2 * n);
        blk.topLeftCorner(n, n) = vp;
        blk.bottomRightCorner(n, n) = vm;
        f.block.cells.push_back({edges[i], edges[i + 1], blk});
    }
    return f;
}

PotentialSpec unfold_line_potential(const PotentialSpec& plus, const PotentialSpec& minus)
{
    PotentialSpec line;
    line.n = plus.n;
    for (auto it = minus.cells.rbegin(); it != minus.cells.rend(); ++it) line.cells.push_back({-it->b, -it->a, it->v});
    for (const auto& c : plus.cells) line.cells.push_back(c);
    return line;
}

PotentialSpec zero_potential(int n)
{
    PotentialSpec p;
    p.n = n;
    return p;
}

PotentialSpec step_potential(double value, double a, double b)
{
    return matrix_step(Mat::Constant(1, 1, value), a, b);
}

PotentialSpec matrix_step(const Mat& value, double a, double b)
{
    PotentialSpec p;
    p.n = int(value.rows());
    p.cells.push_back({a, b, value});
    return p;
}

PotentialSpec sampled_potential(int n, const std::function<Mat(double)>& f, double a, double b, double dx)
{
    PotentialSpec p;
    p.n = n;
    int m = std::max(1, int(std::ceil((b - a) / dx - 1e-9)));
    for (int j = 0; j < m; ++j) {
        double lo = a + j * dx, hi = std::min(b, lo + dx);
        p.cells.push_back({lo, hi, f(0.5 * (lo + hi))});
    }
    return p;
}

PotentialSpec exponential_potential(double amplitude, double rate, double xmax, double dx)
{
    return sampled_potential(
        1, [=](double x) { return Mat::Constant(1, 1, amplitude * std::exp(-rate * x)); }, 0.0, xmax, dx);
}

}  // namespace scatter
