#include "scatter/field.hpp"

#include <cmath>
#include <limits>

namespace scatter {

const char* to_string(Domain d) { return d == Domain::HalfLine ? "half line" : "line"; }

Field Field::half(double dx, int m, int n)
{
    Field f;
    f.domain = Domain::HalfLine;
    f.dx = dx;
    f.m = m;
    f.v = Mat::Zero(m + 1, n);
    return f;
}

Field Field::line(double dx, int m, int n)
{
    Field f;
    f.domain = Domain::Line;
    f.dx = dx;
    f.m = m;
    f.v = Mat::Zero(2 * m + 1, n);
    return f;
}

Field Field::sample(Domain d, double dx, int m, int n, const std::function<Vec(double)>& fn)
{
    Field f = d == Domain::HalfLine ? half(dx, m, n) : line(dx, m, n);
    for (int r = 0; r < f.nodes(); ++r) f.v.row(r) = fn(f.x(r)).transpose();
    return f;
}

RVec Field::weights() const { return trapezoid_weights(nodes(), dx); }

void require_same_grid(const Field& a, const Field& b)
{
    if (a.domain != b.domain || a.m != b.m || std::abs(a.dx - b.dx) > 1e-14 * a.dx || a.n() != b.n())
        throw Error(ErrorCode::GridMismatch, "fields live on different grids");
}

double lp_norm(const Field& f, double p)
{
    RVec w = f.weights();
    if (std::isinf(p)) {
        double mx = 0.0;
        for (int r = 0; r < f.nodes(); ++r) mx = std::max(mx, f.v.row(r).norm());
        return mx;
    }
    double acc = 0.0;
    for (int r = 0; r < f.nodes(); ++r) acc += w[r] * std::pow(f.v.row(r).norm(), p);
    return std::pow(acc, 1.0 / p);
}

double l2_norm(const Field& f) { return lp_norm(f, 2.0); }

cplx inner(const Field& a, const Field& b)
{
    require_same_grid(a, b);
    RVec w = a.weights();
    cplx acc = 0.0;
    for (int r = 0; r < a.nodes(); ++r) acc += w[r] * a.v.row(r).dot(b.v.row(r));
    return acc;
}

Field operator+(const Field& a, const Field& b)
{
    require_same_grid(a, b);
    Field c = a;
    c.v += b.v;
    return c;
}

Field operator-(const Field& a, const Field& b)
{
    require_same_grid(a, b);
    Field c = a;
    c.v -= b.v;
    return c;
}

Field operator*(cplx s, const Field& a)
{
    Field c = a;
    c.v *= s;
    return c;
}

Field resize(const Field& f, int m)
{
    if (f.domain != Domain::HalfLine) throw Error(ErrorCode::GridMismatch, "resize expects a half-line field");
    Field g = Field::half(f.dx, m, f.n());
    int rows = std::min(f.nodes(), g.nodes());
    g.v.topRows(rows) = f.v.topRows(rows);
    return g;
}

double l2_norm(const KField& z) { return std::sqrt(z.dk * z.v.squaredNorm()); }

cplx inner(const KField& a, const KField& b)
{
    cplx acc = 0.0;
    for (int q = 0; q < a.count(); ++q) acc += a.dk * a.v.row(q).dot(b.v.row(q));
    return acc;
}

}  // namespace scatter
