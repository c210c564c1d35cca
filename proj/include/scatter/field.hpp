#pragma once

#include "scatter/core.hpp"

#include <functional>

namespace scatter {

enum class Domain { HalfLine, Line };

const char* to_string(Domain d);

// C^n valued samples. HalfLine: x_r = r dx, r = 0..m. Line: x_r = (r - m) dx, r = 0..2m.
struct Field {
    Domain domain = Domain::HalfLine;
    double dx = 1.0 / 256;
    int m = 0;
    Mat v;  // nodes x n

    static Field half(double dx, int m, int n);
    static Field line(double dx, int m, int n);
    static Field sample(Domain d, double dx, int m, int n, const std::function<Vec(double)>& f);

    int nodes() const { return domain == Domain::HalfLine ? m + 1 : 2 * m + 1; }
    int n() const { return int(v.cols()); }
    double x(int r) const { return domain == Domain::HalfLine ? r * dx : (r - m) * dx; }
    double xmax() const { return m * dx; }
    RVec weights() const;  // trapezoid
};

void require_same_grid(const Field& a, const Field& b);

double lp_norm(const Field& f, double p);  // trapezoid; p = inf allowed
double l2_norm(const Field& f);
cplx inner(const Field& a, const Field& b);  // sum w a^dag b
Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cplx s, const Field& a);

// Copy onto a half-line grid with the same dx and m' nodes, zero-padding or truncating.
Field resize(const Field& f, int m);

// Positive half of a symmetric k grid: k_q = (q + 1/2) dk, each carrying weight dk.
struct KField {
    double dk = 0.0;
    Mat v;  // count x n

    int count() const { return int(v.rows()); }
    double k(int q) const { return (q + 0.5) * dk; }
};

double l2_norm(const KField& z);
cplx inner(const KField& a, const KField& b);

}  // namespace scatter
