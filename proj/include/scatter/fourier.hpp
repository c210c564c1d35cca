#pragma once

#include "scatter/core.hpp"

namespace scatter {

// out(r, l) = scale * sum_i a(r, i) exp(sign * i * u_i * v_l), with u_i = u0 + i du (i < a.cols())
// and v_l = v0 + l dv (l < nv). Blocked matrix products with recurrence-built phase tables, or a
// chirp-z convolution through the FFT when that is cheaper.
Mat phase_sum(const Mat& a, double u0, double du, double v0, double dv, int nv, int sign, double scale = 1.0);

// int_0^h s^m e^{zs} ds and int_0^h s^m (e^{zs} - 1)/z ds for m = 0, 1, stable for small |zh|.
cplx phi_moment(int m, cplx z, double h);
cplx psi_moment(int m, cplx z, double h);

// Full linear convolution of complex sequences via zero-padded FFT.
Eigen::VectorXcd linear_convolution(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

}  // namespace scatter
