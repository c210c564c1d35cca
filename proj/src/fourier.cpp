#include "scatter/fourier.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <vector>

namespace scatter {

namespace {

Mat phase_sum_direct(const Mat& a, double u0, double du, double v0, double dv, int nv, int sign)
{
    const Eigen::Index nu = a.cols();
    const int block = 256;
    const Eigen::Index ublock = 2048;
    Mat out = Mat::Zero(a.rows(), nv);
    Mat e(std::min(ublock, nu), std::min(block, nv));
    for (int l0 = 0; l0 < nv; l0 += block) {
        int nb = std::min(block, nv - l0);
        for (Eigen::Index i0 = 0; i0 < nu; i0 += ublock) {
            Eigen::Index ni = std::min(ublock, nu - i0);
            for (int c = 0; c < nb; ++c) {
                double v = v0 + (l0 + c) * dv;
                cplx step = std::polar(1.0, sign * du * v);
                cplx cur;
                for (Eigen::Index i = 0; i < ni; ++i) {
                    if (i % 64 == 0)
                        cur = std::polar(1.0, sign * (u0 + (i0 + i) * du) * v);  // resync against drift
                    else
                        cur *= step;
                    e(i, c) = cur;
                }
            }
            out.middleCols(l0, nb).noalias() += a.middleCols(i0, ni) * e.topLeftCorner(ni, nb);
        }
    }
    return out;
}

// e^{i theta q^2 / 2}; the phase runs to ~1e5 rad, so it is formed in extended precision
cplx chirp(double theta, long long q)
{
    long double ph = std::fmod(0.5L * theta * (long double)(q * q), 2.0L * 3.14159265358979323846264338327950288L);
    return {double(std::cos(ph)), double(std::sin(ph))};
}

// Bluestein: i l = (i^2 + l^2 - (l - i)^2) / 2 turns the sum into one linear convolution per row.
Mat phase_sum_chirp(const Mat& a, double u0, double du, double v0, double dv, int nv, int sign)
{
    const Eigen::Index nu = a.cols();
    const double theta = sign * du * dv;
    Eigen::Index N = 1;
    while (N < nu + nv - 1) N *= 2;

    std::vector<cplx> h(N, 0.0), hf;
    for (Eigen::Index d = -(nu - 1); d < nv; ++d) h[(d + N) % N] = std::conj(chirp(theta, d));
    Eigen::FFT<double> fft;
    fft.fwd(hf, h);

    std::vector<cplx> pre(nu), post(nv);
    for (Eigen::Index i = 0; i < nu; ++i) pre[i] = std::polar(1.0, sign * du * v0 * double(i)) * chirp(theta, i);
    for (int l = 0; l < nv; ++l) post[l] = std::polar(1.0, sign * u0 * (v0 + l * dv)) * chirp(theta, l);

    Mat out(a.rows(), nv);
    std::vector<cplx> b(N), bf(N), c;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        std::fill(b.begin(), b.end(), cplx(0.0));
        for (Eigen::Index i = 0; i < nu; ++i) b[i] = a(r, i) * pre[i];
        fft.fwd(bf, b);
        for (Eigen::Index q = 0; q < N; ++q) bf[q] *= hf[q];
        fft.inv(c, bf);
        for (int l = 0; l < nv; ++l) out(r, l) = post[l] * c[l];
    }
    return out;
}

}  // namespace

Mat phase_sum(const Mat& a, double u0, double du, double v0, double dv, int nv, int sign, double scale)
{
    const Eigen::Index nu = a.cols();
    if (nu == 0 || nv == 0) return Mat::Zero(a.rows(), nv);
    double direct = double(nu) * nv * (a.rows() + 2.0);
    double n = double(nu + nv);
    double chirped = (a.rows() + 1.0) * 2.0 * n * std::log2(n) * 6.0;
    Mat out = chirped < direct ? phase_sum_chirp(a, u0, du, v0, dv, nv, sign) : phase_sum_direct(a, u0, du, v0, dv, nv, sign);
    if (scale != 1.0) out *= scale;
    return out;
}

cplx phi_moment(int m, cplx z, double h)
{
    cplx zh = z * h;
    if (std::abs(zh) < 0.5) {
        cplx sum = 0.0, term = 1.0;  // z^p h^p / p!
        for (int p = 0; p < 40; ++p) {
            if (p > 0) term *= zh / double(p);
            sum += term / double(m + p + 1);
            if (std::abs(term) < 1e-18) break;
        }
        return sum * std::pow(h, m + 1);
    }
    cplx e = std::exp(zh);
    cplx p0 = (e - 1.0) / z;
    if (m == 0) return p0;
    return (h * e - p0) / z;
}

cplx psi_moment(int m, cplx z, double h)
{
    cplx zh = z * h;
    if (std::abs(zh) < 0.5) {
        cplx sum = 0.0, term = 1.0;  // z^(p-1) h^(p-1) / p!
        for (int p = 1; p < 40; ++p) {
            if (p > 1) term *= zh;
            term /= double(p);
            sum += term / double(m + p + 1);
            if (std::abs(term) < 1e-18) break;
        }
        return sum * std::pow(h, m + 2);
    }
    return (phi_moment(m, z, h) - std::pow(h, m + 1) / double(m + 1)) / z;
}

Eigen::VectorXcd linear_convolution(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b)
{
    const Eigen::Index len = a.size() + b.size() - 1;
    Eigen::Index nfft = 1;
    while (nfft < len) nfft <<= 1;
    std::vector<cplx> pa(nfft, 0.0), pb(nfft, 0.0), fa, fb, out;
    std::copy(a.data(), a.data() + a.size(), pa.begin());
    std::copy(b.data(), b.data() + b.size(), pb.begin());
    Eigen::FFT<double> fft;
    fft.fwd(fa, pa);
    fft.fwd(fb, pb);
    for (Eigen::Index i = 0; i < nfft; ++i) fa[i] *= fb[i];
    fft.inv(out, fa);
    Eigen::VectorXcd c(len);
    for (Eigen::Index i = 0; i < len; ++i) c[i] = out[i];
    return c;
}

}  // namespace scatter
