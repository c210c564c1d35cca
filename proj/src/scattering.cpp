#include "scatter/scattering.hpp"

#include "scatter/fourier.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scatter {

double min_singular(const Mat& m)
{
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(m.rows() - 1);
}

ScatteringTable smatrix(const JostMatrixTable& J, const SmatrixOptions& opt)
{
    ScatteringTable st;
    st.kgrid = J.kgrid;
    st.n = J.J.n;
    const KGrid& kg = J.kgrid;
    st.S = MatSeries(st.n, kg.nk);
    double scale = 0.0;
    for (int i = 0; i < kg.nk; ++i) scale = std::max(scale, J.J[i].cwiseAbs().maxCoeff());
    for (int i = 0; i < kg.nk; ++i) {
        Mat j = J.J[i];
        if (std::abs(kg[i]) >= opt.exclude && min_singular(j) < 1e-13 * std::max(1.0, scale)) {
            std::ostringstream os;
            os << "J(k) singular at k = " << kg[i];
            throw Error(ErrorCode::SingularJost, os.str());
        }
        Eigen::PartialPivLU<Mat> lu(j.transpose());
        Mat jm = J.J[kg.mirror(i)];
        st.S[i] = -lu.solve(jm.transpose()).transpose();
    }
    st.j0_min_singular = min_singular(J.J0);
    st.exceptional = st.j0_min_singular < 1e-6;
    s_limits(st, opt.check_plateau);
    return st;
}

void s_limits(ScatteringTable& st, bool check_plateau)
{
    const KGrid& kg = st.kgrid;
    const int n = st.n;
    const int c = kg.first_positive();

    // Lagrange weights at 0 for the nodes c-3..c+2
    std::vector<int> idx;
    for (int d = -3; d < 3; ++d) idx.push_back(c + d);
    st.S0 = Mat::Zero(n, n);
    for (int a : idx) {
        double w = 1.0;
        for (int b : idx)
            if (b != a) w *= (0.0 - kg[b]) / (kg[a] - kg[b]);
        st.S0 += w * st.S[a];
    }

    int outer = std::max(1, int(std::lround(0.1 * kg.nk / 2)));
    st.Sinf = Mat::Zero(n, n);
    for (int i = 0; i < outer; ++i) st.Sinf += 0.5 * (st.S[i] + st.S[kg.mirror(i)]);
    st.Sinf /= double(outer);
    st.plateau_deviation = 0.0;
    for (int i = 0; i < outer; ++i) {
        Mat sym = 0.5 * (st.S[i] + st.S[kg.mirror(i)]);
        st.plateau_deviation = std::max(st.plateau_deviation, opnorm(sym - st.Sinf));
    }
    if (check_plateau && st.plateau_deviation > 1e-2) {
        std::ostringstream os;
        os << "outer samples deviate by " << st.plateau_deviation << " from their mean";
        throw Error(ErrorCode::NoPlateau, os.str());
    }
}

namespace {

Mat flatten(const MatSeries& s)
{
    const int n = s.n;
    Mat out(n * n, s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) out(r * n + c, i) = s[i](r, c);
    return out;
}

MatSeries unflatten(const Mat& f, int n)
{
    MatSeries s(n, f.cols());
    for (Eigen::Index i = 0; i < f.cols(); ++i)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) s[i](r, c) = f(r * n + c, i);
    return s;
}

void mass_stats(SymbolSamples& out)
{
    const LineGrid& g = out.grid;
    RVec w = trapezoid_weights(g.size(), g.dx);
    double total = 0.0, far = 0.0;
    for (int j = 0; j < g.size(); ++j) {
        double a = w[j] * opnorm(out.values[j]);
        total += a;
        if (std::abs(g[j]) > 0.5 * g.xmax()) far += a;
    }
    out.l1 = total;
    out.outer_mass = total > 0 ? far / total : 0.0;
}

}  // namespace

SymbolSamples fs_symbol(const ScatteringTable& st, const LineGrid& ygrid, std::optional<Mat> s_ref)
{
    const KGrid& kg = st.kgrid;
    Mat ref = s_ref ? *s_ref : st.Sinf;
    MatSeries d(st.n, kg.nk);
    for (int i = 0; i < kg.nk; ++i) d[i] = edge_taper(kg[i], kg.kmax) * (st.S[i] - ref);
    SymbolSamples out;
    out.grid = ygrid;
    Mat ft = phase_sum(flatten(d), kg[0], kg.dk, ygrid[0], ygrid.dx, ygrid.size(), +1, kg.dk / (2.0 * pi));
    out.values = unflatten(ft, st.n);
    mass_stats(out);
    return out;
}

SymbolSamples half_line_symbol_transform(const MatSeries& sym, double dk, double kmax, const LineGrid& xgrid, int sign)
{
    MatSeries d(sym.n, sym.size());
    for (Eigen::Index i = 0; i < sym.size(); ++i) d[i] = edge_taper((i + 0.5) * dk, kmax) * sym[i];
    SymbolSamples out;
    out.grid = xgrid;
    Mat ft = phase_sum(flatten(d), 0.5 * dk, dk, xgrid[0], xgrid.dx, xgrid.size(), sign, dk / (2.0 * pi));
    out.values = unflatten(ft, sym.n);
    mass_stats(out);
    return out;
}

PSymbols p_symbols(const ScatteringTable& st, const LineGrid& xgrid, std::optional<Mat> s_ref)
{
    const KGrid& kg = st.kgrid;
    Mat ref = s_ref ? *s_ref : st.Sinf;
    const int half = kg.nk / 2, c = kg.first_positive();
    MatSeries plus(st.n, half), minus(st.n, half);
    for (int i = 0; i < half; ++i) {
        minus[i] = st.S[c + i] - ref;
        plus[i] = st.S[kg.mirror(c + i)] - ref;
    }
    PSymbols p;
    p.plus = half_line_symbol_transform(plus, kg.dk, kg.kmax, xgrid, -1);
    p.minus = half_line_symbol_transform(minus, kg.dk, kg.kmax, xgrid, +1);
    return p;
}

Mat fs_reconstruct(const SymbolSamples& fs, double k)
{
    const LineGrid& g = fs.grid;
    RVec w = trapezoid_weights(g.size(), g.dx);
    Mat acc = Mat::Zero(fs.values.n, fs.values.n);
    for (int j = 0; j < g.size(); ++j) acc += (w[j] * std::polar(1.0, -k * g[j])) * fs.values[j];
    return acc;
}

MatSeries sdot(const ScatteringTable& st)
{
    const KGrid& kg = st.kgrid;
    MatSeries d(st.n, kg.nk);
    for (int i = 0; i < kg.nk; ++i) {
        if (i == 0)
            d[i] = (st.S[1] - st.S[0]) / kg.dk;
        else if (i == kg.nk - 1)
            d[i] = (st.S[i] - st.S[i - 1]) / kg.dk;
        else
            d[i] = (st.S[i + 1] - st.S[i - 1]) / (2.0 * kg.dk);
    }
    return d;
}

AsymptoticsReport sdot_asymptotics(const ScatteringTable& st)
{
    const KGrid& kg = st.kgrid;
    AsymptoticsReport r;
    r.exceptional = st.exceptional;
    MatSeries d = sdot(st);
    std::vector<double> norm(kg.nk);
    double biggest = 0.0;
    for (int i = 0; i < kg.nk; ++i) {
        norm[i] = opnorm(d[i]);
        biggest = std::max(biggest, norm[i]);
    }
    r.h1 = h1_membership(st);
    if (biggest < 1e-12) {
        r.trivial = true;
        r.slope = std::nan("");
        return r;
    }

    r.fit_lo = kg.kmax / 5.0;
    r.fit_hi = kg.kmax / 1.2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = kg.first_positive(); i < kg.nk; ++i) {
        double k = kg[i];
        if (k < r.fit_lo || k > r.fit_hi || norm[i] <= 0) continue;
        double lx = std::log(k), ly = std::log(norm[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    r.slope = cnt > 1 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : std::nan("");

    for (int i = 0; i < kg.nk; ++i)
        if (std::abs(kg[i]) < 0.5) r.low_max = std::max(r.low_max, norm[i]);
    // linear interpolation to k = 1
    double pos = (1.0 + kg.kmax) / kg.dk - 0.5;
    int i0 = std::clamp(int(std::floor(pos)), 0, kg.nk - 2);
    double t = pos - i0;
    r.at_one = opnorm((1.0 - t) * d[i0] + t * d[i0 + 1]);
    return r;
}

double h1_membership(const ScatteringTable& st)
{
    const KGrid& kg = st.kgrid;
    MatSeries d = sdot(st);
    double acc = 0.0;
    for (int i = 0; i < kg.nk; ++i) acc += kg.dk * ((st.S[i] - st.Sinf).squaredNorm() + d[i].squaredNorm());
    return acc;
}

}  // namespace scatter
