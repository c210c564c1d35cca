#include "scatter/spectral.hpp"

#include "scatter/fourier.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>

namespace scatter {

using SpMat = Eigen::SparseMatrix<cplx>;

HalfLineModel build_model(const PotentialSpec& V, const BoundaryPair& bp, const GridParams& g,
                          const SmatrixOptions& opt)
{
    if (V.n != bp.n()) throw Error(ErrorCode::GridMismatch, "potential and boundary sizes differ");
    HalfLineModel m;
    m.V = V;
    m.bp = bp;
    m.jost = solve_faddeev(V, KGrid(g.kmax, g.nk), g.dx);
    m.J = jost_matrix(m.jost, bp);
    m.S = smatrix(m.J, opt);
    return m;
}

Mat PhysicalSolutionTable::at(int i, int j) const
{
    if (j < nx) return psi[Eigen::Index(i) * nx + j];
    double kx = kgrid[i] * x(j);
    return std::polar(1.0, -kx) * Mat::Identity(n, n) + std::polar(1.0, kx) * S[i];
}

PhysicalSolutionTable physical_solution(const JostTable& jt, const ScatteringTable& st)
{
    PhysicalSolutionTable P;
    P.kgrid = jt.kgrid;
    P.n = jt.n;
    P.dx = jt.dx;
    P.nx = jt.nx;
    P.S = st.S;
    const int nk = jt.kgrid.nk;
    P.psi = MatSeries(P.n, Eigen::Index(nk) * P.nx);
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int i = 0; i < nk; ++i)
        for (int j = 0; j < P.nx; ++j)
            P.psi[Eigen::Index(i) * P.nx + j] = jt.f(jt.kgrid.mirror(i), j) + jt.f(i, j) * st.S[i];
    return P;
}

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * pi);

// [v; conj(v)] as columns, so one phase table serves both e^{+} and e^{-} sums
Mat with_conjugate(const Mat& rows_by_n)
{
    const Eigen::Index n = rows_by_n.cols();
    Mat a(2 * n, rows_by_n.rows());
    a.topRows(n) = rows_by_n.transpose();
    a.bottomRows(n) = rows_by_n.transpose().conjugate();
    return a;
}

void check_half(const Field& Y)
{
    if (Y.domain != Domain::HalfLine) throw Error(ErrorCode::GridMismatch, "expected a half-line field");
}

void check_table_grid(const PhysicalSolutionTable& P, double dx, int n)
{
    if (n != P.n) throw Error(ErrorCode::GridMismatch, "channel count differs from the table");
    if (P.nx > 1 && std::abs(dx - P.dx) > 1e-12 * P.dx)
        throw Error(ErrorCode::GridMismatch, "field spacing differs from the Jost table spacing");
}

}  // namespace

KField f0_transform(const Field& Y, double dk, int count)
{
    check_half(Y);
    const int n = Y.n();
    RVec w = Y.weights();
    Mat wy = w.asDiagonal() * Y.v;
    Mat ps = phase_sum(with_conjugate(wy), 0.0, Y.dx, 0.5 * dk, dk, count, +1);
    KField out;
    out.dk = dk;
    out.v = (0.5 * std::sqrt(2.0 / pi)) * (ps.topRows(n) + ps.bottomRows(n).conjugate()).transpose();
    return out;
}

Field f0_adjoint(const KField& Z, double dx, int m)
{
    const int n = int(Z.v.cols());
    Mat ps = phase_sum(with_conjugate(Z.dk * Z.v), 0.5 * Z.dk, Z.dk, 0.0, dx, m + 1, +1);
    Field out = Field::half(dx, m, n);
    out.v = (0.5 * std::sqrt(2.0 / pi)) * (ps.topRows(n) + ps.bottomRows(n).conjugate()).transpose();
    return out;
}

KField sine_transform(const Field& Y, double dk, int count)
{
    check_half(Y);
    const int n = Y.n();
    RVec w = Y.weights();
    Mat wy = w.asDiagonal() * Y.v;
    Mat ps = phase_sum(with_conjugate(wy), 0.0, Y.dx, 0.5 * dk, dk, count, +1);
    KField out;
    out.dk = dk;
    out.v = (std::sqrt(2.0 / pi) / (2.0 * iu)) * (ps.topRows(n) - ps.bottomRows(n).conjugate()).transpose();
    return out;
}

Field sine_adjoint(const KField& Z, double dx, int m)
{
    const int n = int(Z.v.cols());
    Mat ps = phase_sum(with_conjugate(Z.dk * Z.v), 0.5 * Z.dk, Z.dk, 0.0, dx, m + 1, +1);
    Field out = Field::half(dx, m, n);
    out.v = (std::sqrt(2.0 / pi) / (2.0 * iu)) * (ps.topRows(n) - ps.bottomRows(n).conjugate()).transpose();
    return out;
}

KField fourier_maps(const PhysicalSolutionTable& P, const Field& Y, int sign)
{
    check_half(Y);
    check_table_grid(P, Y.dx, Y.n());
    const KGrid& kg = P.kgrid;
    const int n = P.n, half = kg.nk / 2, c = kg.first_positive();
    auto kappa = [&](int q) { return sign > 0 ? kg.mirror(c + q) : c + q; };

    KField out;
    out.dk = kg.dk;
    out.v = Mat::Zero(half, n);
    RVec w = Y.weights();
    const int inner = std::min(P.nx, Y.nodes());

#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int q = 0; q < half; ++q) {
        Vec acc = Vec::Zero(n);
        const Eigen::Index base = Eigen::Index(kappa(q)) * P.nx;
        for (int j = 0; j < inner; ++j) acc.noalias() += w[j] * (P.psi[base + j].adjoint() * Y.v.row(j).transpose());
        out.v.row(q) = acc.transpose();
    }

    const int nout = Y.nodes() - inner;
    if (nout > 0) {
        Mat wy = w.tail(nout).asDiagonal() * Y.v.bottomRows(nout);
        // top: sum w e^{-iskx} Y, bottom conjugated: sum w e^{iskx} Y
        Mat ps = phase_sum(with_conjugate(wy), Y.x(inner), Y.dx, 0.5 * kg.dk, kg.dk, half, -sign);
        for (int q = 0; q < half; ++q) {
            Vec a1 = ps.col(q).head(n);
            Vec a2 = ps.col(q).tail(n).conjugate();
            out.v.row(q) += (a1 + P.S[kappa(q)].adjoint() * a2).transpose();
        }
    }
    out.v *= inv_sqrt_2pi;
    return out;
}

Field fourier_maps_adjoint(const PhysicalSolutionTable& P, const KField& Z, int sign, double dx, int m)
{
    check_table_grid(P, dx, int(Z.v.cols()));
    const KGrid& kg = P.kgrid;
    const int n = P.n, half = kg.nk / 2, c = kg.first_positive();
    if (Z.count() != half || std::abs(Z.dk - kg.dk) > 1e-12 * kg.dk)
        throw Error(ErrorCode::GridMismatch, "spectral function does not match the table's k grid");
    auto kappa = [&](int q) { return sign > 0 ? kg.mirror(c + q) : c + q; };

    Field out = Field::half(dx, m, n);
    const int inner = std::min(P.nx, out.nodes());
#pragma omp parallel for schedule(static) num_threads(thread_count())
    for (int j = 0; j < inner; ++j) {
        Vec acc = Vec::Zero(n);
        for (int q = 0; q < half; ++q)
            acc.noalias() += P.psi[Eigen::Index(kappa(q)) * P.nx + j] * Z.v.row(q).transpose();
        out.v.row(j) = (Z.dk * acc).transpose();
    }

    const int nout = out.nodes() - inner;
    if (nout > 0) {
        Mat a(2 * n, half);
        for (int q = 0; q < half; ++q) {
            Vec z = Z.dk * Z.v.row(q).transpose();
            a.col(q).head(n) = z;
            a.col(q).tail(n) = (P.S[kappa(q)] * z).conjugate();
        }
        Mat ps = phase_sum(a, 0.5 * kg.dk, kg.dk, out.x(inner), dx, nout, +sign);
        out.v.bottomRows(nout) = (ps.topRows(n) + ps.bottomRows(n).conjugate()).transpose();
    }
    out.v *= inv_sqrt_2pi;
    return out;
}

Field pac_projection(const PhysicalSolutionTable& P, const Field& Y, int sign)
{
    return fourier_maps_adjoint(P, fourier_maps(P, Y, sign), sign, Y.dx, Y.m);
}

Field evolve_spectral(const PhysicalSolutionTable& P, const Field& Y, double t, int sign)
{
    KField z = fourier_maps(P, Y, sign);
    for (int q = 0; q < z.count(); ++q) z.v.row(q) *= std::polar(1.0, -t * z.k(q) * z.k(q));
    return fourier_maps_adjoint(P, z, sign, Y.dx, Y.m);
}

// ---------------------------------------------------------------------------

DiscreteHamiltonian discrete_hamiltonian(const PotentialSpec& V, const BoundaryPair& bp, double dx, int nodes)
{
    validate_boundary(bp);
    if (V.n != bp.n()) throw Error(ErrorCode::GridMismatch, "potential and boundary sizes differ");
    DiagonalForm df = diagonalize(bp);
    DiscreteHamiltonian dh;
    dh.n = bp.n();
    dh.dx = dx;
    dh.nodes = nodes;
    dh.M = df.M;
    dh.thetas = df.thetas;
    const int n = dh.n;

    std::vector<bool> dir(n);
    std::vector<double> cot(n, 0.0);
    for (int c = 0; c < n; ++c) {
        double s = std::sin(df.thetas[c]);
        dir[c] = std::abs(s) < 1e-12;
        if (!dir[c]) cot[c] = std::cos(df.thetas[c]) / s;
    }
    dh.index.assign(size_t(nodes) * n, -1);
    int count = 0;
    for (int j = 0; j < nodes; ++j)
        for (int c = 0; c < n; ++c)
            if (!(j == 0 && dir[c])) dh.index[size_t(j) * n + c] = count++;
    dh.w.resize(count);

    std::vector<Eigen::Triplet<cplx>> trip;
    const double inv2 = 1.0 / (dx * dx);
    for (int j = 0; j < nodes; ++j) {
        double x = j * dx;
        double lo = std::max(0.0, x - 0.5 * dx), hi = x + 0.5 * dx;
        Mat vr = dh.M.adjoint() * ((tail_integral(V, lo) - tail_integral(V, hi)) / (hi - lo)) * dh.M;
        double wj = (j == 0 ? 0.5 : 1.0) * dx;
        for (int c = 0; c < n; ++c) {
            int id = dh.index[size_t(j) * n + c];
            if (id < 0) continue;
            dh.w[id] = wj;
            double kin = j == 0 ? (2.0 - 2.0 * dx * cot[c]) * inv2 : 2.0 * inv2;
            trip.emplace_back(id, id, wj * (kin + vr(c, c).real()));
            if (j + 1 < nodes) {
                int id2 = dh.index[size_t(j + 1) * n + c];
                trip.emplace_back(id, id2, -1.0 / dx);
                trip.emplace_back(id2, id, -1.0 / dx);
            }
            for (int d = 0; d < n; ++d) {
                if (d == c) continue;
                int idd = dh.index[size_t(j) * n + d];
                if (idd >= 0) trip.emplace_back(id, idd, wj * vr(c, d));
            }
        }
    }
    dh.S.resize(count, count);
    dh.S.setFromTriplets(trip.begin(), trip.end());
    dh.S.makeCompressed();
    SpMat adj = dh.S.adjoint();
    dh.hermiticity_defect = (dh.S - adj).norm();
    return dh;
}

Vec DiscreteHamiltonian::to_frame(const Field& Y) const
{
    if (Y.domain != Domain::HalfLine || std::abs(Y.dx - dx) > 1e-12 * dx || Y.n() != n)
        throw Error(ErrorCode::GridMismatch, "field does not match the discrete Hamiltonian grid");
    Vec z = Vec::Zero(size());
    int rows = std::min(nodes, Y.nodes());
    for (int j = 0; j < rows; ++j) {
        Vec r = M.adjoint() * Y.v.row(j).transpose();
        for (int c = 0; c < n; ++c) {
            int id = index[size_t(j) * n + c];
            if (id >= 0) z[id] = r[c];
        }
    }
    return z;
}

Field DiscreteHamiltonian::from_frame(const Vec& z) const
{
    Field Y = Field::half(dx, nodes, n);
    for (int j = 0; j < nodes; ++j) {
        Vec r = Vec::Zero(n);
        for (int c = 0; c < n; ++c) {
            int id = index[size_t(j) * n + c];
            if (id >= 0) r[c] = z[id];
        }
        Y.v.row(j) = (M * r).transpose();
    }
    return Y;
}

int eigen_count_below(const DiscreteHamiltonian& dh, double sigma)
{
    SpMat a = dh.S;
    for (int i = 0; i < dh.size(); ++i) a.coeffRef(i, i) -= sigma * dh.w[i];
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt(a);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "LDL^T factorization failed");
    auto d = ldlt.vectorD();
    int neg = 0;
    for (Eigen::Index i = 0; i < d.size(); ++i)
        if (d[i].real() < 0) ++neg;
    return neg;
}

std::vector<double> bound_states(const DiscreteHamiltonian& dh, double below, double tol)
{
    std::vector<double> out;
    int count = eigen_count_below(dh, below);
    if (count == 0) return out;
    double lo = 0.0;
    for (int r = 0; r < dh.S.outerSize(); ++r) {
        double diag = 0.0, off = 0.0;
        for (SpMat::InnerIterator it(dh.S, r); it; ++it) {
            if (it.row() == it.col())
                diag = it.value().real();
            else
                off += std::abs(it.value());
        }
        lo = std::min(lo, (diag - off) / dh.w[r]);
    }
    lo -= 1.0;
    for (int r = 0; r < count; ++r) {
        double a = lo, b = below;
        while (b - a > tol * std::max(1.0, std::abs(a))) {
            double mid = 0.5 * (a + b);
            if (eigen_count_below(dh, mid) > r)
                b = mid;
            else
                a = mid;
        }
        out.push_back(0.5 * (a + b));
    }
    return out;
}

Field evolve_cn(const DiscreteHamiltonian& dh, const Field& Y, double t, int steps)
{
    Vec z = dh.to_frame(Y);
    if (t == 0.0 || steps <= 0) return dh.from_frame(z);
    const double dt = t / steps;
    SpMat lhs = dh.S * cplx(0.0, 0.5 * dt), rhs = dh.S * cplx(0.0, -0.5 * dt);
    for (int i = 0; i < dh.size(); ++i) {
        lhs.coeffRef(i, i) += dh.w[i];
        rhs.coeffRef(i, i) += dh.w[i];
    }
    lhs.makeCompressed();
    Eigen::SparseLU<SpMat> lu;
    lu.compute(lhs);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::NoConvergence, "Crank-Nicolson factorization failed");
    for (int s = 0; s < steps; ++s) z = lu.solve(rhs * z);
    return dh.from_frame(z);
}

// ---------------------------------------------------------------------------

namespace {

cplx packet_value(double a, double sigma, double p, double t, double x)
{
    cplx s2 = sigma * sigma + cplx(0.0, 2.0 * t);
    cplx amp = std::sqrt(sigma * sigma / s2);
    double d = x - a - 2.0 * p * t;
    return amp * std::exp(-d * d / (2.0 * s2) + iu * (p * x - p * p * t));
}

}  // namespace

Field free_gaussian_line(const GaussianPacket& g, double t, double dx, int m)
{
    Field f = Field::line(dx, m, int(g.amplitude.size()));
    for (int r = 0; r < f.nodes(); ++r)
        f.v.row(r) = packet_value(g.center, g.width, g.momentum, t, f.x(r)) * g.amplitude.transpose();
    return f;
}

Field free_gaussian_half(const GaussianPacket& g, double t, double dx, int m, bool dirichlet)
{
    Field f = Field::half(dx, m, int(g.amplitude.size()));
    const double s = dirichlet ? -1.0 : 1.0;
    for (int r = 0; r < f.nodes(); ++r) {
        double x = f.x(r);
        cplx v = packet_value(g.center, g.width, g.momentum, t, x) + s * packet_value(-g.center, g.width, -g.momentum, t, x);
        f.v.row(r) = v * g.amplitude.transpose();
    }
    return f;
}

}  // namespace scatter
