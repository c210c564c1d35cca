#include "scatter/jost.hpp"

#include "scatter/fourier.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace scatter {

int jost_node_count(const PotentialSpec& V, double dx)
{
    double xv = V.support_bound();
    return int(std::ceil(xv / dx - 1e-9)) + 1;
}

Mat JostTable::m_at(int i, int j) const
{
    if (j >= nx) return Mat::Identity(n, n);
    return m[Eigen::Index(i) * nx + j];
}

Mat JostTable::mprime_at(int i, int j) const
{
    if (j >= nx) return Mat::Zero(n, n);
    return mprime[Eigen::Index(i) * nx + j];
}

Mat JostTable::f(int i, int j) const
{
    double k = kgrid[i];
    return std::polar(1.0, k * x(j)) * m_at(i, j);
}

Mat JostTable::fprime(int i, int j) const
{
    double k = kgrid[i];
    return std::polar(1.0, k * x(j)) * (iu * k * m_at(i, j) + mprime_at(i, j));
}

namespace {

struct Interval {
    double lo, hi;
    int cell;  // -1 where V = 0
    int node;  // grid index of lo, or -1
};

std::vector<Interval> intervals(const PotentialSpec& V, double dx, int nx)
{
    double xend = (nx - 1) * dx;
    std::vector<Interval> out;
    if (nx <= 1) return out;
    std::vector<double> pts = V.breakpoints(0.0, xend, dx);
    size_t c = 0;
    for (size_t l = 0; l + 1 < pts.size(); ++l) {
        double mid = 0.5 * (pts[l] + pts[l + 1]);
        while (c < V.cells.size() && V.cells[c].b <= mid) ++c;
        int cell = (c < V.cells.size() && V.cells[c].a <= mid) ? int(c) : -1;
        double r = pts[l] / dx;
        int node = std::abs(r - std::round(r)) < 1e-9 ? int(std::lround(r)) : -1;
        out.push_back({pts[l], pts[l + 1], cell, node});
    }
    return out;
}

struct CellEigen {
    RVec lambda;
    Mat q;
};

std::vector<CellEigen> cell_eigen(const PotentialSpec& V)
{
    std::vector<CellEigen> out;
    out.reserve(V.cells.size());
    for (const auto& c : V.cells) {
        Mat h = 0.5 * (c.v + c.v.adjoint());
        if (V.n == 1) {
            out.push_back({RVec::Constant(1, h(0, 0).real()), Mat::Identity(1, 1)});
            continue;
        }
        Eigen::SelfAdjointEigenSolver<Mat> es(h);
        out.push_back({es.eigenvalues(), es.eigenvectors()});
    }
    return out;
}

// cosh(sqrt(z) h) and sinh(sqrt(z) h)/sqrt(z) for real z
void cosh_sinh(double z, double h, double& c, double& s)
{
    double w = z * h * h;
    if (std::abs(w) < 1.0) {
        double tc = 1.0, ts = 1.0, sc = 1.0, ss = 1.0;
        for (int p = 1; p < 20; ++p) {
            tc *= w / ((2.0 * p - 1.0) * (2.0 * p));
            ts *= w / ((2.0 * p) * (2.0 * p + 1.0));
            sc += tc;
            ss += ts;
        }
        c = sc;
        s = ss * h;
        return;
    }
    if (z > 0) {
        double r = std::sqrt(z);
        c = std::cosh(r * h);
        s = std::sinh(r * h) / r;
    } else {
        double r = std::sqrt(-z);
        c = std::cos(r * h);
        s = std::sin(r * h) / r;
    }
}

void transfer_solve(const PotentialSpec& V, double k, double dx, int nx, const std::vector<Interval>& ivs,
                    const std::vector<CellEigen>& eig, MatSeries& m, MatSeries& mp)
{
    const int n = V.n;
    const double xend = (nx - 1) * dx;
    cplx ph = std::polar(1.0, k * xend);
    Mat f = ph * Mat::Identity(n, n);
    Mat fp = (iu * k) * f;
    auto record = [&](int j, double x) {
        cplx e = std::polar(1.0, -k * x);
        m[j] = e * f;
        mp[j] = e * (fp - iu * k * f);
    };
    m[nx - 1] = Mat::Identity(n, n);
    mp[nx - 1] = Mat::Zero(n, n);
    Mat g(n, n), gp(n, n);
    for (auto it = ivs.rbegin(); it != ivs.rend(); ++it) {
        double h = it->hi - it->lo;
        if (it->cell < 0) {
            double c, s;
            cosh_sinh(-k * k, h, c, s);
            Mat nf = c * f - s * fp;
            fp = (k * k * s) * f + c * fp;
            f = nf;
        } else {
            const auto& ce = eig[it->cell];
            g.noalias() = ce.q.adjoint() * f;
            gp.noalias() = ce.q.adjoint() * fp;
            for (int r = 0; r < n; ++r) {
                double z = ce.lambda[r] - k * k;
                double c, s;
                cosh_sinh(z, h, c, s);
                Eigen::RowVectorXcd gr = g.row(r), gpr = gp.row(r);
                g.row(r) = c * gr - s * gpr;
                gp.row(r) = (-z * s) * gr + c * gpr;
            }
            f.noalias() = ce.q * g;
            fp.noalias() = ce.q * gp;
        }
        if (it->node >= 0) record(it->node, it->lo);
    }
}

void neumann_solve(const PotentialSpec& V, double k, int nx, const std::vector<Interval>& ivs,
                   MatSeries& m, MatSeries& mp)
{
    const int n = V.n;
    const size_t np = ivs.size() + 1;
    const Mat I = Mat::Identity(n, n);
    std::vector<Mat> cur(np, I), next(np, I), der(np, Mat::Zero(n, n));
    const cplx z = 2.0 * iu * k;

    std::vector<cplx> e(ivs.size()), p0(ivs.size()), p1(ivs.size()), s0(ivs.size()), s1(ivs.size());
    for (size_t l = 0; l < ivs.size(); ++l) {
        double h = ivs[l].hi - ivs[l].lo;
        e[l] = std::exp(z * h);
        p0[l] = phi_moment(0, z, h);
        p1[l] = phi_moment(1, z, h) / h;
        s0[l] = psi_moment(0, z, h);
        s1[l] = psi_moment(1, z, h) / h;
    }

    bool converged = ivs.empty();
    for (int sweep = 0; sweep < 60 && !converged; ++sweep) {
        Mat A = Mat::Zero(n, n), D = Mat::Zero(n, n), I0 = Mat::Zero(n, n);
        next[np - 1] = I;
        der[np - 1].setZero();
        for (size_t l = ivs.size(); l-- > 0;) {
            double h = ivs[l].hi - ivs[l].lo;
            if (ivs[l].cell >= 0) {
                const Mat& v = V.cells[ivs[l].cell].v;
                Mat alpha = v * cur[l];
                Mat beta = v * cur[l + 1] - alpha;
                D = e[l] * D + p0[l] * I0 + s0[l] * alpha + s1[l] * beta;
                A = e[l] * A + p0[l] * alpha + p1[l] * beta;
                I0 += h * alpha + (0.5 * h) * beta;
            } else {
                D = e[l] * D + p0[l] * I0;
                A = e[l] * A;
            }
            next[l] = I + D;
            der[l] = -A;
        }
        double diff = 0.0;
        for (size_t l = 0; l < np; ++l) diff = std::max(diff, (next[l] - cur[l]).cwiseAbs().maxCoeff());
        std::swap(cur, next);
        if (diff < 1e-12) converged = true;
    }
    if (!converged)
        throw Error(ErrorCode::NoConvergence, "Neumann series did not settle at k = " + std::to_string(k));

    m[nx - 1] = I;
    mp[nx - 1] = Mat::Zero(n, n);
    for (size_t l = 0; l < ivs.size(); ++l)
        if (ivs[l].node >= 0) {
            m[ivs[l].node] = cur[l];
            mp[ivs[l].node] = der[l];
        }
}

}  // namespace

void faddeev_solve(const PotentialSpec& V, double k, double dx, int nx, MatSeries& m, MatSeries& mprime,
                   FaddeevMethod method)
{
    m = MatSeries(V.n, nx);
    mprime = MatSeries(V.n, nx);
    auto ivs = intervals(V, dx, nx);
    if (method == FaddeevMethod::CellTransfer)
        transfer_solve(V, k, dx, nx, ivs, cell_eigen(V), m, mprime);
    else
        neumann_solve(V, k, nx, ivs, m, mprime);
}

JostTable solve_faddeev(const PotentialSpec& V, const KGrid& kg, double dx, FaddeevMethod method)
{
    check_grid(kg, dx);
    JostTable jt;
    jt.potential = V;
    jt.kgrid = kg;
    jt.dx = dx;
    jt.n = V.n;
    jt.nx = jost_node_count(V, dx);
    const int nx = jt.nx, n = V.n;
    jt.m = MatSeries(n, Eigen::Index(kg.nk) * nx);
    jt.mprime = MatSeries(n, Eigen::Index(kg.nk) * nx);

    auto ivs = intervals(V, dx, nx);
    auto eig = cell_eigen(V);
    auto one = [&](double k, MatSeries& m, MatSeries& mp) {
        m = MatSeries(n, nx);
        mp = MatSeries(n, nx);
        if (method == FaddeevMethod::CellTransfer)
            transfer_solve(V, k, dx, nx, ivs, eig, m, mp);
        else
            neumann_solve(V, k, nx, ivs, m, mp);
    };

    one(0.0, jt.m0, jt.m0prime);

    bool failed = false;
    std::string message;
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
    for (int i = 0; i < kg.nk; ++i) {
        MatSeries m, mp;
        try {
            one(kg[i], m, mp);
        } catch (const Error& e) {
#pragma omp critical
            {
                failed = true;
                message = e.what();
            }
            continue;
        }
        jt.m.data.middleCols(Eigen::Index(i) * nx * n, nx * n) = m.data;
        jt.mprime.data.middleCols(Eigen::Index(i) * nx * n, nx * n) = mp.data;
    }
    if (failed) throw Error(ErrorCode::NoConvergence, message);
    return jt;
}

Mat jost_matrix_at(const Mat& m_minus, const Mat& mprime_minus, double k, const BoundaryPair& bp)
{
    // f(-k,0) = m(-k,0), f'(-k,0) = -ik m(-k,0) + m'(-k,0)
    Mat fp = -iu * k * m_minus + mprime_minus;
    return m_minus.adjoint() * bp.B - fp.adjoint() * bp.A;
}

JostMatrixTable jost_matrix(const JostTable& jt, const BoundaryPair& bp)
{
    if (bp.n() != jt.n) throw Error(ErrorCode::ConfigError, "boundary and potential sizes differ");
    JostMatrixTable out;
    out.kgrid = jt.kgrid;
    out.J = MatSeries(jt.n, jt.kgrid.nk);
    for (int i = 0; i < jt.kgrid.nk; ++i) {
        int im = jt.kgrid.mirror(i);
        out.J[i] = jost_matrix_at(jt.m_at(im, 0), jt.mprime_at(im, 0), jt.kgrid[i], bp);
    }
    out.J0 = jost_matrix_at(jt.m0[0], jt.m0prime[0], 0.0, bp);
    return out;
}

Mat born_term(const PotentialSpec& V, double k, double x)
{
    Mat out = Mat::Zero(V.n, V.n);
    cplx z = 2.0 * iu * k;
    for (const auto& c : V.cells) {
        double a = std::max(c.a, x);
        if (c.b <= a) continue;
        out += (psi_moment(0, z, c.b - x) - psi_moment(0, z, a - x)) * c.v;
    }
    return out;
}

namespace {

// decay rate of the subtracted second-order term -C(x) / (4 (k^2 + mu^2))
constexpr double smooth_mu = 1.0;

}  // namespace

KernelTable marchenko_kernel(const JostTable& jt)
{
    const auto& V = jt.potential;
    const KGrid& kg = jt.kgrid;
    const int n = jt.n, nx = jt.nx, nk = kg.nk;
    KernelTable kt;
    kt.n = n;
    kt.dx = jt.dx;
    kt.nx = nx;
    kt.ny = 2 * (nx - 1) + 1;
    const int ny = kt.ny;
    kt.K = MatSeries(n, Eigen::Index(nx) * ny);
    if (V.is_zero()) return kt;

    const double mu = smooth_mu;
    std::vector<double> taper(nk);
    for (int i = 0; i < nk; ++i) taper[i] = edge_taper(kg[i], kg.kmax);

    // Q((x+y)/2) on the half-step grid
    std::vector<Mat> qhalf(nx + ny - 1);
    for (size_t p = 0; p < qhalf.size(); ++p) qhalf[p] = tail_integral(V, 0.5 * p * jt.dx);

    // K = Born kernel + transform of the smooth second-order term + tapered transform of the rest
    double peak = 0.0, edge = 0.0;
    const int block = 32;
    for (int j0 = 0; j0 < nx; j0 += block) {
        int nb = std::min(block, nx - j0);
        // rows: (jj, r, c) flattened, columns: k nodes
        Mat R(Eigen::Index(nb) * n * n, nk);
        std::vector<Mat> C(nb);
        for (int jj = 0; jj < nb; ++jj) C[jj] = tail_product_integral(V, jt.x(j0 + jj));
#pragma omp parallel for schedule(static) num_threads(thread_count()) reduction(max : peak, edge)
        for (int i = 0; i < nk; ++i) {
            double k = kg[i];
            for (int jj = 0; jj < nb; ++jj) {
                int j = j0 + jj;
                double x = jt.x(j);
                Mat g2 = (-1.0 / (4.0 * (k * k + mu * mu))) * C[jj];
                Mat rem = std::polar(1.0, k * x) * (jt.m_at(i, j) - Mat::Identity(n, n) - born_term(V, k, x) - g2);
                double a = rem.cwiseAbs().maxCoeff();
                peak = std::max(peak, a);
                if (i == 0 || i == nk - 1) edge = std::max(edge, a);
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c < n; ++c) R((Eigen::Index(jj) * n + r) * n + c, i) = taper[i] * rem(r, c);
            }
        }
        Mat ft = phase_sum(R, kg[0], kg.dk, 0.0, jt.dx, ny, -1, kg.dk / (2.0 * pi));
        for (int jj = 0; jj < nb; ++jj) {
            int j = j0 + jj;
            double x = jt.x(j);
            for (int l = j; l < ny; ++l) {
                double y = l * jt.dx;
                Mat val = 0.5 * qhalf[j + l] - (std::exp(-mu * (y - x)) / (8.0 * mu)) * C[jj];
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c < n; ++c) val(r, c) += ft((Eigen::Index(jj) * n + r) * n + c, l);
                kt.K[Eigen::Index(j) * ny + l] = val;
            }
        }
    }
    kt.tail_ratio = peak > 0 ? edge / peak : 0.0;
    if (kt.tail_ratio > 1e-3)
        throw Error(ErrorCode::TailNotNegligible, "integrand at kmax is " + std::to_string(kt.tail_ratio) + " of peak");
    return kt;
}

double jost_representation_check(const PotentialSpec& V, const KernelTable& K,
                                  const std::vector<RepresentationSample>& samples)
{
    const int n = K.n;
    double worst = 0.0;
    for (const auto& s : samples) {
        int j = int(std::lround(s.x / K.dx));
        if (j >= K.nx) continue;  // m = I there and K vanishes
        MatSeries m, mp;
        faddeev_solve(V, s.k, K.dx, K.nx, m, mp);
        double x = j * K.dx;
        Mat f = std::polar(1.0, s.k * x) * m[j];
        Mat integral = Mat::Zero(n, n);
        for (int l = j; l < K.ny; ++l) {
            double w = (l == j || l == K.ny - 1) ? 0.5 * K.dx : K.dx;
            integral += (w * std::polar(1.0, s.k * l * K.dx)) * K.at(j, l);
        }
        Mat defect = f - std::polar(1.0, s.k * x) * Mat::Identity(n, n) - integral;
        worst = std::max(worst, defect.cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace scatter
