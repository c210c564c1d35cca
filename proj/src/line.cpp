#include "scatter/line.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scatter {

LineProblem delta_problem(const PotentialSpec& V, const Mat& Lambda)
{
    LineProblem lp;
    lp.n = V.n;
    lp.V = V;
    lp.kind = Interaction::Delta;
    lp.Lambda = Lambda;
    return lp;
}

LineProblem transmission_problem(const PotentialSpec& V, const Mat& A1, const Mat& A2, const Mat& B1, const Mat& B2)
{
    LineProblem lp;
    lp.n = V.n;
    lp.V = V;
    lp.kind = Interaction::General;
    lp.A1 = A1;
    lp.A2 = A2;
    lp.B1 = B1;
    lp.B2 = B2;
    return lp;
}

FoldedProblem fold(const LineProblem& lp)
{
    if (lp.V.n != lp.n) throw Error(ErrorCode::ConfigError, "potential size differs from n");
    validate_potential(lp.V, false);
    FoldedProblem f;
    f.V = fold_line_potential(lp.V).block;
    if (lp.kind == Interaction::Delta) {
        if (lp.Lambda.rows() != lp.n) throw Error(ErrorCode::ConfigError, "coupling matrix must be n x n");
        f.bp = line_interaction_matrices(lp.Lambda);
    } else {
        f.bp = general_transmission(lp.A1, lp.A2, lp.B1, lp.B2);
        if (f.bp.n() != 2 * lp.n) throw Error(ErrorCode::ConfigError, "transmission blocks must be n x 2n");
    }
    validate_boundary(f.bp);
    return f;
}

Field fold_field(const Field& Y)
{
    if (Y.domain != Domain::Line) throw Error(ErrorCode::GridMismatch, "fold expects a line field");
    const int n = Y.n();
    Field Z = Field::half(Y.dx, Y.m, 2 * n);
    for (int r = 0; r <= Y.m; ++r) {
        Z.v.row(r).head(n) = Y.v.row(Y.m + r);
        Z.v.row(r).tail(n) = Y.v.row(Y.m - r);
    }
    return Z;
}

Field unfold_field(const Field& Z)
{
    if (Z.domain != Domain::HalfLine || Z.n() % 2) throw Error(ErrorCode::GridMismatch, "unfold expects a 2n-channel half-line field");
    const int n = Z.n() / 2;
    Field Y = Field::line(Z.dx, Z.m, n);
    for (int r = 1; r <= Z.m; ++r) {
        Y.v.row(Z.m + r) = Z.v.row(r).head(n);
        Y.v.row(Z.m - r) = Z.v.row(r).tail(n);
    }
    Y.v.row(Z.m) = 0.5 * (Z.v.row(0).head(n) + Z.v.row(0).tail(n));
    return Y;
}

namespace {

void assemble(LineScatteringTable& t)
{
    const int n = t.n, nk = t.kgrid.nk;
    t.SR = MatSeries(2 * n, nk);
    t.unitarity_defect = 0.0;
    Mat I = Mat::Identity(2 * n, 2 * n);
    for (int i = 0; i < nk; ++i) {
        Mat s(2 * n, 2 * n);
        s << t.Tl[i], t.R[i], t.L[i], t.Tr[i];
        t.SR[i] = s;
        t.unitarity_defect = std::max(t.unitarity_defect, opnorm(s.adjoint() * s - I));
    }
    // same extrapolation and plateau average as the half-line table
    ScatteringTable tmp;
    tmp.kgrid = t.kgrid;
    tmp.n = 2 * n;
    tmp.S = t.SR;
    s_limits(tmp, false);
    t.SR0 = tmp.S0;
    t.SRinf = tmp.Sinf;
}

using State = std::vector<cplx>;

// Y'' = (V - k^2) Y for an n x n matrix Y; state is [Y, Y'] column-major.
struct LineOde {
    int n;
    Mat A;  // V - k^2 on the current cell

    void operator()(const State& s, State& ds, double) const
    {
        const int nn = n * n;
        Eigen::Map<const Mat> y(s.data(), n, n);
        Eigen::Map<Mat> dy(ds.data(), n, n), dyp(ds.data() + nn, n, n);
        dy = Eigen::Map<const Mat>(s.data() + nn, n, n);
        dyp.noalias() = A * y;
    }
};

State pack(const Mat& y, const Mat& yp)
{
    const int nn = int(y.size());
    State s(2 * nn);
    std::copy(y.data(), y.data() + nn, s.begin());
    std::copy(yp.data(), yp.data() + nn, s.begin() + nn);
    return s;
}

void unpack(const State& s, int n, Mat& y, Mat& yp)
{
    y = Eigen::Map<const Mat>(s.data(), n, n);
    yp = Eigen::Map<const Mat>(s.data() + n * n, n, n);
}

class Shooter {
public:
    Shooter(const PotentialSpec& V, double k, double dx) : V_(V), k_(k), hmax_(dx / 4) {}

    // carries the state from x0 to x1 cell by cell
    void run(State& s, double x0, double x1)
    {
        namespace odeint = boost::numeric::odeint;
        std::vector<double> pts{x0, x1};
        for (const auto& c : V_.cells)
            for (double e : {c.a, c.b})
                if ((e - x0) * (e - x1) < 0) pts.push_back(e);
        std::sort(pts.begin(), pts.end());
        if (x1 < x0) std::reverse(pts.begin(), pts.end());
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            double a = pts[i], b = pts[i + 1];
            if (std::abs(b - a) < 1e-15) continue;
            LineOde ode{V_.n, V_.value(0.5 * (a + b)) - k_ * k_ * Mat::Identity(V_.n, V_.n)};
            const double dir = b > a ? 1.0 : -1.0;
            // max_dt carries the direction, otherwise backward runs collapse to one step
            auto stepper = odeint::make_controlled(1e-13, 1e-12, dir * hmax_, odeint::runge_kutta_dopri5<State>());
            double h = dir * std::min(hmax_, std::abs(b - a));
            size_t steps = odeint::integrate_adaptive(stepper, ode, s, a, b, h);
            if (steps > size_t(50 * std::abs(b - a) / hmax_ + 1000)) {
                std::ostringstream os;
                os << "step count " << steps << " on [" << a << ", " << b << "] at k = " << k_;
                throw Error(ErrorCode::StiffIntegration, os.str());
            }
        }
    }

private:
    const PotentialSpec& V_;
    double k_;
    double hmax_;
};

}  // namespace

LineScatteringTable line_smatrix_from_halfline(const ScatteringTable& st)
{
    if (st.n % 2) throw Error(ErrorCode::GridMismatch, "folded table must have 2n channels");
    LineScatteringTable t;
    t.kgrid = st.kgrid;
    t.n = st.n / 2;
    const int n = t.n, nk = st.kgrid.nk;
    t.Tl = t.Tr = t.L = t.R = MatSeries(n, nk);
    for (int i = 0; i < nk; ++i) {
        auto s = st.S[i];
        t.Tr[i] = s.block(n, 0, n, n);
        t.R[i] = s.block(0, 0, n, n);
        t.Tl[i] = s.block(0, n, n, n);
        t.L[i] = s.block(n, n, n, n);
    }
    assemble(t);
    return t;
}

LineScatteringTable line_jost_direct(const LineProblem& lp, const KGrid& kg, double dx)
{
    if (lp.kind != Interaction::Delta)
        throw Error(ErrorCode::ConfigError, "the ODE route covers delta interactions only");
    validate_potential(lp.V, false);
    const int n = lp.n, nk = kg.nk;
    const double xl = std::min(0.0, lp.V.support_left()), xr = std::max(0.0, lp.V.support_bound());
    LineScatteringTable t;
    t.kgrid = kg;
    t.n = n;
    t.Tl = t.Tr = t.L = t.R = MatSeries(n, nk);
    const Mat I = Mat::Identity(n, n);

    std::string failure;
#pragma omp parallel for schedule(dynamic) num_threads(thread_count())
    for (int i = 0; i < nk; ++i) {
        try {
            const double k = kg[i];
            const cplx ik = iu * k;
            Shooter sh(lp.V, k, dx);
            Mat y, yp;

            // from the left: e^{ikx} beyond the support on the right, integrated leftwards
            State s = pack(std::exp(ik * xr) * I, ik * std::exp(ik * xr) * I);
            sh.run(s, xr, 0.0);
            unpack(s, n, y, yp);
            yp -= lp.Lambda * y;
            s = pack(y, yp);
            sh.run(s, 0.0, xl);
            unpack(s, n, y, yp);
            Mat al = 0.5 * std::exp(-ik * xl) * (y + yp / ik);
            Mat bl = 0.5 * std::exp(ik * xl) * (y - yp / ik);

            // from the right: e^{-ikx} beyond the support on the left, integrated rightwards
            s = pack(std::exp(-ik * xl) * I, -ik * std::exp(-ik * xl) * I);
            sh.run(s, xl, 0.0);
            unpack(s, n, y, yp);
            yp += lp.Lambda * y;
            s = pack(y, yp);
            sh.run(s, 0.0, xr);
            unpack(s, n, y, yp);
            Mat ar = 0.5 * std::exp(ik * xr) * (y - yp / ik);
            Mat br = 0.5 * std::exp(-ik * xr) * (y + yp / ik);

            Mat al_inv = al.inverse(), ar_inv = ar.inverse();
            t.Tl[i] = al_inv;
            t.L[i] = bl * al_inv;
            t.Tr[i] = ar_inv;
            t.R[i] = br * ar_inv;
        } catch (const Error& e) {
#pragma omp critical
            failure = e.what();
        }
    }
    if (!failure.empty()) throw Error(ErrorCode::StiffIntegration, failure);
    assemble(t);
    return t;
}

double line_table_distance(const LineScatteringTable& a, const LineScatteringTable& b)
{
    if (a.kgrid.nk != b.kgrid.nk || a.n != b.n || std::abs(a.kgrid.kmax - b.kgrid.kmax) > 1e-12)
        throw Error(ErrorCode::GridMismatch, "line tables live on different grids");
    double d = 0.0;
    for (int i = 0; i < a.kgrid.nk; ++i) d = std::max(d, (a.SR[i] - b.SR[i]).cwiseAbs().maxCoeff());
    return d;
}

Mat m1_matrix(int n)
{
    Mat M = Mat::Zero(2 * n, 2 * n);
    const double r = 1.0 / std::sqrt(2.0);
    for (int j = 0; j < n; ++j) {
        M(j, j) = r;
        M(n + j, j) = -r;
        M(j, n + j) = r;
        M(n + j, n + j) = r;
    }
    return M;
}

Mat swap_matrix(int n)
{
    Mat S = Mat::Zero(2 * n, 2 * n);
    S.topRightCorner(n, n).setIdentity();
    S.bottomLeftCorner(n, n).setIdentity();
    return S;
}

namespace {

Field channels(const Field& Z, int first, int count)
{
    Field f = Field::half(Z.dx, Z.m, count);
    f.v = Z.v.middleCols(first, count);
    return f;
}

}  // namespace

KField sine_cosine_maps(const Field& Z, int sign, double dk, int count)
{
    if (Z.domain != Domain::HalfLine || Z.n() % 2) throw Error(ErrorCode::GridMismatch, "expected a 2n-channel half-line field");
    const int n = Z.n() / 2;
    KField s = sine_transform(channels(Z, 0, n), dk, count);
    KField c = f0_transform(channels(Z, n, n), dk, count);
    KField out;
    out.dk = dk;
    out.v.resize(count, 2 * n);
    out.v.leftCols(n) = (-double(sign) * iu) * s.v;
    out.v.rightCols(n) = c.v;
    return out;
}

Field sine_cosine_adjoint(const KField& W, int sign, double dx, int m)
{
    const int n = int(W.v.cols()) / 2;
    KField s, c;
    s.dk = c.dk = W.dk;
    s.v = (double(sign) * iu) * W.v.leftCols(n);
    c.v = W.v.rightCols(n);
    Field out = Field::half(dx, m, 2 * n);
    out.v.leftCols(n) = sine_adjoint(s, dx, m).v;
    out.v.rightCols(n) = f0_adjoint(c, dx, m).v;
    return out;
}

Equivalence equivalence(const ScatteringTable& st, const LineScatteringTable& lt, double tol)
{
    const int n = lt.n;
    Equivalence e;
    Mat sw = swap_matrix(n), I = Mat::Identity(2 * n, 2 * n);
    e.folded_defect = std::max(opnorm(st.S0 - sw), opnorm(st.Sinf - sw));
    e.line_defect = std::max(opnorm(lt.SR0 - I), opnorm(lt.SRinf - I));
    e.folded = e.folded_defect < tol;
    e.line = e.line_defect < tol;
    return e;
}

LineForm parse_line_form(const std::string& s)
{
    if (s == "chained") return LineForm::Chained;
    if (s == "thm59") return LineForm::Thm59;
    throw Error(ErrorCode::ConfigError, "unknown line form '" + s + "' (chained, thm59)");
}

const char* to_string(LineForm f) { return f == LineForm::Chained ? "chained" : "thm59"; }

namespace {

std::shared_ptr<const SymbolSamples> rotate(const SymbolSamples& p, const Mat& M)
{
    auto out = std::make_shared<SymbolSamples>(p);
    for (Eigen::Index j = 0; j < p.values.size(); ++j) out->values[j] = M.adjoint() * p.values[j] * M;
    return out;
}

// W(H, H1) Z = (F^s)^dag M1 F1~^s M1^dag Z on the given physical-solution table
Field chained(const PhysicalSolutionTable& P, const Mat& M1, const Field& Z, int sign)
{
    const KGrid& kg = P.kgrid;
    Field r = Z;
    r.v = Z.v * M1.conjugate();
    KField w = sine_cosine_maps(r, sign, kg.dk, kg.nk / 2);
    w.v = w.v * M1.transpose();
    return fourier_maps_adjoint(P, w, sign, Z.dx, Z.m);
}

}  // namespace

LineContext make_line_context(const LineProblem& lp, const GridParams& g, const WaveOptions& opt)
{
    LineContext lc;
    lc.lp = lp;
    lc.folded = fold(lp);
    SmatrixOptions so;
    so.check_plateau = false;
    lc.ctx = make_wave_context(build_model(lc.folded.V, lc.folded.bp, g, so), opt, swap_matrix(lp.n));
    lc.line_s = line_smatrix_from_halfline(lc.ctx.model.S);
    lc.M1 = m1_matrix(lp.n);
    if (lc.ctx.p_plus) {
        lc.pm_plus = rotate(*lc.ctx.p_plus, lc.M1);
        lc.pm_minus = rotate(*lc.ctx.p_minus, lc.M1);
    }
    return lc;
}

Pipeline thm59_pipeline(const LineContext& lc, int sign)
{
    if (!lc.thm59_hypothesis()) {
        std::ostringstream os;
        os << "S(0) = S_inf = swap fails: |S0 - swap| = " << opnorm(lc.ctx.model.S.S0 - swap_matrix(lc.lp.n))
           << ", |Sinf - swap| = " << opnorm(lc.ctx.model.S.Sinf - swap_matrix(lc.lp.n));
        throw Error(ErrorCode::HypothesisViolated, os.str());
    }
    const int n = lc.lp.n;
    Mat upper = Mat::Zero(2 * n, 2 * n), lower = Mat::Zero(2 * n, 2 * n);
    upper.topLeftCorner(n, n) = -Mat::Identity(n, n);
    lower.bottomRightCorner(n, n).setIdentity();
    const Mat M1dag = lc.M1.adjoint();

    // (-E_odd (M1^dag Z)_+, E_even (M1^dag Z)_-)
    Pipeline odd(Domain::HalfLine), even(Domain::HalfLine);
    odd.scale(M1dag).scale(upper).odd_ext();
    even.scale(M1dag).scale(lower).even_ext();
    Pipeline q = Pipeline::sum({odd, even});
    q.convolve(sign > 0 ? lc.pm_plus : lc.pm_minus).restrict_half().scale(lc.M1);

    Pipeline id(Domain::HalfLine), k(Domain::HalfLine);
    k.kernel(lc.ctx.K, lc.ctx.opt.schur_bound);
    Pipeline kq = q;
    kq.kernel(lc.ctx.K, lc.ctx.opt.schur_bound);
    return Pipeline::sum({id, k, q, kq});
}

Field folded_wave_op(const LineContext& lc, const Field& Z, int sign, LineForm form)
{
    if (form == LineForm::Thm59) return thm59_pipeline(lc, sign).apply(Z);
    return chained(lc.ctx.psi, lc.M1, Z, sign);
}

Field line_wave_op(const LineContext& lc, const Field& Y, int sign, LineForm form)
{
    return unfold_field(folded_wave_op(lc, fold_field(Y), sign, form));
}

std::vector<Field> j_split_terms(const LineContext& lc, const Field& Z, int sign)
{
    const KGrid& kg = lc.ctx.psi.kgrid;
    return split_terms(lc.ctx, sine_cosine_maps(Z, sign, kg.dk, kg.nk / 2), lc.M1, sign, Z.dx, Z.m);
}

TimeLimitReport line_time_limit(const LineProblem& lp, const GaussianPacket& Y, const TimeLimitOptions& opt)
{
    FoldedProblem f = fold(lp);
    EvolutionSetup e = evolution_setup(f.V, f.bp, Y, opt);
    const Mat M1 = m1_matrix(lp.n);
    Field y0 = fold_field(free_gaussian_line(Y, 0.0, e.dx, e.m));
    Field target = chained(e.P, M1, y0, opt.sign);
    return time_limit_scan(e, opt, [&](double t) { return fold_field(free_gaussian_line(Y, t, e.dx, e.m)); }, target);
}

}  // namespace scatter
