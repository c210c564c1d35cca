#pragma once

#include "scatter/waveop.hpp"

namespace scatter {

enum class Interaction { Delta, General };

struct LineProblem {
    int n = 1;
    PotentialSpec V;  // cells anywhere on the line
    Interaction kind = Interaction::Delta;
    Mat Lambda;          // Y'(0+) - Y'(0-) = Lambda Y(0)
    Mat A1, A2, B1, B2;  // n x 2n transmission blocks
};

LineProblem delta_problem(const PotentialSpec& V, const Mat& Lambda);
LineProblem transmission_problem(const PotentialSpec& V, const Mat& A1, const Mat& A2, const Mat& B1, const Mat& B2);

// The 2n-channel half-line problem: diag(V(x), V(-x)) and the stacked boundary pair.
struct FoldedProblem {
    PotentialSpec V;
    BoundaryPair bp;
};

FoldedProblem fold(const LineProblem& lp);

// (U^dag Y)(x) = (Y(x), Y(-x)), x >= 0. unfold is its exact adjoint under trapezoid weights, so
// the node at 0 takes the mean of the two channel values (equal for anything that came from fold).
Field fold_field(const Field& Y);
Field unfold_field(const Field& Z);

struct LineScatteringTable {
    KGrid kgrid;
    int n = 1;
    MatSeries Tl, Tr, L, R;
    MatSeries SR;  // [[Tl, R], [L, Tr]]
    Mat SR0;
    Mat SRinf;
    double unitarity_defect = 0.0;
};

LineScatteringTable line_smatrix_from_halfline(const ScatteringTable& st);

// Independent route: adaptive Dormand-Prince across the support with the delta jump imposed at 0.
// Jost solutions from the left and right give a_l, b_l, a_r, b_r. Delta interactions only.
LineScatteringTable line_jost_direct(const LineProblem& lp, const KGrid& kg, double dx);

// max over k of the entrywise difference of S_R
double line_table_distance(const LineScatteringTable& a, const LineScatteringTable& b);

// Columns (e_j - e_{n+j}) / sqrt2 for j < n, then (e_j + e_{n+j}) / sqrt2.
Mat m1_matrix(int n);
Mat swap_matrix(int n);

// First n channels: +-F E_odd Z_+ = -+ i sqrt(2/pi) int sin(kx) Z_+; last n: cosine transform of Z_-.
KField sine_cosine_maps(const Field& Z, int sign, double dk, int count);
Field sine_cosine_adjoint(const KField& W, int sign, double dx, int m);

// S(0) = S_inf = swap on the half line against S_R(0) = S_R,inf = I on the line.
struct Equivalence {
    double folded_defect = 0.0;
    double line_defect = 0.0;
    bool folded = false;
    bool line = false;
    bool agree() const { return folded == line; }
};
Equivalence equivalence(const ScatteringTable& st, const LineScatteringTable& lt, double tol = 1e-3);

enum class LineForm { Chained, Thm59 };
LineForm parse_line_form(const std::string& s);
const char* to_string(LineForm f);

struct LineContext {
    LineProblem lp;
    FoldedProblem folded;
    WaveContext ctx;  // P symbols taken against the swap matrix
    LineScatteringTable line_s;
    Mat M1;
    std::shared_ptr<const SymbolSamples> pm_plus;  // M1^dag P M1
    std::shared_ptr<const SymbolSamples> pm_minus;

    bool thm59_hypothesis() const { return pm_plus != nullptr; }
};

LineContext make_line_context(const LineProblem& lp, const GridParams& g, const WaveOptions& opt = {});

// W(H, H1) on folded 2n-channel fields.
Field folded_wave_op(const LineContext& lc, const Field& Z, int sign, LineForm form);
// Throws HypothesisViolated unless S(0) = S_inf = swap.
Pipeline thm59_pipeline(const LineContext& lc, int sign);
// U W(H, H1) U^dag on n-channel line fields.
Field line_wave_op(const LineContext& lc, const Field& Y, int sign, LineForm form);

// J^(1..6) for a field already in the M1 frame; they sum to M1^dag W(H, H1) M1 Z.
std::vector<Field> j_split_terms(const LineContext& lc, const Field& Z, int sign);

// e^{itH_R} e^{-itH0_R} Y against the chained W Y, Y a Gaussian on the line.
TimeLimitReport line_time_limit(const LineProblem& lp, const GaussianPacket& Y, const TimeLimitOptions& opt = {});

}  // namespace scatter
