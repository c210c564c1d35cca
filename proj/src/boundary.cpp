#include "scatter/boundary.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace scatter {

Mat DiagonalForm::A_tilde() const
{
    return (-thetas.array().sin()).matrix().cast<cplx>().asDiagonal();
}

Mat DiagonalForm::B_tilde() const
{
    return thetas.array().cos().matrix().cast<cplx>().asDiagonal();
}

BoundaryDiagnostics validate_boundary(const BoundaryPair& bp)
{
    if (bp.A.rows() != bp.A.cols() || bp.B.rows() != bp.B.cols() || bp.A.rows() != bp.B.rows())
        throw Error(ErrorCode::ConfigError, "boundary matrices must be square and of equal size");
    BoundaryDiagnostics d;
    Mat skew = bp.B.adjoint() * bp.A - bp.A.adjoint() * bp.B;
    d.selfadjoint_defect = skew.cwiseAbs().maxCoeff();
    Mat g = bp.A.adjoint() * bp.A + bp.B.adjoint() * bp.B;
    Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
    d.min_eig = es.eigenvalues().minCoeff();
    double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    if (d.selfadjoint_defect > 1e-10 * scale) {
        std::ostringstream os;
        os << "|B^dag A - A^dag B| = " << d.selfadjoint_defect;
        throw Error(ErrorCode::NotSelfAdjointPair, os.str());
    }
    if (d.min_eig <= 1e-10) {
        std::ostringstream os;
        os << "min eig(A^dag A + B^dag B) = " << d.min_eig;
        throw Error(ErrorCode::DegeneratePair, os.str());
    }
    return d;
}

Mat boundary_unitary(const BoundaryPair& bp)
{
    Mat g = bp.A.adjoint() * bp.A + bp.B.adjoint() * bp.B;
    Eigen::LDLT<Mat> ldlt(g);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorCode::DegeneratePair, "A^dag A + B^dag B is singular");
    Mat right = bp.B.adjoint() - iu * bp.A.adjoint();
    return (bp.B - iu * bp.A) * ldlt.solve(right);
}

namespace {

// Eigenvectors of a normal matrix via a generic Hermitian combination of its two Hermitian parts.
Mat unitary_eigenvectors(const Mat& u, double alpha)
{
    Mat h1 = 0.5 * (u + u.adjoint());
    Mat h2 = (u - u.adjoint()) / (2.0 * iu);
    Eigen::SelfAdjointEigenSolver<Mat> es(h1 + alpha * h2);
    return es.eigenvectors();
}

double off_diagonal(const Mat& m)
{
    Mat d = m;
    d.diagonal().setZero();
    return d.cwiseAbs().maxCoeff();
}

}  // namespace

DiagonalForm diagonalize(const BoundaryPair& bp)
{
    validate_boundary(bp);
    const int n = bp.n();
    Mat u = boundary_unitary(bp);

    Mat vecs;
    for (double alpha : {0.6180339887498949, 0.4142135623730951, 1.7320508075688772, 2.718281828459045}) {
        vecs = unitary_eigenvectors(u, alpha);
        if (off_diagonal(vecs.adjoint() * u * vecs) < 1e-10) break;
    }

    std::vector<double> theta(n);
    for (int j = 0; j < n; ++j) {
        cplx lambda = vecs.col(j).dot(u * vecs.col(j));
        double arg = std::arg(lambda);
        if (arg < 1e-10) arg += 2.0 * pi;
        theta[j] = 0.5 * arg;
    }

    // Decreasing angle puts Dirichlet channels first; ties keep solver order.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return theta[a] > theta[b] + 1e-10; });

    DiagonalForm df;
    df.thetas.resize(n);
    df.M.resize(n, n);
    for (int j = 0; j < n; ++j) {
        df.thetas[j] = theta[order[j]];
        df.M.col(j) = vecs.col(order[j]);
    }

    // Re-orthonormalize each cluster of equal angles.
    for (int start = 0; start < n;) {
        int end = start + 1;
        while (end < n && std::abs(df.thetas[end] - df.thetas[start]) < 1e-8) ++end;
        if (end - start > 1) {
            Mat block = df.M.middleCols(start, end - start);
            Eigen::HouseholderQR<Mat> qr(block);
            Mat q = qr.householderQ() * Mat::Identity(n, end - start);
            df.M.middleCols(start, end - start) = q;
        }
        start = end;
    }
    // Fix the phase of each column: first entry of significant size is real positive.
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            cplx c = df.M(i, j);
            if (std::abs(c) > 1e-8) {
                df.M.col(j) *= std::conj(c) / std::abs(c);
                break;
            }
        }
    }

    for (int j = 0; j < n; ++j) {
        double t = df.thetas[j];
        if (std::abs(t - pi) < 1e-10)
            ++df.n_dirichlet;
        else if (std::abs(t - 0.5 * pi) < 1e-10)
            ++df.n_neumann;
        else
            ++df.n_mixed;
    }

    Eigen::VectorXcd phase(n);
    for (int j = 0; j < n; ++j) phase[j] = std::polar(1.0, df.thetas[j]);
    df.T1 = phase.asDiagonal();  // (B~ + i A~)^{-1} = diag(e^{i theta})
    df.T2 = bp.B + iu * bp.A;
    return df;
}

BoundaryPair reconstruct(const DiagonalForm& df)
{
    Mat tail = df.T1 * df.M.adjoint() * df.T2;
    return {df.M * df.A_tilde() * tail, df.M * df.B_tilde() * tail};
}

BoundaryPair neumann(int n) { return {Mat::Identity(n, n), Mat::Zero(n, n)}; }

BoundaryPair dirichlet(int n) { return {Mat::Zero(n, n), -Mat::Identity(n, n)}; }

BoundaryPair robin(double theta) { return robin(RVec::Constant(1, theta)); }

BoundaryPair robin(const RVec& thetas)
{
    Mat a = (-thetas.array().sin()).matrix().cast<cplx>().asDiagonal();
    Mat b = thetas.array().cos().matrix().cast<cplx>().asDiagonal();
    return {a, b};
}

BoundaryPair line_interaction_matrices(const Mat& Lambda)
{
    const int n = int(Lambda.rows());
    if (Lambda.cols() != n) throw Error(ErrorCode::ConfigError, "coupling matrix must be square");
    double defect = (Lambda - Lambda.adjoint()).cwiseAbs().maxCoeff();
    if (defect > 1e-10) throw Error(ErrorCode::NonHermitianCoupling, "defect " + std::to_string(defect));
    Mat I = Mat::Identity(n, n), Z = Mat::Zero(n, n);
    Mat A(2 * n, 2 * n), B(2 * n, 2 * n);
    A << Z, I, Z, I;
    B << -I, Lambda, I, Z;
    return {A, B};
}

BoundaryPair general_transmission(const Mat& A1, const Mat& A2, const Mat& B1, const Mat& B2)
{
    const Eigen::Index n = A1.rows();
    for (const Mat* m : {&A1, &A2, &B1, &B2})
        if (m->rows() != n || m->cols() != 2 * n)
            throw Error(ErrorCode::ConfigError, "transmission blocks must all be n x 2n");
    Mat A(2 * n, 2 * n), B(2 * n, 2 * n);
    A << A1, A2;
    B << B1, B2;
    return {A, B};
}

bool predicted_s_infinity_identity(const DiagonalForm& df) { return df.n_dirichlet == 0; }

}  // namespace scatter
