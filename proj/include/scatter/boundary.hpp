#pragma once

#include "scatter/core.hpp"

namespace scatter {

// Boundary condition -B^dagger Y(0) + A^dagger Y'(0) = 0.
struct BoundaryPair {
    Mat A;
    Mat B;
    int n() const { return int(A.rows()); }
};

struct BoundaryDiagnostics {
    double selfadjoint_defect = 0.0;  // |B^dag A - A^dag B|
    double min_eig = 0.0;             // smallest eigenvalue of A^dag A + B^dag B
};

struct DiagonalForm {
    RVec thetas;  // in (0, pi]; pi is Dirichlet, pi/2 Neumann
    Mat M;        // unitary, columns are eigenvectors of U
    Mat T1;
    Mat T2;
    int n_dirichlet = 0;
    int n_neumann = 0;
    int n_mixed = 0;

    Mat A_tilde() const;  // -diag(sin theta)
    Mat B_tilde() const;  //  diag(cos theta)
};

BoundaryDiagnostics validate_boundary(const BoundaryPair& bp);

// U = (B - iA) (A^dag A + B^dag B)^{-1} (B^dag - i A^dag)
Mat boundary_unitary(const BoundaryPair& bp);

DiagonalForm diagonalize(const BoundaryPair& bp);
BoundaryPair reconstruct(const DiagonalForm& df);

BoundaryPair neumann(int n);
BoundaryPair dirichlet(int n);
BoundaryPair robin(double theta);
BoundaryPair robin(const RVec& thetas);

// 2n x 2n pair of the delta point interaction with coupling Lambda.
BoundaryPair line_interaction_matrices(const Mat& Lambda);
// A = [A1; A2], B = [B1; B2] with n x 2n blocks.
BoundaryPair general_transmission(const Mat& A1, const Mat& A2, const Mat& B1, const Mat& B2);

bool predicted_s_infinity_identity(const DiagonalForm& df);

}  // namespace scatter
