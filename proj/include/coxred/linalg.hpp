#pragma once

#include "coxred/types.hpp"

#include <cstddef>

namespace coxred::linalg {

/// Column-centred copy of a matrix together with the removed means.
struct CentredView {
    Matrix values;
    Vector means;
};

struct CentredVector {
    Vector values;
    double mean = 0.0;
};

/// Least-squares fit of y on the columns of a design block.
struct LstsqFit {
    Vector coefficients;
    Vector residuals;
    std::size_t rank = 0;
    /// diag((X_K^T X_K)^{-1}); filled only when the block has full column rank.
    Vector xtx_inv_diag;
};

/// theta_{Y:E} and theta_{Y:E.F} + theta_{F:E} theta_{Y:F.E}.
struct CochranSides {
    Vector lhs;
    Vector rhs;
    Vector direct;    ///< theta_{Y:E.F}
    Vector indirect;  ///< theta_{F:E} theta_{Y:F.E}
};

/// Rejects fewer than two rows.
CentredView centre(const Matrix& m);
CentredVector centre(const Vector& v);

/// Count of singular values above sigma_max * n * machine epsilon.
std::size_t numerical_rank(const Matrix& xk);

/// Orthonormal basis (n x rank) of the column span; tolerates rank deficiency.
Matrix orthonormal_basis(const Matrix& xk);

/// Least squares through a Householder QR of X_K. The rank is read from the
/// singular values of the triangular factor; RankDeficient is thrown when it
/// falls below |K|.
LstsqFit least_squares(const Vector& y, const Matrix& xk);

/// P_K y for a full-column-rank block.
Vector project(const Vector& y, const Matrix& xk);

double corr(const Vector& u, const Vector& v);

/// R(u, X) = ||P_X u|| / ||u||.
double multiple_corr(const Vector& u, const Matrix& x);

/// R(X_A, X_B) = ||P_A P_B||_2, the largest canonical correlation. Computed
/// from the |A| x |A| matrix Q_A^T P_B Q_A; no n x n projector is formed.
double block_corr(const Matrix& xa, const Matrix& xb);

/// Both sides of theta_{Y:E} = theta_{Y:E.F} + theta_{F:E} theta_{Y:F.E}.
CochranSides cochran_decompose(const Vector& y, const IndexSet& e, const IndexSet& f, const Matrix& x);

}  // namespace coxred::linalg
