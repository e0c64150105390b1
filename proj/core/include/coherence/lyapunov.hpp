#pragma once

#include <Eigen/Dense>

namespace coherence {

/// Solves the continuous Lyapunov equation A^T P + P A = -Q for P.
///
/// Dispatches to the Kronecker solver for n <= 6 and to the Schur solver
/// otherwise. A must be Hurwitz; throws InstabilityError when it is not and
/// NumericalError when the linear system is singular.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// Vectorized form (I (x) A^T + A^T (x) I) vec(P) = -vec(Q), solved by full
/// pivoting LU. O(n^6); intended for the 2x2 and 3x3 modal blocks.
Eigen::MatrixXd solve_lyapunov_kronecker(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& q);

/// Bartels-Stewart with a complex Schur factorization A = U T U^*. The
/// transformed equation T^* X + X T = -U^* Q U is lower-triangular per column
/// and is solved by forward substitution. O(n^3).
Eigen::MatrixXd solve_lyapunov_schur(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q);

/// Frobenius norm of A^T P + P A + Q.
double lyapunov_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p,
                         const Eigen::MatrixXd& q);

/// True when every eigenvalue of A has real part below -1e-10 * spectral radius.
bool is_hurwitz(const Eigen::MatrixXd& a);

}  // namespace coherence
