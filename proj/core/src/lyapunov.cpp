#include "coherence/lyapunov.hpp"

#include <complex>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "coherence/errors.hpp"

namespace coherence {

namespace {

void require_square_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  if (a.rows() != a.cols() || q.rows() != q.cols() || a.rows() != q.rows()) {
    throw InvalidSizeError("Lyapunov: A and Q must be square and of equal size");
  }
  if (a.rows() == 0) throw InvalidSizeError("Lyapunov: empty matrix");
}

void require_hurwitz(const Eigen::VectorXcd& eigenvalues) {
  const double eps = 1e-10 * eigenvalues.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    if (!(eigenvalues(i).real() < -eps)) {
      throw InstabilityError("Lyapunov: A is not Hurwitz (eigenvalue with real part " +
                             std::to_string(eigenvalues(i).real()) + ")");
    }
  }
}

}  // namespace

bool is_hurwitz(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  if (solver.info() != Eigen::Success) return false;
  const Eigen::VectorXcd values = solver.eigenvalues();
  const double eps = 1e-10 * values.cwiseAbs().maxCoeff();
  return (values.real().array() < -eps).all();
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  return a.rows() <= 6 ? solve_lyapunov_kronecker(a, q) : solve_lyapunov_schur(a, q);
}

Eigen::MatrixXd solve_lyapunov_kronecker(const Eigen::MatrixXd& a,
                                         const Eigen::MatrixXd& q) {
  require_square_pair(a, q);
  if (!is_hurwitz(a)) throw InstabilityError("Lyapunov: A is not Hurwitz");

  const Eigen::Index n = a.rows();
  const Eigen::MatrixXd at = a.transpose();
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n * n, n * n);
  // Column-major vec: vec(A^T P) = (I (x) A^T) vec(P), vec(P A) = (A^T (x) I) vec(P).
  for (Eigen::Index i = 0; i < n; ++i) {
    system.block(i * n, i * n, n, n) += at;
    for (Eigen::Index j = 0; j < n; ++j) {
      system.block(i * n, j * n, n, n).diagonal().array() += at(i, j);
    }
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw NumericalError("Lyapunov: singular Kronecker system");

  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
  const Eigen::VectorXd solution = lu.solve(rhs);
  Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(solution.data(), n, n);
  return 0.5 * (p + p.transpose());
}

Eigen::MatrixXd solve_lyapunov_schur(const Eigen::MatrixXd& a, const Eigen::MatrixXd& q) {
  require_square_pair(a, q);
  const Eigen::Index n = a.rows();

  Eigen::ComplexSchur<Eigen::MatrixXd> schur(a, true);
  if (schur.info() != Eigen::Success) {
    throw NumericalError("Lyapunov: Schur factorization did not converge");
  }
  const Eigen::MatrixXcd& t = schur.matrixT();
  const Eigen::MatrixXcd& u = schur.matrixU();
  require_hurwitz(t.diagonal());

  // A^T = U T^* U^* for real A, so T^* X + X T = -F with X = U^* P U.
  const Eigen::MatrixXcd f = u.adjoint() * q.cast<std::complex<double>>() * u;
  const Eigen::MatrixXcd t_adj = t.adjoint();
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(n, n);

  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd rhs = -f.col(j);
    if (j > 0) rhs.noalias() -= x.leftCols(j) * t.col(j).head(j);
    // Forward substitution with the lower-triangular T^* + t_jj I.
    const std::complex<double> shift = t(j, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      std::complex<double> acc = rhs(i);
      if (i > 0) acc -= (t_adj.row(i).head(i).transpose().cwiseProduct(x.col(j).head(i))).sum();
      const std::complex<double> pivot = t_adj(i, i) + shift;
      if (std::abs(pivot) == 0.0) throw NumericalError("Lyapunov: singular Schur system");
      x(i, j) = acc / pivot;
    }
  }

  Eigen::MatrixXd p = (u * x * u.adjoint()).real();
  return 0.5 * (p + p.transpose());
}

double lyapunov_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& p,
                         const Eigen::MatrixXd& q) {
  return (a.transpose() * p + p * a + q).norm();
}

}  // namespace coherence
