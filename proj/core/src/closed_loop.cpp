#include "coherence/closed_loop.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "coherence/errors.hpp"

namespace coherence {

namespace {

void require_nonneg(double value, const char* name) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw InvalidParameterError(std::string(name) + " must be finite and >= 0");
  }
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw InvalidParameterError(std::string(name) + " must be finite and > 0");
  }
}

void require_connected(const WeightedGraph& graph) {
  if (!is_connected(graph)) throw TopologyError("closed loop requires a connected graph");
}

Eigen::MatrixXd output_matrix(int n, int blocks) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, blocks * n);
  c.leftCols(n) = Eigen::MatrixXd::Identity(n, n) -
                  Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  return c;
}

Eigen::MatrixXd input_matrix(int n, int blocks) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(blocks * n, n);
  b.middleRows(n, n).setIdentity();
  return b;
}

}  // namespace

std::string_view to_string(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::P:
      return "p";
    case ControllerKind::Dapi:
      return "dapi";
    case ControllerKind::Fdpd:
      return "fdpd";
  }
  return "unknown";
}

void PGains::validate() const {
  require_nonneg(f, "f");
  require_nonneg(g, "g");
  require_nonneg(f0, "f0");
  require_nonneg(g0, "g0");
}

void DapiGains::validate() const {
  require_positive(f, "f");
  require_nonneg(g, "g");
  require_positive(g0, "g0");
  require_positive(ki, "K_I");
  require_nonneg(c, "c");
}

void FdpdGains::validate() const {
  require_nonneg(f, "f");
  require_nonneg(g, "g");
  require_positive(f0, "f0");
  require_positive(kd, "K_D");
  require_nonneg(tau, "tau");
}

ControllerKind kind_of(const Gains& gains) {
  return static_cast<ControllerKind>(gains.index());
}

void validate(const Gains& gains) {
  std::visit([](const auto& g) { g.validate(); }, gains);
}

PGains ideal_pd_equivalent(const FdpdGains& gains) {
  return PGains{gains.f, gains.g, gains.f0, gains.kd};
}

PGains zero_filter_equivalent(const DapiGains& gains) {
  return PGains{gains.f, gains.g, gains.ki, gains.g0};
}

DapiGains power_preset(double m, double d, double b, double l, double ki, double c) {
  require_positive(m, "inertia m");
  require_positive(d, "damping d");
  require_positive(l, "edge weight l");
  require_nonneg(b, "susceptance b");
  DapiGains gains{b / (l * m), 0.0, d / m, ki, c};
  gains.validate();
  return gains;
}

PGains power_droop(double m, double d, double b, double l) {
  require_positive(m, "inertia m");
  require_positive(d, "damping d");
  require_positive(l, "edge weight l");
  require_positive(b, "susceptance b");
  return PGains{b / (l * m), 0.0, 0.0, d / m};
}

ClosedLoopSystem assemble_p(const WeightedGraph& graph, const PGains& gains) {
  gains.validate();
  require_connected(graph);
  const int n = graph.node_count();
  const Eigen::MatrixXd lap = laplacian(graph);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.block(0, n, n, n) = eye;
  a.block(n, 0, n, n) = -gains.f * lap - gains.f0 * eye;
  a.block(n, n, n, n) = -gains.g * lap - gains.g0 * eye;
  return {ControllerKind::P, n, std::move(a), input_matrix(n, 2), output_matrix(n, 2)};
}

ClosedLoopSystem assemble_dapi(const WeightedGraph& graph, const DapiGains& gains) {
  gains.validate();
  require_connected(graph);
  const int n = graph.node_count();
  const Eigen::MatrixXd lap = laplacian(graph);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  a.block(0, n, n, n) = eye;
  a.block(n, 0, n, n) = -gains.f * lap;
  a.block(n, n, n, n) = -gains.g * lap - gains.g0 * eye;
  a.block(n, 2 * n, n, n) = gains.ki * eye;
  a.block(2 * n, n, n, n) = -eye;
  a.block(2 * n, 2 * n, n, n) = -gains.c * lap;
  return {ControllerKind::Dapi, n, std::move(a), input_matrix(n, 3), output_matrix(n, 3)};
}

ClosedLoopSystem assemble_fdpd(const WeightedGraph& graph, const FdpdGains& gains) {
  gains.validate();
  if (gains.ideal()) {
    throw IdealPdRedirect("F-DPD with tau = 0 is ideal PD; use P control with g0 = K_D");
  }
  require_connected(graph);
  const int n = graph.node_count();
  const Eigen::MatrixXd lap = laplacian(graph);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  a.block(0, n, n, n) = eye;
  a.block(n, 0, n, n) = -gains.f * lap - gains.f0 * eye;
  a.block(n, n, n, n) = -gains.g * lap;
  a.block(n, 2 * n, n, n) = eye;
  a.block(2 * n, n, n, n) = -(gains.kd / gains.tau) * eye;
  a.block(2 * n, 2 * n, n, n) = -(1.0 / gains.tau) * eye;
  return {ControllerKind::Fdpd, n, std::move(a), input_matrix(n, 3), output_matrix(n, 3)};
}

ClosedLoopSystem assemble(const WeightedGraph& graph, const Gains& gains) {
  return std::visit(
      [&](const auto& g) -> ClosedLoopSystem {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PGains>) return assemble_p(graph, g);
        else if constexpr (std::is_same_v<T, DapiGains>) return assemble_dapi(graph, g);
        else return assemble_fdpd(graph, g);
      },
      gains);
}

Eigen::MatrixXd average_complement_basis(int n) {
  if (n < 2) throw InvalidSizeError("average complement needs N >= 2");
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(ones);
  const Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - 1);
}

DeflatedSystem deflate_average_mode(const ClosedLoopSystem& sys) {
  const int n = sys.n;
  const int blocks = sys.blocks();
  const Eigen::MatrixXd basis = average_complement_basis(n);
  const Eigen::VectorXd unit_avg = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(n));

  Eigen::MatrixXd keep = Eigen::MatrixXd::Zero(blocks * n, blocks * (n - 1));
  Eigen::MatrixXd drop = Eigen::MatrixXd::Zero(blocks * n, blocks);
  for (int k = 0; k < blocks; ++k) {
    keep.block(k * n, k * (n - 1), n, n - 1) = basis;
    drop.block(k * n, k, n, 1) = unit_avg;
  }

  const double scale = std::max(1.0, sys.a.cwiseAbs().maxCoeff());
  const double tol = 1e-10 * scale;
  if ((keep.transpose() * sys.a * drop).cwiseAbs().maxCoeff() > tol ||
      (drop.transpose() * sys.a * keep).cwiseAbs().maxCoeff() > tol) {
    throw NumericalError("network-average subspace is not invariant under A");
  }
  if ((sys.c * drop).cwiseAbs().maxCoeff() > 1e-12) {
    throw NumericalError("network-average subspace is observable from the output");
  }
  return {keep.transpose() * sys.a * keep, keep.transpose() * sys.b, sys.c * keep};
}

ModalSubsystem modal_subsystem(const Gains& gains, double lambda, int index) {
  if (!(lambda >= 0.0)) throw InvalidParameterError("mode eigenvalue must be >= 0");
  validate(gains);
  const ControllerKind kind = kind_of(gains);

  Eigen::MatrixXd a;
  if (const auto* p = std::get_if<PGains>(&gains)) {
    a.resize(2, 2);
    a << 0.0, 1.0,
        -p->f * lambda - p->f0, -p->g * lambda - p->g0;
  } else if (const auto* d = std::get_if<DapiGains>(&gains)) {
    a.resize(3, 3);
    a << 0.0, 1.0, 0.0,
        -d->f * lambda, -d->g * lambda - d->g0, d->ki,
        0.0, -1.0, -d->c * lambda;
  } else {
    const auto& fd = std::get<FdpdGains>(gains);
    if (fd.ideal()) {
      throw IdealPdRedirect("F-DPD with tau = 0 is ideal PD; use P control with g0 = K_D");
    }
    a.resize(3, 3);
    a << 0.0, 1.0, 0.0,
        -fd.f * lambda - fd.f0, -fd.g * lambda, 1.0,
        0.0, -fd.kd / fd.tau, -1.0 / fd.tau;
  }

  const int dim = static_cast<int>(a.rows());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  b(1) = 1.0;
  Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(dim);
  c(0) = 1.0;
  return {kind, index, lambda, std::move(a), std::move(b), std::move(c)};
}

std::vector<double> characteristic_coefficients(const Eigen::MatrixXd& a) {
  if (a.rows() == 2 && a.cols() == 2) {
    return {-a.trace(), a.determinant()};
  }
  if (a.rows() == 3 && a.cols() == 3) {
    // Sum of principal 2x2 minors.
    const double minors = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) +
                          a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0) +
                          a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    return {-a.trace(), minors, -a.determinant()};
  }
  throw InvalidSizeError("characteristic polynomial supports 2x2 and 3x3 only");
}

bool routh_hurwitz(const std::vector<double>& coefficients) {
  if (coefficients.size() == 2) {
    return coefficients[0] > 0.0 && coefficients[1] > 0.0;
  }
  if (coefficients.size() == 3) {
    const double a2 = coefficients[0];
    const double a1 = coefficients[1];
    const double a0 = coefficients[2];
    return a2 > 0.0 && a0 > 0.0 && a2 * a1 > a0;
  }
  throw InvalidSizeError("Routh-Hurwitz implemented for degree 2 and 3");
}

double stability_epsilon(const Eigen::VectorXcd& eigenvalues) {
  return 1e-10 * eigenvalues.cwiseAbs().maxCoeff();
}

bool is_stable_mode(const ModalSubsystem& sub) {
  switch (sub.kind) {
    case ControllerKind::P:
      // xi^2 + (g0 + g lambda) xi + (f0 + f lambda)
      return -sub.a(1, 1) > 0.0 && -sub.a(1, 0) > 0.0;
    case ControllerKind::Fdpd:
      return routh_hurwitz(characteristic_coefficients(sub.a));
    case ControllerKind::Dapi: {
      Eigen::EigenSolver<Eigen::MatrixXd> solver(sub.a, false);
      if (solver.info() != Eigen::Success) return false;
      const Eigen::VectorXcd values = solver.eigenvalues();
      const double eps = stability_epsilon(values);
      return (values.real().array() < -eps).all();
    }
  }
  return false;
}

}  // namespace coherence
