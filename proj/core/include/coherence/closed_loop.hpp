#pragma once

#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "coherence/graph.hpp"

namespace coherence {

enum class ControllerKind { P, Dapi, Fdpd };

std::string_view to_string(ControllerKind kind);

/// Static consensus feedback: relative gains f, g scale the Laplacian,
/// absolute gains f0, g0 act on each agent's own position and velocity.
struct PGains {
  double f = 0.0;
  double g = 0.0;
  double f0 = 0.0;
  double g0 = 0.0;

  /// Throws InvalidParameterError when any gain is negative or non-finite.
  void validate() const;
  bool operator==(const PGains&) const = default;
};

/// Distributed averaging PI control. `c` is the averaging-filter gain on the
/// integral states (c = 0 is accepted and gives ideal integral action).
struct DapiGains {
  double f = 0.0;
  double g = 0.0;
  double g0 = 0.0;
  double ki = 0.0;
  double c = 0.0;

  void validate() const;
  bool operator==(const DapiGains&) const = default;
};

/// Filtered distributed PD control with first-order filter time constant tau.
/// tau = 0 is the ideal PD law, which is P control with g0 = kd.
struct FdpdGains {
  double f = 0.0;
  double g = 0.0;
  double f0 = 0.0;
  double kd = 0.0;
  double tau = 0.0;

  void validate() const;
  bool ideal() const noexcept { return tau == 0.0; }
  bool operator==(const FdpdGains&) const = default;
};

using Gains = std::variant<PGains, DapiGains, FdpdGains>;

ControllerKind kind_of(const Gains& gains);
void validate(const Gains& gains);

/// P gains equivalent to F-DPD with tau = 0.
PGains ideal_pd_equivalent(const FdpdGains& gains);
/// P gains equivalent to DAPI with c = 0 (K_I takes the role of f0).
PGains zero_filter_equivalent(const DapiGains& gains);

/// Linearized swing-equation mapping: inertia m, damping d, line susceptance b
/// over edge weight l. Returns DAPI gains f = b/(l m), g = 0, g0 = d/m.
DapiGains power_preset(double m, double d, double b, double l, double ki, double c);
/// The same network without the integral loop (frequency droop only).
PGains power_droop(double m, double d, double b, double l);

/// Full closed loop x' = A x + B w, y = C x with states stacked by block
/// ([x; v] or [x; v; z]) and y the deviation of x from its network average.
struct ClosedLoopSystem {
  ControllerKind kind;
  int n;
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;

  int blocks() const noexcept { return kind == ControllerKind::P ? 2 : 3; }
  int state_dim() const noexcept { return blocks() * n; }
};

ClosedLoopSystem assemble_p(const WeightedGraph& graph, const PGains& gains);
ClosedLoopSystem assemble_dapi(const WeightedGraph& graph, const DapiGains& gains);
/// Throws IdealPdRedirect for tau == 0.
ClosedLoopSystem assemble_fdpd(const WeightedGraph& graph, const FdpdGains& gains);
ClosedLoopSystem assemble(const WeightedGraph& graph, const Gains& gains);

/// Orthonormal basis (N x N-1) of the complement of the all-ones vector.
Eigen::MatrixXd average_complement_basis(int n);

/// Closed loop restricted to the complement of the network-average subspace
/// span{e_k (x) 1}. That subspace is A-invariant, its orthogonal complement is
/// too, and C annihilates it, so the restriction keeps the input-output map.
struct DeflatedSystem {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
};

/// Throws NumericalError if the average subspace is not invariant or is seen
/// by the output.
DeflatedSystem deflate_average_mode(const ClosedLoopSystem& sys);

/// One decoupled modal block for Laplacian eigenvalue lambda.
struct ModalSubsystem {
  ControllerKind kind;
  int index;  // 1-based mode number
  double lambda;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::RowVectorXd c;
};

/// Throws IdealPdRedirect for F-DPD with tau == 0.
ModalSubsystem modal_subsystem(const Gains& gains, double lambda, int index);

/// Monic characteristic polynomial coefficients of a 2x2 or 3x3 matrix,
/// highest degree first after the implicit leading 1: {a1, a0} or {a2, a1, a0}.
std::vector<double> characteristic_coefficients(const Eigen::MatrixXd& a);

/// Routh-Hurwitz for monic polynomials of degree 2 or 3.
bool routh_hurwitz(const std::vector<double>& coefficients);

/// Stability margin used for numerical checks: 1e-10 * spectral radius.
double stability_epsilon(const Eigen::VectorXcd& eigenvalues);

/// P: positivity of both coefficients. F-DPD: Routh-Hurwitz on the cubic.
/// DAPI: every eigenvalue has real part below -stability_epsilon.
bool is_stable_mode(const ModalSubsystem& sub);

}  // namespace coherence
