#pragma once

#include <optional>
#include <string>
#include <vector>

#include "coherence/closed_loop.hpp"
#include "coherence/graph.hpp"

namespace coherence {

enum class VarianceMethod { ClosedForm, ModalLyapunov, FullLyapunov };

std::string_view to_string(VarianceMethod method);

struct ModeContribution {
  int index;  // 1-based
  double lambda;
  double s;   // twice the squared H2 norm of the mode
};

/// Per-node steady-state variance V_N of the centered positions.
///
/// For modal methods v_n == sum(per_mode.s) / (2N). `bound` carries the
/// N-independent upper bound for DAPI and F-DPD. `stable` reports whether
/// every mode n >= 2 is asymptotically stable (DAPI with c = 0 has a finite
/// variance while each mode keeps an uncontrollable integrator).
struct VarianceReport {
  double v_n = 0.0;
  std::vector<ModeContribution> per_mode;
  std::optional<double> bound;
  VarianceMethod method = VarianceMethod::ClosedForm;
  bool stable = true;
};

// Per-mode terms s_n of the closed forms. They return +infinity when the
// mode's denominator is not positive (a marginal observable mode).
double p_mode_term(double lambda, const PGains& gains);
double dapi_mode_term(double lambda, const DapiGains& gains);
double fdpd_mode_term(double lambda, const FdpdGains& gains);

/// N-independent upper bounds (f + c g0) / (2 K_I f g0) and
/// (tau^2 f0 + 1) / (2 f0 K_D).
double dapi_variance_bound(const DapiGains& gains);
double fdpd_variance_bound(const FdpdGains& gains);

/// Closed forms. Each throws UnboundedVarianceError naming the first mode whose
/// term is not finite.
VarianceReport vn_p(const LaplacianSpectrum& spec, const PGains& gains);
VarianceReport vn_dapi(const LaplacianSpectrum& spec, const DapiGains& gains);
/// tau = 0 evaluates the ideal PD limit directly.
VarianceReport vn_fdpd(const LaplacianSpectrum& spec, const FdpdGains& gains);
VarianceReport vn_closed_form(const LaplacianSpectrum& spec, const Gains& gains);

/// Scalar V_N from the closed forms without building a report. Returns
/// +infinity instead of throwing for unbounded configurations.
double vn_value(const LaplacianSpectrum& spec, const Gains& gains);

/// Sums tr(B_n^T P_n B_n) over modes n >= 2, P_n from the per-mode Lyapunov
/// equation. Throws InstabilityError naming the first non-Hurwitz mode.
VarianceReport vn_modal_oracle(const LaplacianSpectrum& spec, const Gains& gains);

inline constexpr int kDefaultFullOracleLimit = 64;

/// Lyapunov solve on the whole closed loop after removing the network-average
/// subspace. Throws InvalidSizeError above `max_nodes`.
VarianceReport vn_full_oracle(const ClosedLoopSystem& sys,
                              int max_nodes = kDefaultFullOracleLimit);

/// "n,lambda,s_n" rows followed by "V_N,<value>" and "bound,<value|none>".
std::string to_csv(const VarianceReport& report);

}  // namespace coherence
