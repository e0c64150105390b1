#include "coherence/h2.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "coherence/errors.hpp"
#include "coherence/io.hpp"
#include "coherence/lyapunov.hpp"
#include "compensated_sum.hpp"

namespace coherence {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double reciprocal_or_inf(double denominator) {
  return denominator > 0.0 && std::isfinite(denominator) ? 1.0 / denominator : kInf;
}

template <typename Term>
VarianceReport sum_modes(const LaplacianSpectrum& spec, Term term) {
  const int n = spec.size();
  if (n < 2) throw InvalidSizeError("variance needs at least two nodes");
  VarianceReport report;
  report.per_mode.reserve(n - 1);
  detail::CompensatedSum total;
  for (int k = 1; k < n; ++k) {
    const double lambda = spec.eigenvalues[k];
    const double s = term(lambda);
    if (!std::isfinite(s)) {
      throw UnboundedVarianceError(
          "unbounded variance: mode " + std::to_string(k + 1) + " (lambda = " +
              format_double(lambda) + ") is marginal",
          k + 1);
    }
    report.per_mode.push_back({k + 1, lambda, s});
    total.add(s);
  }
  report.v_n = total.value() / (2.0 * n);
  return report;
}

bool all_modes_stable(const LaplacianSpectrum& spec, const Gains& gains) {
  for (int k = 1; k < spec.size(); ++k) {
    if (!is_stable_mode(modal_subsystem(gains, spec.eigenvalues[k], k + 1))) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(VarianceMethod method) {
  switch (method) {
    case VarianceMethod::ClosedForm:
      return "closed_form";
    case VarianceMethod::ModalLyapunov:
      return "modal_lyapunov";
    case VarianceMethod::FullLyapunov:
      return "full_lyapunov";
  }
  return "unknown";
}

double p_mode_term(double lambda, const PGains& gains) {
  return reciprocal_or_inf((gains.f0 + gains.f * lambda) * (gains.g0 + gains.g * lambda));
}

double dapi_mode_term(double lambda, const DapiGains& gains) {
  const double f = gains.f;
  const double g = gains.g;
  const double g0 = gains.g0;
  const double ki = gains.ki;
  const double c = gains.c;
  const double filter = f + c * g0 + c * lambda * (c + g);
  const double numerator =
      ki * f * (g0 + lambda * (c + g)) + g0 * f * lambda * (c * lambda * (c + g) + f + c * g0);
  if (!(filter > 0.0)) return kInf;
  return reciprocal_or_inf(f * g * lambda * lambda + numerator / filter);
}

double fdpd_mode_term(double lambda, const FdpdGains& gains) {
  const double stiffness = gains.f0 + gains.f * lambda;
  const double relative_damping = gains.g * lambda;
  const double tau = gains.tau;
  const double filter = tau * tau * stiffness + tau * relative_damping + 1.0;
  const double damping =
      relative_damping + gains.kd * (tau * relative_damping + 1.0) / filter;
  return reciprocal_or_inf(stiffness * damping);
}

double dapi_variance_bound(const DapiGains& gains) {
  return (gains.f + gains.c * gains.g0) / (2.0 * gains.ki * gains.f * gains.g0);
}

double fdpd_variance_bound(const FdpdGains& gains) {
  return (gains.tau * gains.tau * gains.f0 + 1.0) / (2.0 * gains.f0 * gains.kd);
}

VarianceReport vn_p(const LaplacianSpectrum& spec, const PGains& gains) {
  gains.validate();
  auto report = sum_modes(spec, [&](double l) { return p_mode_term(l, gains); });
  report.stable = true;  // finite terms imply both coefficients are positive
  return report;
}

VarianceReport vn_dapi(const LaplacianSpectrum& spec, const DapiGains& gains) {
  gains.validate();
  auto report = sum_modes(spec, [&](double l) { return dapi_mode_term(l, gains); });
  report.bound = dapi_variance_bound(gains);
  report.stable = all_modes_stable(spec, gains);
  return report;
}

VarianceReport vn_fdpd(const LaplacianSpectrum& spec, const FdpdGains& gains) {
  gains.validate();
  auto report = sum_modes(spec, [&](double l) { return fdpd_mode_term(l, gains); });
  report.bound = fdpd_variance_bound(gains);
  report.stable = gains.ideal() ? true : all_modes_stable(spec, gains);
  return report;
}

VarianceReport vn_closed_form(const LaplacianSpectrum& spec, const Gains& gains) {
  return std::visit(
      [&](const auto& g) -> VarianceReport {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, PGains>) return vn_p(spec, g);
        else if constexpr (std::is_same_v<T, DapiGains>) return vn_dapi(spec, g);
        else return vn_fdpd(spec, g);
      },
      gains);
}

double vn_value(const LaplacianSpectrum& spec, const Gains& gains) {
  const int n = spec.size();
  detail::CompensatedSum total;
  std::visit(
      [&](const auto& g) {
        using T = std::decay_t<decltype(g)>;
        for (int k = 1; k < n; ++k) {
          const double l = spec.eigenvalues[k];
          if constexpr (std::is_same_v<T, PGains>) total.add(p_mode_term(l, g));
          else if constexpr (std::is_same_v<T, DapiGains>) total.add(dapi_mode_term(l, g));
          else total.add(fdpd_mode_term(l, g));
        }
      },
      gains);
  const double v = total.value() / (2.0 * n);
  return std::isfinite(v) ? v : kInf;
}

VarianceReport vn_modal_oracle(const LaplacianSpectrum& spec, const Gains& gains) {
  validate(gains);
  Gains effective = gains;
  if (const auto* fd = std::get_if<FdpdGains>(&gains); fd && fd->ideal()) {
    effective = ideal_pd_equivalent(*fd);
  }

  const int n = spec.size();
  if (n < 2) throw InvalidSizeError("variance needs at least two nodes");
  VarianceReport report;
  report.method = VarianceMethod::ModalLyapunov;
  detail::CompensatedSum total;
  for (int k = 1; k < n; ++k) {
    const auto sub = modal_subsystem(effective, spec.eigenvalues[k], k + 1);
    if (!is_stable_mode(sub)) {
      throw InstabilityError("mode " + std::to_string(k + 1) + " is not Hurwitz", k + 1);
    }
    const Eigen::MatrixXd observability = sub.c.transpose() * sub.c;
    const Eigen::MatrixXd p = solve_lyapunov(sub.a, observability);
    const double s = 2.0 * sub.b.dot(p * sub.b);
    report.per_mode.push_back({k + 1, sub.lambda, s});
    total.add(s);
  }
  report.v_n = total.value() / (2.0 * n);
  if (const auto* d = std::get_if<DapiGains>(&gains)) report.bound = dapi_variance_bound(*d);
  if (const auto* fd = std::get_if<FdpdGains>(&gains)) report.bound = fdpd_variance_bound(*fd);
  return report;
}

VarianceReport vn_full_oracle(const ClosedLoopSystem& sys, int max_nodes) {
  if (sys.n > max_nodes) {
    throw InvalidSizeError("full Lyapunov oracle limited to N <= " + std::to_string(max_nodes));
  }
  const auto deflated = deflate_average_mode(sys);
  const Eigen::MatrixXd observability = deflated.c.transpose() * deflated.c;
  const Eigen::MatrixXd p = solve_lyapunov_schur(deflated.a, observability);

  VarianceReport report;
  report.method = VarianceMethod::FullLyapunov;
  report.v_n = (deflated.b.transpose() * p * deflated.b).trace() / sys.n;
  return report;
}

std::string to_csv(const VarianceReport& report) {
  std::ostringstream out;
  out << "n,lambda,s_n\n";
  for (const auto& m : report.per_mode) {
    out << m.index << ',' << format_double(m.lambda) << ',' << format_double(m.s) << '\n';
  }
  out << "V_N," << format_double(report.v_n) << '\n';
  out << "bound," << (report.bound ? format_double(*report.bound) : std::string("none"))
      << '\n';
  return out.str();
}

}  // namespace coherence
