#include "coherence/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "coherence/errors.hpp"
#include "coherence/h2.hpp"
#include "compensated_sum.hpp"

namespace coherence {

namespace {

void require_connected(const LaplacianSpectrum& spec) {
  if (!spec.connected()) throw TopologyError("tuning requires a connected spectrum");
}

double dapi_vn_at(const LaplacianSpectrum& spec, DapiGains gains, double c) {
  gains.c = c;
  return vn_value(spec, gains);
}

}  // namespace

std::string_view to_string(CStarVerdict verdict) {
  switch (verdict) {
    case CStarVerdict::PositiveOptimum:
      return "positive_optimum";
    case CStarVerdict::ZeroOptimum:
      return "zero_optimum";
    case CStarVerdict::Indeterminate:
      return "indeterminate";
  }
  return "unknown";
}

CStarClassification classify_c_star(const LaplacianSpectrum& spec, const DapiGains& gains) {
  require_connected(spec);
  CStarClassification result{CStarVerdict::Indeterminate, {}};
  result.witness.reserve(spec.size() - 1);
  bool all = true;
  bool none = true;
  for (int k = 1; k < spec.size(); ++k) {
    const double lambda = spec.eigenvalues[k];
    const double damping = gains.g * lambda + gains.g0;
    const bool holds = gains.f > damping * damping / lambda;
    result.witness.push_back(holds);
    all = all && holds;
    none = none && !holds;
  }
  if (all) result.verdict = CStarVerdict::PositiveOptimum;
  else if (none) result.verdict = CStarVerdict::ZeroOptimum;
  return result;
}

double c_star_complete(int n, double l, double f, double g, double g0) {
  const double lambda = n * l;
  return std::max(0.0, std::sqrt(f / lambda) - g + g0 / lambda);
}

double c_star_complete_stationary(int n, double l, double f, double g, double g0) {
  const double lambda = n * l;
  return std::max(0.0, std::sqrt(f / lambda) - g - g0 / lambda);
}

double default_bracket_hi(const LaplacianSpectrum& spec, const DapiGains& gains) {
  require_connected(spec);
  const double l2 = spec.algebraic_connectivity();
  return 10.0 * (std::sqrt(gains.f / l2) + gains.g + gains.g0 / l2);
}

CStarResult c_star_numeric(const LaplacianSpectrum& spec, const DapiGains& gains,
                           ScalarSearchConfig cfg) {
  require_connected(spec);
  gains.validate();
  if (!(cfg.abs_tolerance > 0.0)) throw InvalidParameterError("abs_tolerance must be > 0");
  if (cfg.grid_points < 3) throw InvalidParameterError("grid_points must be >= 3");
  const double hi = cfg.bracket_hi > 0.0 ? cfg.bracket_hi : default_bracket_hi(spec, gains);

  CStarResult result{0.0, 0.0, hi, 0, {}};
  result.grid.reserve(cfg.grid_points);
  result.grid.emplace_back(0.0, dapi_vn_at(spec, gains, 0.0));
  const int log_points = cfg.grid_points - 1;
  for (int k = 0; k < log_points; ++k) {
    const double exponent = -6.0 * (1.0 - static_cast<double>(k) / (log_points - 1));
    const double c = hi * std::pow(10.0, exponent);
    result.grid.emplace_back(c, dapi_vn_at(spec, gains, c));
  }

  std::size_t best = result.grid.size();
  for (std::size_t k = 0; k < result.grid.size(); ++k) {
    const double v = result.grid[k].second;
    if (std::isfinite(v) && (best == result.grid.size() || v < result.grid[best].second)) {
      best = k;
    }
  }
  if (best == result.grid.size()) {
    throw SearchError("no finite DAPI variance on [0, " + std::to_string(hi) + "]");
  }

  double lo = result.grid[best == 0 ? 0 : best - 1].first;
  double up = result.grid[std::min(best + 1, result.grid.size() - 1)].first;
  const auto eval = [&](double c) {
    const double v = dapi_vn_at(spec, gains, c);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  const double inv_phi = 1.0 / std::numbers::phi;
  double x1 = up - inv_phi * (up - lo);
  double x2 = lo + inv_phi * (up - lo);
  double f1 = eval(x1);
  double f2 = eval(x2);
  int iterations = 0;
  while (up - lo > cfg.abs_tolerance) {
    if (++iterations > cfg.max_iterations) {
      throw ConvergenceError("golden-section search exceeded " +
                             std::to_string(cfg.max_iterations) + " iterations");
    }
    if (f1 <= f2) {
      up = x2;
      x2 = x1;
      f2 = f1;
      x1 = up - inv_phi * (up - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (up - lo);
      f2 = eval(x2);
    }
  }

  result.iterations = iterations;
  result.c_star = 0.5 * (lo + up);
  result.v_star = eval(result.c_star);
  // The bracket endpoints can beat the midpoint on a boundary optimum.
  if (const double v_lo = eval(lo); v_lo < result.v_star) {
    result.c_star = lo;
    result.v_star = v_lo;
  }
  return result;
}

double fdpd_dv_dtau(const LaplacianSpectrum& spec, const FdpdGains& gains) {
  gains.validate();
  const int n = spec.size();
  if (n < 2) throw InvalidSizeError("derivative needs at least two nodes");
  const double f = gains.f;
  const double g = gains.g;
  const double f0 = gains.f0;
  const double kd = gains.kd;
  const double tau = gains.tau;
  detail::CompensatedSum total;
  for (int k = 1; k < n; ++k) {
    const double l = spec.eigenvalues[k];
    const double den = g * g * l * l * tau + f * g * l * l * tau * tau +
                       f0 * g * l * tau * tau + kd * g * l * tau + g * l + kd;
    total.add(kd * tau * (g * l * tau + 2.0) / (den * den));
  }
  return total.value() / (2.0 * n);
}

}  // namespace coherence
