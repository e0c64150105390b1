#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "coherence/closed_loop.hpp"
#include "coherence/graph.hpp"

namespace coherence {

enum class CStarVerdict { PositiveOptimum, ZeroOptimum, Indeterminate };

std::string_view to_string(CStarVerdict verdict);

/// Sign structure of dV/dc at c = 0. `witness[k]` holds the per-mode condition
/// f > (g lambda + g0)^2 / lambda for mode k + 2.
struct CStarClassification {
  CStarVerdict verdict;
  std::vector<bool> witness;
};

/// Ignores gains.c. Throws TopologyError for a disconnected spectrum.
CStarClassification classify_c_star(const LaplacianSpectrum& spec, const DapiGains& gains);

/// Complete-graph averaging gain max(0, sqrt(f/(N l)) - g + g0/(N l)).
///
/// Note that this is not where V_N is minimized when g0 > 0: the stationary
/// point of the complete-graph variance sits at c_star_complete_stationary(),
/// which is 2 g0 / (N l) lower.
double c_star_complete(int n, double l, double f, double g, double g0);

/// Positive root of c^2 + 2 (g + g0/lambda) c + (g + g0/lambda)^2 - f/lambda
/// with lambda = N l, clamped at 0. This is the exact minimizer of the DAPI
/// variance over c on a complete graph with uniform weights.
double c_star_complete_stationary(int n, double l, double f, double g, double g0);

struct ScalarSearchConfig {
  double bracket_hi = 0.0;  // <= 0 selects default_bracket_hi()
  double abs_tolerance = 1e-7;
  int max_iterations = 200;
  int grid_points = 64;
};

/// 10 * (sqrt(f/lambda_2) + g + g0/lambda_2).
double default_bracket_hi(const LaplacianSpectrum& spec, const DapiGains& gains);

struct CStarResult {
  double c_star;
  double v_star;
  double bracket_hi;
  int iterations;
  std::vector<std::pair<double, double>> grid;  // (c, V_N) pre-scan
};

/// Minimizes V_N^DAPI over c in [0, bracket_hi]: a grid scan (c = 0 plus a
/// log-spaced grid) seeds a golden-section search around the best grid point.
/// Throws SearchError when no grid value is finite and ConvergenceError when
/// max_iterations is exhausted before the bracket shrinks below abs_tolerance.
CStarResult c_star_numeric(const LaplacianSpectrum& spec, const DapiGains& gains,
                           ScalarSearchConfig cfg = {});

/// Derivative of the F-DPD variance with respect to the filter time constant:
/// (1/2N) sum_n K_D tau (g lambda tau + 2) / den_n^2 with
/// den_n = g^2 lambda^2 tau + f g lambda^2 tau^2 + f0 g lambda tau^2
///         + K_D g lambda tau + g lambda + K_D.
double fdpd_dv_dtau(const LaplacianSpectrum& spec, const FdpdGains& gains);

}  // namespace coherence
