#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coherence/closed_loop.hpp"
#include "coherence/graph.hpp"

namespace coherence {

enum class GraphFamily { Path, Ring, Torus, Complete };

std::optional<GraphFamily> parse_graph_family(std::string_view name);
std::string_view to_string(GraphFamily family);

struct FamilySpec {
  GraphFamily family = GraphFamily::Ring;
  int torus_dim = 1;
  double weight = 1.0;
};

/// Node count for a sweep parameter (side^d for tori, the parameter itself
/// otherwise). Throws InvalidSizeError for sizes the family cannot build.
int family_node_count(const FamilySpec& family, int size);

/// Analytic spectrum for a sweep parameter.
LaplacianSpectrum family_spectrum(const FamilySpec& family, int size);
/// Explicit graph for a sweep parameter.
WeightedGraph family_graph(const FamilySpec& family, int size);

struct ScalingPoint {
  int size;                     // sweep parameter
  int n;                        // node count
  std::optional<double> v_n;    // empty when the variance is unbounded
};

struct ScalingResult {
  FamilySpec family;
  Gains gains;
  std::vector<ScalingPoint> points;
  std::optional<double> fitted_exponent;
  std::pair<int, int> fit_window;  // node-count range [lo, hi]
};

/// Upper half of the sweep: from the node count at index size/2 to the last.
std::pair<int, int> default_fit_window(std::span<const ScalingPoint> points);

/// Least-squares slope of log V_N against log N over points whose node count
/// lies in `window`. Throws FitError with fewer than four finite points.
double fit_exponent(std::span<const ScalingPoint> points, std::pair<int, int> window);

/// Sweeps the closed-form V_N over ascending sizes. Unbounded configurations
/// become empty points. The exponent is fitted when the window holds at least
/// four finite points.
ScalingResult run_scaling(const FamilySpec& family, const Gains& gains,
                          const std::vector<int>& sizes,
                          std::optional<std::pair<int, int>> window = {});

/// "a,b,c" or "geometric:start:stop:factor" (integer factor > 1).
std::vector<int> parse_sizes(std::string_view text);

/// "N,V_N,bounded,exponent_window_flag".
std::string to_csv(const ScalingResult& result);

}  // namespace coherence
