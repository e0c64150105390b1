#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace coherence {

/// Undirected edge with 0-based endpoints, stored with `u < v`.
struct Edge {
  int u;
  int v;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph on nodes {0..N-1}. Each edge is stored once.
///
/// The constructor enforces the invariants: strictly positive finite weights,
/// no self-loops, no duplicate edges, endpoints in range. Edges are kept in
/// canonical (u < v) lexicographic order so that equal graphs compare equal.
class WeightedGraph {
 public:
  WeightedGraph(int node_count, std::vector<Edge> edges);

  int node_count() const noexcept { return node_count_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  /// Weighted degree (sum of incident weights) of every node.
  std::vector<double> degrees() const;
  /// Number of incident edges of every node.
  std::vector<int> neighbor_counts() const;

  friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

 private:
  int node_count_;
  std::vector<Edge> edges_;
};

WeightedGraph build_path(int n, double weight = 1.0);
WeightedGraph build_ring(int n, double weight = 1.0);
/// Torus Z_side^dim. Node ordering is row-major over lattice coordinates:
/// node = c_0 * side^(dim-1) + ... + c_{dim-1}.
WeightedGraph build_torus(int side, int dim, double weight = 1.0);
WeightedGraph build_complete(int n, double weight = 1.0);

/// Parses the edge-list format: first non-comment line is N, then one
/// "i j w" line per edge with 1-based indices. Blank lines and lines starting
/// with '#' are ignored. Throws ParseError carrying the offending line.
WeightedGraph parse_edge_list(std::string_view text);
std::string to_edge_list(const WeightedGraph& graph);

/// Dense weighted Laplacian.
Eigen::MatrixXd laplacian(const WeightedGraph& graph);

/// Breadth-first reachability from node 0.
bool is_connected(const WeightedGraph& graph);

/// Sorted Laplacian eigenvalues. eigenvalues[0] is exactly 0 whenever it was
/// within zero_tolerance of it.
struct LaplacianSpectrum {
  std::vector<double> eigenvalues;
  double zero_tolerance = 0.0;

  int size() const noexcept { return static_cast<int>(eigenvalues.size()); }
  double algebraic_connectivity() const { return eigenvalues.at(1); }
  bool connected() const {
    return eigenvalues.size() >= 2 && eigenvalues[1] > zero_tolerance;
  }
};

/// 1e-9 * max(1, largest eigenvalue).
double default_zero_tolerance(double largest_eigenvalue);

/// Sorts, validates and clamps raw eigenvalues. Throws NumericalError when any
/// eigenvalue is below -zero_tolerance.
LaplacianSpectrum make_spectrum(std::vector<double> eigenvalues,
                                std::optional<double> zero_tolerance = {});

/// Dense symmetric eigendecomposition of the Laplacian.
LaplacianSpectrum spectrum(const WeightedGraph& graph,
                           std::optional<double> zero_tolerance = {});

// Closed-form spectra of the structured families.
LaplacianSpectrum path_spectrum(int n, double weight = 1.0);
LaplacianSpectrum ring_spectrum(int n, double weight = 1.0);
LaplacianSpectrum torus_spectrum(int side, int dim, double weight = 1.0);
LaplacianSpectrum complete_spectrum(int n, double weight = 1.0);

}  // namespace coherence
