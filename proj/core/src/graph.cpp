#include "coherence/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

#include <Eigen/Eigenvalues>

#include "coherence/errors.hpp"

namespace coherence {

namespace {

void require_weight(double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw InvalidParameterError("edge weight must be positive and finite");
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    const auto start = s.find_first_not_of(" \t\r", pos);
    if (start == std::string_view::npos) break;
    auto end = s.find_first_of(" \t\r", start);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(start, end - start));
    pos = end;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view token, T& out) {
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

WeightedGraph::WeightedGraph(int node_count, std::vector<Edge> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ < 1) {
    throw InvalidSizeError("graph needs at least one node");
  }
  for (auto& e : edges_) {
    if (e.u == e.v) {
      throw GraphInvariantError("self-loop on node " + std::to_string(e.u + 1));
    }
    if (e.u < 0 || e.v < 0 || e.u >= node_count_ || e.v >= node_count_) {
      throw GraphInvariantError("edge endpoint out of range");
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw GraphInvariantError("edge weight must be positive and finite");
    }
    if (e.u > e.v) std::swap(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });
  const auto dup = std::adjacent_find(
      edges_.begin(), edges_.end(),
      [](const Edge& a, const Edge& b) { return a.u == b.u && a.v == b.v; });
  if (dup != edges_.end()) {
    throw GraphInvariantError("duplicate edge (" + std::to_string(dup->u + 1) +
                              ", " + std::to_string(dup->v + 1) + ")");
  }
}

std::vector<double> WeightedGraph::degrees() const {
  std::vector<double> deg(node_count_, 0.0);
  for (const auto& e : edges_) {
    deg[e.u] += e.weight;
    deg[e.v] += e.weight;
  }
  return deg;
}

std::vector<int> WeightedGraph::neighbor_counts() const {
  std::vector<int> count(node_count_, 0);
  for (const auto& e : edges_) {
    ++count[e.u];
    ++count[e.v];
  }
  return count;
}

WeightedGraph build_path(int n, double weight) {
  if (n < 2) throw InvalidSizeError("path graph needs N >= 2");
  require_weight(weight);
  std::vector<Edge> edges;
  edges.reserve(n - 1);
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph build_ring(int n, double weight) {
  if (n < 3) throw InvalidSizeError("ring graph needs N >= 3");
  require_weight(weight);
  std::vector<Edge> edges;
  edges.reserve(n);
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, weight});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph build_torus(int side, int dim, double weight) {
  if (side < 3) throw InvalidSizeError("torus side must be >= 3");
  if (dim < 1 || dim > 3) throw InvalidSizeError("torus dimension must be 1, 2 or 3");
  require_weight(weight);

  int n = 1;
  for (int k = 0; k < dim; ++k) n *= side;

  // Stride of coordinate k in the row-major node index.
  std::vector<int> stride(dim, 1);
  for (int k = dim - 2; k >= 0; --k) stride[k] = stride[k + 1] * side;

  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * dim);
  for (int node = 0; node < n; ++node) {
    for (int k = 0; k < dim; ++k) {
      const int coord = (node / stride[k]) % side;
      const int next = node + (((coord + 1) % side) - coord) * stride[k];
      edges.push_back({node, next, weight});
    }
  }
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph build_complete(int n, double weight) {
  if (n < 2) throw InvalidSizeError("complete graph needs N >= 2");
  require_weight(weight);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j, weight});
  return WeightedGraph(n, std::move(edges));
}

WeightedGraph parse_edge_list(std::string_view text) {
  std::optional<int> n;
  std::vector<Edge> edges;
  std::set<std::pair<int, int>> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    const auto tokens = split_ws(line);
    if (!n) {
      int value = 0;
      if (tokens.size() != 1 || !parse_number(tokens[0], value)) {
        throw ParseError(line_no, "expected node count");
      }
      if (value < 1) throw ParseError(line_no, "node count must be positive");
      n = value;
      continue;
    }

    int i = 0;
    int j = 0;
    double w = 0.0;
    if (tokens.size() != 3 || !parse_number(tokens[0], i) ||
        !parse_number(tokens[1], j) || !parse_number(tokens[2], w)) {
      throw ParseError(line_no, "expected \"i j w\"");
    }
    if (i < 1 || j < 1 || i > *n || j > *n) {
      throw ParseError(line_no, "node index out of range 1.." + std::to_string(*n));
    }
    if (i == j) throw ParseError(line_no, "self-loop on node " + std::to_string(i));
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ParseError(line_no, "edge weight must be positive");
    }
    const auto key = std::minmax(i, j);
    if (!seen.insert(key).second) {
      throw ParseError(line_no, "duplicate edge (" + std::to_string(key.first) +
                                    ", " + std::to_string(key.second) + ")");
    }
    edges.push_back({i - 1, j - 1, w});
  }
  if (!n) throw ParseError(line_no, "missing node count");
  return WeightedGraph(*n, std::move(edges));
}

std::string to_edge_list(const WeightedGraph& graph) {
  std::ostringstream out;
  out.precision(17);
  out << graph.node_count() << '\n';
  for (const auto& e : graph.edges()) {
    out << e.u + 1 << ' ' << e.v + 1 << ' ' << e.weight << '\n';
  }
  return out.str();
}

Eigen::MatrixXd laplacian(const WeightedGraph& graph) {
  const int n = graph.node_count();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : graph.edges()) {
    lap(e.u, e.v) -= e.weight;
    lap(e.v, e.u) -= e.weight;
    lap(e.u, e.u) += e.weight;
    lap(e.v, e.v) += e.weight;
  }
  return lap;
}

bool is_connected(const WeightedGraph& graph) {
  const int n = graph.node_count();
  std::vector<std::vector<int>> adjacency(n);
  for (const auto& e : graph.edges()) {
    adjacency[e.u].push_back(e.v);
    adjacency[e.v].push_back(e.u);
  }
  std::vector<bool> visited(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  visited[0] = true;
  int reached = 1;
  while (!frontier.empty()) {
    const int node = frontier.front();
    frontier.pop();
    for (int next : adjacency[node]) {
      if (!visited[next]) {
        visited[next] = true;
        ++reached;
        frontier.push(next);
      }
    }
  }
  return reached == n;
}

double default_zero_tolerance(double largest_eigenvalue) {
  return 1e-9 * std::max(1.0, largest_eigenvalue);
}

LaplacianSpectrum make_spectrum(std::vector<double> eigenvalues,
                                std::optional<double> zero_tolerance) {
  if (eigenvalues.empty()) throw InvalidSizeError("empty spectrum");
  std::sort(eigenvalues.begin(), eigenvalues.end());
  const double tol = zero_tolerance.value_or(default_zero_tolerance(eigenvalues.back()));
  if (!(tol > 0.0)) throw InvalidParameterError("zero_tolerance must be positive");
  if (eigenvalues.front() < -tol) {
    throw NumericalError("Laplacian eigenvalue below -zero_tolerance");
  }
  if (std::abs(eigenvalues.front()) > tol) {
    throw NumericalError("smallest Laplacian eigenvalue is not zero");
  }
  eigenvalues.front() = 0.0;
  return LaplacianSpectrum{std::move(eigenvalues), tol};
}

LaplacianSpectrum spectrum(const WeightedGraph& graph,
                           std::optional<double> zero_tolerance) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian(graph),
                                                         Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  const auto& values = solver.eigenvalues();
  return make_spectrum(std::vector<double>(values.data(), values.data() + values.size()),
                       zero_tolerance);
}

LaplacianSpectrum path_spectrum(int n, double weight) {
  if (n < 2) throw InvalidSizeError("path graph needs N >= 2");
  require_weight(weight);
  std::vector<double> values(n);
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * k / (2.0 * n));
    values[k] = 4.0 * weight * s * s;
  }
  return make_spectrum(std::move(values));
}

LaplacianSpectrum ring_spectrum(int n, double weight) {
  if (n < 3) throw InvalidSizeError("ring graph needs N >= 3");
  require_weight(weight);
  std::vector<double> values(n);
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * k / n);
    values[k] = 4.0 * weight * s * s;
  }
  return make_spectrum(std::move(values));
}

LaplacianSpectrum torus_spectrum(int side, int dim, double weight) {
  if (side < 3) throw InvalidSizeError("torus side must be >= 3");
  if (dim < 1 || dim > 3) throw InvalidSizeError("torus dimension must be 1, 2 or 3");
  const auto ring = ring_spectrum(side, weight).eigenvalues;
  std::vector<double> values{0.0};
  for (int k = 0; k < dim; ++k) {
    std::vector<double> next;
    next.reserve(values.size() * ring.size());
    for (double a : values)
      for (double b : ring) next.push_back(a + b);
    values = std::move(next);
  }
  return make_spectrum(std::move(values));
}

LaplacianSpectrum complete_spectrum(int n, double weight) {
  if (n < 2) throw InvalidSizeError("complete graph needs N >= 2");
  require_weight(weight);
  std::vector<double> values(n, n * weight);
  values[0] = 0.0;
  return make_spectrum(std::move(values));
}

}  // namespace coherence
