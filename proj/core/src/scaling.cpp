#include "coherence/scaling.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "coherence/errors.hpp"
#include "coherence/h2.hpp"
#include "coherence/io.hpp"

namespace coherence {

namespace {

int parse_int(std::string_view token) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ParseError(0, "invalid integer '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(sep, pos);
    parts.push_back(text.substr(pos, next == std::string_view::npos ? next : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

bool in_window(int n, std::pair<int, int> window) {
  return n >= window.first && n <= window.second;
}

}  // namespace

std::optional<GraphFamily> parse_graph_family(std::string_view name) {
  if (name == "path") return GraphFamily::Path;
  if (name == "ring") return GraphFamily::Ring;
  if (name == "torus") return GraphFamily::Torus;
  if (name == "complete") return GraphFamily::Complete;
  return std::nullopt;
}

std::string_view to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::Path:
      return "path";
    case GraphFamily::Ring:
      return "ring";
    case GraphFamily::Torus:
      return "torus";
    case GraphFamily::Complete:
      return "complete";
  }
  return "unknown";
}

int family_node_count(const FamilySpec& family, int size) {
  switch (family.family) {
    case GraphFamily::Path:
    case GraphFamily::Complete:
      if (size < 2) throw InvalidSizeError("family needs N >= 2");
      return size;
    case GraphFamily::Ring:
      if (size < 3) throw InvalidSizeError("ring needs N >= 3");
      return size;
    case GraphFamily::Torus: {
      if (size < 3) throw InvalidSizeError("torus side must be >= 3");
      if (family.torus_dim < 1 || family.torus_dim > 3) {
        throw InvalidSizeError("torus dimension must be 1, 2 or 3");
      }
      long long n = 1;
      for (int k = 0; k < family.torus_dim; ++k) n *= size;
      if (n > 1'000'000) throw InvalidSizeError("torus too large");
      return static_cast<int>(n);
    }
  }
  throw InvalidSizeError("unknown family");
}

LaplacianSpectrum family_spectrum(const FamilySpec& family, int size) {
  switch (family.family) {
    case GraphFamily::Path:
      return path_spectrum(size, family.weight);
    case GraphFamily::Ring:
      return ring_spectrum(size, family.weight);
    case GraphFamily::Torus:
      family_node_count(family, size);
      return torus_spectrum(size, family.torus_dim, family.weight);
    case GraphFamily::Complete:
      return complete_spectrum(size, family.weight);
  }
  throw InvalidSizeError("unknown family");
}

WeightedGraph family_graph(const FamilySpec& family, int size) {
  switch (family.family) {
    case GraphFamily::Path:
      return build_path(size, family.weight);
    case GraphFamily::Ring:
      return build_ring(size, family.weight);
    case GraphFamily::Torus:
      return build_torus(size, family.torus_dim, family.weight);
    case GraphFamily::Complete:
      return build_complete(size, family.weight);
  }
  throw InvalidSizeError("unknown family");
}

std::pair<int, int> default_fit_window(std::span<const ScalingPoint> points) {
  if (points.empty()) return {0, 0};
  return {points[points.size() / 2].n, points.back().n};
}

double fit_exponent(std::span<const ScalingPoint> points, std::pair<int, int> window) {
  double sx = 0.0;
  double sy = 0.0;
  int count = 0;
  for (const auto& p : points) {
    if (p.v_n && *p.v_n > 0.0 && in_window(p.n, window)) {
      sx += std::log(static_cast<double>(p.n));
      sy += std::log(*p.v_n);
      ++count;
    }
  }
  if (count < 4) throw FitError("need at least four finite points in the fit window");
  const double mx = sx / count;
  const double my = sy / count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& p : points) {
    if (p.v_n && *p.v_n > 0.0 && in_window(p.n, window)) {
      const double dx = std::log(static_cast<double>(p.n)) - mx;
      sxy += dx * (std::log(*p.v_n) - my);
      sxx += dx * dx;
    }
  }
  if (!(sxx > 0.0)) throw FitError("fit window spans a single network size");
  return sxy / sxx;
}

ScalingResult run_scaling(const FamilySpec& family, const Gains& gains,
                          const std::vector<int>& sizes,
                          std::optional<std::pair<int, int>> window) {
  validate(gains);
  if (!std::is_sorted(sizes.begin(), sizes.end())) {
    throw InvalidSizeError("sizes must be ascending");
  }
  ScalingResult result{family, gains, {}, std::nullopt, {0, 0}};
  result.points.reserve(sizes.size());
  for (int size : sizes) {
    const int n = family_node_count(family, size);
    const auto spec = family_spectrum(family, size);
    std::optional<double> v;
    try {
      v = vn_closed_form(spec, gains).v_n;
    } catch (const UnboundedVarianceError&) {
      v.reset();
    }
    result.points.push_back({size, n, v});
  }
  result.fit_window = window.value_or(default_fit_window(result.points));
  try {
    result.fitted_exponent = fit_exponent(result.points, result.fit_window);
  } catch (const FitError&) {
    result.fitted_exponent.reset();
  }
  return result;
}

std::vector<int> parse_sizes(std::string_view text) {
  std::vector<int> sizes;
  if (text.starts_with("geometric:")) {
    const auto parts = split(text.substr(10), ':');
    if (parts.size() != 3) throw ParseError(0, "expected geometric:start:stop:factor");
    const int start = parse_int(parts[0]);
    const int stop = parse_int(parts[1]);
    const int factor = parse_int(parts[2]);
    if (start < 1 || stop < start || factor < 2) {
      throw ParseError(0, "geometric sizes need 1 <= start <= stop and factor >= 2");
    }
    for (long long s = start; s <= stop; s *= factor) sizes.push_back(static_cast<int>(s));
  } else {
    for (auto part : split(text, ',')) {
      if (part.empty()) throw ParseError(0, "empty size in list");
      sizes.push_back(parse_int(part));
    }
  }
  if (sizes.empty()) throw ParseError(0, "no sizes given");
  return sizes;
}

std::string to_csv(const ScalingResult& result) {
  std::ostringstream out;
  out << "N,V_N,bounded,exponent_window_flag\n";
  for (const auto& p : result.points) {
    out << p.n << ',' << (p.v_n ? format_double(*p.v_n) : std::string("inf")) << ','
        << (p.v_n ? 1 : 0) << ',' << (in_window(p.n, result.fit_window) ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace coherence
