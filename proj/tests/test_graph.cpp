#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "coherence/errors.hpp"
#include "coherence/graph.hpp"
#include "support/oracles.hpp"

namespace coherence {
namespace {

std::set<std::pair<int, int>> edge_set(const WeightedGraph& g) {
  std::set<std::pair<int, int>> out;
  for (const auto& e : g.edges()) out.insert({e.u, e.v});
  return out;
}

std::vector<WeightedGraph> sample_graphs() {
  return {build_path(2, 0.5),     build_path(7, 1.3),     build_ring(3, 2.0),
          build_ring(12, 0.7),    build_torus(3, 2, 1.0), build_torus(4, 3, 0.5),
          build_complete(6, 0.2), build_complete(2, 1.0),
          parse_edge_list("5\n1 2 0.5\n2 3 2\n3 4 1\n4 5 3\n1 5 0.25\n2 4 1.5\n")};
}

TEST(GraphBuild, PathEdges) {
  const auto g = build_path(3, 1.0);
  EXPECT_EQ(g.node_count(), 3);
  ASSERT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.edges()[0], (Edge{0, 1, 1.0}));
  EXPECT_EQ(g.edges()[1], (Edge{1, 2, 1.0}));

  const auto single = build_path(2, 0.5);
  ASSERT_EQ(single.edge_count(), 1u);
  EXPECT_EQ(single.edges()[0], (Edge{0, 1, 0.5}));

  const auto long_path = build_path(100, 0.3);
  EXPECT_EQ(long_path.edge_count(), 99u);
  for (const auto& e : long_path.edges()) EXPECT_EQ(e.weight, 0.3);
  EXPECT_TRUE(is_connected(long_path));
}

TEST(GraphBuild, RingEdges) {
  EXPECT_EQ(build_ring(3, 1.0).edge_count(), 3u);
  const auto four = build_ring(4, 2.0);
  EXPECT_EQ(four.edge_count(), 4u);
  for (int count : four.neighbor_counts()) EXPECT_EQ(count, 2);
  for (const auto& e : four.edges()) EXPECT_EQ(e.weight, 2.0);
}

TEST(GraphBuild, CompleteEdges) {
  EXPECT_EQ(build_complete(2, 1.0).edge_count(), 1u);
  EXPECT_EQ(build_complete(4, 1.0).edge_count(), 6u);
  const auto five = build_complete(5, 0.2);
  EXPECT_EQ(five.edge_count(), 10u);
  for (const auto& e : five.edges()) EXPECT_EQ(e.weight, 0.2);
}

TEST(GraphBuild, TorusMatchesBruteForceLattice) {
  for (auto [side, dim] : {std::pair{3, 2}, std::pair{4, 3}, std::pair{5, 2}, std::pair{3, 3}}) {
    const auto g = build_torus(side, dim, 1.0);
    const auto expected = testing::torus_edges_brute_force(side, dim);
    EXPECT_EQ(edge_set(g), expected) << side << "^" << dim;
    for (int count : g.neighbor_counts()) EXPECT_EQ(count, 2 * dim);
  }
  const auto t32 = build_torus(3, 2, 1.0);
  EXPECT_EQ(t32.node_count(), 9);
  EXPECT_EQ(t32.edge_count(), 18u);
  EXPECT_EQ(build_torus(4, 3, 1.0).node_count(), 64);
}

TEST(GraphBuild, OneDimensionalTorusIsRing) {
  for (int side : {3, 4, 9}) {
    EXPECT_EQ(build_torus(side, 1, 1.5), build_ring(side, 1.5));
  }
}

TEST(GraphBuild, InvalidSizes) {
  EXPECT_THROW(build_path(1, 1.0), InvalidSizeError);
  EXPECT_THROW(build_ring(2, 1.0), InvalidSizeError);
  EXPECT_THROW(build_complete(1, 1.0), InvalidSizeError);
  EXPECT_THROW(build_torus(2, 2, 1.0), InvalidSizeError);
  EXPECT_THROW(build_torus(3, 4, 1.0), InvalidSizeError);
  EXPECT_THROW(build_torus(3, 0, 1.0), InvalidSizeError);
  EXPECT_THROW(build_path(3, 0.0), InvalidParameterError);
}

TEST(GraphInvariants, ConstructorRejectsViolations) {
  EXPECT_THROW(WeightedGraph(3, {{0, 0, 1.0}}), GraphInvariantError);
  EXPECT_THROW(WeightedGraph(3, {{0, 1, 1.0}, {1, 0, 1.0}}), GraphInvariantError);
  EXPECT_THROW(WeightedGraph(3, {{0, 1, -1.0}}), GraphInvariantError);
  EXPECT_THROW(WeightedGraph(3, {{0, 3, 1.0}}), GraphInvariantError);
}

TEST(EdgeList, ParsesPath) {
  EXPECT_EQ(parse_edge_list("3\n1 2 1.0\n2 3 1.0"), build_path(3, 1.0));
  EXPECT_EQ(parse_edge_list("# header\n\n3\n# c\n2 3 1.0\n  1 2 1.0  \n"), build_path(3, 1.0));
}

TEST(EdgeList, ReportsLineNumbers) {
  const auto expect_line = [](std::string_view text, std::size_t line) {
    try {
      parse_edge_list(text);
      FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
    }
  };
  expect_line("2\n1 1 1.0", 2);           // self-loop
  expect_line("3\n1 2 -1.0", 2);          // negative weight
  expect_line("3\n1 2 0", 2);             // zero weight
  expect_line("3\n1 2 1\n2 1 1", 3);      // duplicate
  expect_line("3\n1 2\n", 2);             // malformed
  expect_line("3\n1 4 1.0", 2);           // out of range
  expect_line("x\n", 1);                  // bad header
  expect_line("# only comment\n", 2);     // missing node count
}

TEST(EdgeList, RoundTripsThroughText) {
  for (const auto& g : sample_graphs()) EXPECT_EQ(parse_edge_list(to_edge_list(g)), g);
}

TEST(Laplacian, Examples) {
  Eigen::Matrix3d path;
  path << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  EXPECT_EQ(laplacian(build_path(3, 1.0)), Eigen::MatrixXd(path));

  Eigen::Matrix2d pair;
  pair << 1, -1, -1, 1;
  EXPECT_EQ(laplacian(build_complete(2, 1.0)), Eigen::MatrixXd(pair));

  Eigen::Matrix3d tri;
  tri << 4, -2, -2, -2, 4, -2, -2, -2, 4;
  EXPECT_EQ(laplacian(build_ring(3, 2.0)), Eigen::MatrixXd(tri));
}

TEST(Laplacian, RowSumsAndSymmetry) {
  for (const auto& g : sample_graphs()) {
    const auto lap = laplacian(g);
    EXPECT_LE(lap.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(lap, lap.transpose());
  }
}

TEST(Spectrum, PathOfThreeMatchesCharacteristicPolynomial) {
  // det(xI - L) for path(3,1) = x^3 - 4x^2 + 3x.
  const auto roots = testing::real_cubic_roots(-4.0, 3.0, 0.0);
  const auto spec = spectrum(build_path(3, 1.0));
  ASSERT_EQ(spec.size(), 3);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(spec.eigenvalues[k], roots[k], 1e-12);
  EXPECT_EQ(spec.eigenvalues[0], 0.0);
  EXPECT_NEAR(spec.eigenvalues[1], 1.0, 1e-12);
  EXPECT_NEAR(spec.eigenvalues[2], 3.0, 1e-12);
}

TEST(Spectrum, CompleteGraphIsNl) {
  for (int n : {2, 5, 17}) {
    for (double l : {0.2, 1.0, 3.5}) {
      const auto spec = spectrum(build_complete(n, l));
      EXPECT_EQ(spec.eigenvalues[0], 0.0);
      for (int k = 1; k < n; ++k) EXPECT_NEAR(spec.eigenvalues[k], n * l, 1e-10 * n * l);
    }
  }
}

TEST(Spectrum, RingOfFourMatchesCirculantFormula) {
  const auto spec = spectrum(build_ring(4, 1.0));
  std::vector<double> circulant;
  for (int k = 0; k < 4; ++k) circulant.push_back(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / 4));
  std::sort(circulant.begin(), circulant.end());
  for (int k = 0; k < 4; ++k) EXPECT_NEAR(spec.eigenvalues[k], circulant[k], 1e-12);
  EXPECT_NEAR(spec.eigenvalues[1], 2.0, 1e-12);
  EXPECT_NEAR(spec.eigenvalues[3], 4.0, 1e-12);
}

TEST(Spectrum, InvariantsOnSampleGraphs) {
  for (const auto& g : sample_graphs()) {
    const auto spec = spectrum(g);
    ASSERT_EQ(spec.size(), g.node_count());
    EXPECT_TRUE(std::is_sorted(spec.eigenvalues.begin(), spec.eigenvalues.end()));
    for (double v : spec.eigenvalues) EXPECT_GE(v, -spec.zero_tolerance);
    double sum = 0.0;
    for (double v : spec.eigenvalues) sum += v;
    const double trace = laplacian(g).trace();
    EXPECT_LE(std::abs(sum - trace), 1e-9 * trace);
    EXPECT_EQ(is_connected(g), spec.connected());
    EXPECT_DOUBLE_EQ(spec.zero_tolerance, default_zero_tolerance(spec.eigenvalues.back()));
  }
}

TEST(Spectrum, AnalyticFamiliesMatchEigensolver) {
  const auto compare = [](const LaplacianSpectrum& analytic, const LaplacianSpectrum& dense) {
    ASSERT_EQ(analytic.size(), dense.size());
    const double scale = dense.eigenvalues.back();
    for (int k = 0; k < dense.size(); ++k) {
      EXPECT_NEAR(analytic.eigenvalues[k], dense.eigenvalues[k], 1e-10 * scale);
    }
  };
  for (int n : {3, 8, 64, 512}) {
    compare(ring_spectrum(n, 0.7), spectrum(build_ring(n, 0.7)));
    compare(path_spectrum(n, 1.3), spectrum(build_path(n, 1.3)));
  }
  compare(torus_spectrum(5, 2, 1.0), spectrum(build_torus(5, 2, 1.0)));
  compare(torus_spectrum(4, 3, 2.0), spectrum(build_torus(4, 3, 2.0)));
  compare(complete_spectrum(9, 0.5), spectrum(build_complete(9, 0.5)));
}

TEST(Connectivity, Examples) {
  EXPECT_TRUE(is_connected(build_path(5, 1.0)));
  EXPECT_TRUE(is_connected(build_complete(3, 1.0)));
  const WeightedGraph split(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  EXPECT_FALSE(is_connected(split));
  const auto spec = spectrum(split);
  EXPECT_FALSE(spec.connected());
  EXPECT_EQ(spec.eigenvalues[0], 0.0);
}

TEST(Spectrum, RejectsNegativeEigenvalues) {
  EXPECT_THROW(make_spectrum({-1.0, 2.0}), NumericalError);
  EXPECT_THROW(make_spectrum({0.5, 2.0}), NumericalError);
  const auto clamped = make_spectrum({3.0, -1e-12, 1.0});
  EXPECT_EQ(clamped.eigenvalues, (std::vector<double>{0.0, 1.0, 3.0}));
}

}  // namespace
}  // namespace coherence
