#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "coherence/closed_loop.hpp"
#include "coherence/errors.hpp"
#include "coherence/graph.hpp"

namespace coherence {
namespace {

Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

Eigen::VectorXcd eigenvalues(const Eigen::MatrixXd& a) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
  return solver.eigenvalues();
}

/// Greedy nearest matching of two eigenvalue multisets; returns the worst
/// relative distance.
double multiset_distance(Eigen::VectorXcd lhs, const Eigen::VectorXcd& rhs) {
  EXPECT_EQ(lhs.size(), rhs.size());
  std::vector<bool> used(rhs.size(), false);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < lhs.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Eigen::Index pick = -1;
    for (Eigen::Index j = 0; j < rhs.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(lhs(i) - rhs(j));
      if (d < best) {
        best = d;
        pick = j;
      }
    }
    used[pick] = true;
    worst = std::max(worst, best / std::max(1.0, std::abs(lhs(i))));
  }
  return worst;
}

struct RandomGains {
  std::mt19937_64 rng{20240611};
  double uniform(double lo, double hi) { return std::uniform_real_distribution<>(lo, hi)(rng); }
  PGains p() { return {uniform(0.1, 3), uniform(0.1, 3), uniform(0.1, 3), uniform(0.1, 3)}; }
  DapiGains dapi() {
    return {uniform(0.1, 3), uniform(0.0, 3), uniform(0.1, 3), uniform(0.1, 3), uniform(0.05, 3)};
  }
  FdpdGains fdpd() {
    return {uniform(0.0, 3), uniform(0.0, 3), uniform(0.1, 3), uniform(0.1, 3), uniform(0.01, 2)};
  }
};

TEST(AssembleP, CompleteTwoExample) {
  const auto sys = assemble_p(build_complete(2, 1.0), PGains{1, 1, 1, 1});
  const auto expected = mat({{0, 0, 1, 0}, {0, 0, 0, 1}, {-2, 1, -2, 1}, {1, -2, 1, -2}});
  EXPECT_EQ(sys.a, expected);
  EXPECT_EQ(sys.b, mat({{0, 0}, {0, 0}, {1, 0}, {0, 1}}));
  EXPECT_EQ(sys.c, mat({{0.5, -0.5, 0, 0}, {-0.5, 0.5, 0, 0}}));
}

TEST(AssembleP, PureRelativeFeedbackIsMinusLaplacian) {
  const auto g = build_ring(6, 0.4);
  const auto sys = assemble_p(g, PGains{1, 1, 0, 0});
  EXPECT_EQ(Eigen::MatrixXd(sys.a.block(6, 0, 6, 6)), Eigen::MatrixXd(-laplacian(g)));
}

TEST(AssembleP, PowerDroopHasDiagonalDamping) {
  const double w = 2 * std::numbers::pi * 60;
  const auto gains = power_droop(20 / w, 10 / w, 0.3, 1.0);
  const auto sys = assemble_p(build_path(3, 1.0), gains);
  const Eigen::MatrixXd damping = sys.a.block(3, 3, 3, 3);
  EXPECT_TRUE(damping.isApprox(-0.5 * Eigen::MatrixXd::Identity(3, 3), 1e-14));
}

TEST(AssembleP, OutputIsCenteringProjector) {
  const auto sys = assemble_p(build_path(5, 1.0), PGains{1, 1, 1, 0});
  const Eigen::MatrixXd proj = sys.c.leftCols(5);
  EXPECT_TRUE((proj * proj).isApprox(proj, 1e-14));
  EXPECT_LE((proj * Eigen::VectorXd::Ones(5)).norm(), 1e-14);
  EXPECT_TRUE(sys.c.rightCols(5).isZero());
}

TEST(AssembleDapi, Blocks) {
  const auto g = build_complete(2, 1.0);
  const auto no_filter = assemble_dapi(g, DapiGains{1, 0, 1, 1, 0});
  EXPECT_TRUE(no_filter.a.block(4, 4, 2, 2).isZero());
  EXPECT_EQ(Eigen::MatrixXd(no_filter.a.block(4, 2, 2, 2)), Eigen::MatrixXd(-Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_TRUE(no_filter.a.block(4, 0, 2, 2).isZero());

  const auto filtered = assemble_dapi(g, DapiGains{1, 0, 1, 1, 0.1});
  EXPECT_TRUE(filtered.a.block(4, 4, 2, 2).isApprox(-0.1 * laplacian(g)));
  // g = 0 leaves only absolute damping on the velocity block.
  EXPECT_TRUE(filtered.a.block(2, 2, 2, 2).isApprox(-Eigen::MatrixXd::Identity(2, 2)));
  EXPECT_TRUE(filtered.a.block(2, 4, 2, 2).isApprox(Eigen::MatrixXd::Identity(2, 2)));
}

TEST(AssembleFdpd, Blocks) {
  const auto sys = assemble_fdpd(build_ring(4, 1.0), FdpdGains{1, 1, 1, 1, 0.1});
  EXPECT_TRUE(sys.a.block(8, 4, 4, 4).isApprox(-10.0 * Eigen::MatrixXd::Identity(4, 4)));
  EXPECT_TRUE(sys.a.block(8, 8, 4, 4).isApprox(-10.0 * Eigen::MatrixXd::Identity(4, 4)));

  const auto big = assemble_fdpd(build_path(100, 1.0), FdpdGains{1, 1, 1, 1, 0.1});
  EXPECT_EQ(big.a.rows(), 300);
  EXPECT_EQ(big.a.cols(), 300);
  EXPECT_EQ(big.b.rows(), 300);
  EXPECT_EQ(big.c.cols(), 300);
}

TEST(AssembleFdpd, IdealPdRedirects) {
  EXPECT_THROW(assemble_fdpd(build_ring(4, 1.0), FdpdGains{1, 1, 1, 1, 0.0}), IdealPdRedirect);
  EXPECT_THROW(modal_subsystem(FdpdGains{1, 1, 1, 1, 0.0}, 1.0, 2), IdealPdRedirect);
  const auto pd = ideal_pd_equivalent(FdpdGains{1, 2, 3, 4, 0.0});
  EXPECT_EQ(pd.g0, 4.0);
  EXPECT_EQ(pd.f0, 3.0);
}

TEST(Assemble, RejectsDisconnectedGraphs) {
  const WeightedGraph split(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  EXPECT_THROW(assemble_p(split, PGains{1, 1, 1, 1}), TopologyError);
  EXPECT_THROW(assemble_dapi(split, DapiGains{1, 1, 1, 1, 1}), TopologyError);
  EXPECT_THROW(assemble_fdpd(split, FdpdGains{1, 1, 1, 1, 1}), TopologyError);
}

TEST(Gains, Validation) {
  EXPECT_THROW(PGains({-1, 0, 0, 0}).validate(), InvalidParameterError);
  EXPECT_THROW(DapiGains({0, 0, 1, 1, 0}).validate(), InvalidParameterError);   // f = 0
  EXPECT_THROW(DapiGains({1, 0, 0, 1, 0}).validate(), InvalidParameterError);   // g0 = 0
  EXPECT_THROW(DapiGains({1, 0, 1, 0, 0}).validate(), InvalidParameterError);   // K_I = 0
  EXPECT_THROW(FdpdGains({1, 0, 0, 1, 0.1}).validate(), InvalidParameterError); // f0 = 0
  EXPECT_THROW(FdpdGains({1, 0, 1, 0, 0.1}).validate(), InvalidParameterError); // K_D = 0
  EXPECT_THROW(FdpdGains({1, 0, 1, 1, -0.1}).validate(), InvalidParameterError);
  EXPECT_NO_THROW(DapiGains({1, 0, 1, 1, 0}).validate());
  EXPECT_NO_THROW(FdpdGains({1, 0, 1, 1, 0}).validate());
}

TEST(PowerPreset, GridParameters) {
  const double w = 2 * std::numbers::pi * 60;
  const auto gains = power_preset(20 / w, 10 / w, 0.3, 1.0, 1.0, 0.1);
  EXPECT_NEAR(gains.g0, 0.5, 1e-15);
  EXPECT_NEAR(gains.f, 0.3 * w / 20, 1e-12);
  EXPECT_NEAR(gains.f, 5.655, 5e-4);
  EXPECT_EQ(gains.g, 0.0);
  EXPECT_EQ(gains.ki, 1.0);
  EXPECT_EQ(gains.c, 0.1);

  EXPECT_DOUBLE_EQ(power_preset(2.0, 2.0, 1.0, 1.0, 1.0, 0.1).g0, 1.0);
  EXPECT_THROW(power_preset(0.0, 1.0, 1.0, 1.0, 1.0, 0.1), InvalidParameterError);
  EXPECT_THROW(power_preset(-1.0, 1.0, 1.0, 1.0, 1.0, 0.1), InvalidParameterError);
  EXPECT_THROW(power_preset(1.0, 1.0, 0.0, 1.0, 1.0, 0.1), InvalidParameterError);
}

TEST(ModalSubsystem, Examples) {
  const auto p = modal_subsystem(PGains{1, 1, 1, 1}, 2.0, 2);
  EXPECT_EQ(p.a, mat({{0, 1}, {-3, -3}}));
  EXPECT_EQ(p.b, Eigen::Vector2d(0, 1));
  EXPECT_EQ(p.c, Eigen::RowVector2d(1, 0));

  const DapiGains dapi{2.0, 0.5, 0.7, 1.3, 0.4};
  const auto d = modal_subsystem(dapi, 0.0, 1);
  EXPECT_EQ(d.a, mat({{0, 1, 0}, {0, -0.7, 1.3}, {0, -1, 0}}));
  EXPECT_EQ(d.b, Eigen::Vector3d(0, 1, 0));
  EXPECT_EQ(d.c, Eigen::RowVector3d(1, 0, 0));

  const auto fd = modal_subsystem(FdpdGains{1, 1, 1, 1, 0.1}, 1.0, 2);
  EXPECT_TRUE(fd.a.isApprox(mat({{0, 1, 0}, {-2, -1, 1}, {0, -10, -10}}), 1e-15));
}

TEST(Stability, Examples) {
  EXPECT_TRUE(is_stable_mode(modal_subsystem(PGains{1, 1, 0, 0}, 1.0, 2)));
  EXPECT_FALSE(is_stable_mode(modal_subsystem(PGains{1, 1, 0, 0}, 0.0, 1)));

  const auto fd = modal_subsystem(FdpdGains{1, 1, 1, 1, 0.1}, 1.0, 2);
  EXPECT_TRUE(is_stable_mode(fd));
  EXPECT_TRUE((eigenvalues(fd.a).real().array() < 0).all());

  // DAPI: the average mode keeps a zero eigenvalue.
  EXPECT_FALSE(is_stable_mode(modal_subsystem(DapiGains{1, 1, 1, 1, 1}, 0.0, 1)));
  EXPECT_TRUE(is_stable_mode(modal_subsystem(DapiGains{1, 1, 1, 1, 1}, 2.0, 2)));
  // c = 0 leaves an integrator in every mode.
  EXPECT_FALSE(is_stable_mode(modal_subsystem(DapiGains{1, 1, 1, 1, 0}, 2.0, 2)));
}

TEST(Stability, FdpdCharacteristicPolynomialMatchesCubic) {
  RandomGains draw;
  for (int trial = 0; trial < 100; ++trial) {
    const auto gains = draw.fdpd();
    const double lambda = draw.uniform(0.0, 5.0);
    const auto coeffs = characteristic_coefficients(modal_subsystem(gains, lambda, 2).a);
    const double gl = gains.g * lambda;
    const double stiffness = gains.f0 + gains.f * lambda;
    EXPECT_NEAR(coeffs[0], gl + 1 / gains.tau, 1e-10 * (1 + coeffs[0]));
    EXPECT_NEAR(coeffs[1], (gains.kd + gl) / gains.tau + stiffness, 1e-10 * (1 + coeffs[1]));
    EXPECT_NEAR(coeffs[2], stiffness / gains.tau, 1e-10 * (1 + coeffs[2]));
  }
}

TEST(Stability, FdpdRouthHurwitzAgreesWithEigenvalues) {
  // Signed gains exercise both verdicts; the modal matrix is built by hand to
  // avoid gain validation.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<> u(-1.0, 3.0);
  int stable = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double f = u(rng), g = u(rng), f0 = u(rng), kd = u(rng);
    const double tau = std::abs(u(rng)) + 0.01;
    const double lambda = std::abs(u(rng));
    ModalSubsystem sub{ControllerKind::Fdpd, 2, lambda,
                       mat({{0, 1, 0}, {-f * lambda - f0, -g * lambda, 1}, {0, -kd / tau, -1 / tau}}),
                       Eigen::Vector3d(0, 1, 0), Eigen::RowVector3d(1, 0, 0)};
    const auto ev = eigenvalues(sub.a);
    const double margin = ev.real().maxCoeff();
    if (std::abs(margin) < 1e-9) continue;  // numerically marginal draws
    EXPECT_EQ(is_stable_mode(sub), margin < 0) << "trial " << trial;
    stable += margin < 0;
  }
  EXPECT_GT(stable, 50);
  EXPECT_LT(stable, 950);
}

TEST(Stability, PModesStableWhenCoefficientsPositive) {
  RandomGains draw;
  for (int trial = 0; trial < 200; ++trial) {
    PGains gains = draw.p();
    if (trial % 2) gains.f0 = 0.0;
    else gains.g0 = 0.0;
    const auto spec = spectrum(build_ring(7, 1.0));
    for (int k = 1; k < spec.size(); ++k) {
      const auto sub = modal_subsystem(gains, spec.eigenvalues[k], k + 1);
      EXPECT_TRUE(is_stable_mode(sub));
      EXPECT_TRUE((eigenvalues(sub.a).real().array() < 0).all());
    }
  }
}

TEST(BlockDiagonalization, FullSpectrumIsUnionOfModalSpectra) {
  RandomGains draw;
  const std::vector<WeightedGraph> graphs = {
      build_path(5, 1.0), build_ring(6, 0.8), build_complete(4, 1.2), build_torus(3, 2, 1.0),
      parse_edge_list("7\n1 2 0.5\n2 3 2\n3 4 1\n4 5 3\n5 6 1\n6 7 0.3\n1 7 1\n2 6 0.7\n"),
      build_path(12, 0.5)};
  for (const auto& graph : graphs) {
    const auto spec = spectrum(graph);
    for (const Gains gains : {Gains{draw.p()}, Gains{draw.dapi()}, Gains{draw.fdpd()}}) {
      const auto sys = assemble(graph, gains);
      const int dim = sys.blocks();
      Eigen::VectorXcd modal(dim * graph.node_count());
      for (int k = 0; k < spec.size(); ++k) {
        modal.segment(k * dim, dim) =
            eigenvalues(modal_subsystem(gains, spec.eigenvalues[k], k + 1).a);
      }
      EXPECT_LE(multiset_distance(modal, eigenvalues(sys.a)), 1e-8)
          << to_string(kind_of(gains)) << " on N=" << graph.node_count();
    }
  }
}

TEST(Deflation, AverageModeIsUnobservable) {
  RandomGains draw;
  const auto graph = build_ring(5, 1.0);
  for (const Gains gains : {Gains{PGains{1, 1, 0, 0}}, Gains{draw.dapi()}, Gains{draw.fdpd()}}) {
    const auto sys = assemble(graph, gains);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(5);
    for (int block = 0; block < sys.blocks(); ++block) {
      Eigen::VectorXd direction = Eigen::VectorXd::Zero(sys.state_dim());
      direction.segment(block * 5, 5) = ones;
      EXPECT_LE((sys.c * direction).norm(), 1e-14);
    }
    const auto deflated = deflate_average_mode(sys);
    EXPECT_EQ(deflated.a.rows(), sys.blocks() * 4);
    EXPECT_TRUE((eigenvalues(deflated.a).real().array() < 0).all());
  }
  // P with f0 = g0 = 0: the average mode is a double integrator; everything
  // else is Hurwitz.
  const auto p = assemble(graph, PGains{1, 1, 0, 0});
  EXPECT_GE(eigenvalues(p.a).real().maxCoeff(), -1e-12);
}

TEST(Deflation, ComplementBasisIsOrthonormal) {
  for (int n : {2, 3, 10}) {
    const auto q = average_complement_basis(n);
    EXPECT_TRUE((q.transpose() * q).isIdentity(1e-13));
    EXPECT_LE((q.transpose() * Eigen::VectorXd::Ones(n)).norm(), 1e-13);
  }
}

}  // namespace
}  // namespace coherence
