#include "coherence/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include "coherence/errors.hpp"
#include "coherence/io.hpp"

namespace coherence {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double max_abs_real(const Eigen::VectorXcd& values) {
  return values.size() == 0 ? 0.0 : values.real().cwiseAbs().maxCoeff();
}

void require_observable_stable(const Eigen::VectorXcd& values) {
  const double eps = 1e-10 * std::max(1.0, values.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!(values(i).real() < -eps)) {
      throw InstabilityError("closed loop has a non-average mode that is not Hurwitz");
    }
  }
}

Eigen::VectorXd centered(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return x.array() - x.mean();
}

}  // namespace

std::uint64_t node_stream_seed(std::uint64_t seed, int stream) {
  return splitmix64(seed + static_cast<std::uint64_t>(stream + 1) * 0x9E3779B97F4A7C15ULL);
}

Eigen::VectorXcd observable_eigenvalues(const ClosedLoopSystem& sys) {
  const auto deflated = deflate_average_mode(sys);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(deflated.a, false);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  return solver.eigenvalues();
}

double suggest_dt(const ClosedLoopSystem& sys, double relative_bias) {
  if (!(relative_bias > 0.0)) throw InvalidParameterError("relative_bias must be > 0");
  const Eigen::VectorXcd values = observable_eigenvalues(sys);
  require_observable_stable(values);
  double dt = 0.1 / max_abs_real(values);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double re = std::abs(values(i).real());
    dt = std::min(dt, relative_bias * 2.0 * re / std::norm(values(i)));
  }
  return dt;
}

double slowest_time_constant(const ClosedLoopSystem& sys) {
  const Eigen::VectorXcd values = observable_eigenvalues(sys);
  require_observable_stable(values);
  return 1.0 / values.real().cwiseAbs().minCoeff();
}

double default_burn_in(const ClosedLoopSystem& sys, double horizon) {
  return std::min(5.0 * slowest_time_constant(sys), 0.5 * horizon);
}

Trajectory simulate_em(const ClosedLoopSystem& sys, const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.horizon > cfg.dt)) {
    throw InvalidParameterError("need 0 < dt < horizon");
  }
  if (!(cfg.noise_intensity >= 0.0)) throw InvalidParameterError("noise_intensity must be >= 0");
  if (cfg.record_every < 1) throw InvalidParameterError("record_every must be >= 1");

  const int n = sys.n;
  const int dim = sys.state_dim();
  Trajectory traj;
  traj.n = n;
  traj.blocks = sys.blocks();

  // The average subspace may be marginal; only the rest has to be stable.
  const Eigen::VectorXcd observable = observable_eigenvalues(sys);
  require_observable_stable(observable);
  Eigen::EigenSolver<Eigen::MatrixXd> full(sys.a, false);
  const double fastest = std::max(max_abs_real(full.eigenvalues()), max_abs_real(observable));
  if (cfg.dt * fastest > 1.0) {
    throw StepSizeError("dt * max|Re xi| = " + format_double(cfg.dt * fastest) + " > 1");
  }
  if (cfg.dt * fastest > 0.1) {
    traj.warnings.push_back("dt * max|Re xi| = " + format_double(cfg.dt * fastest) +
                            " exceeds 0.1; Euler-Maruyama bias may be large");
  }

  std::vector<std::mt19937_64> engines;
  engines.reserve(n + 1);
  for (int i = 0; i <= n; ++i) engines.emplace_back(node_stream_seed(cfg.seed, i));
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
  std::visit(
      [&](const auto& init) {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, RandomFrequencyPerturbation>) {
          for (int i = 0; i < n; ++i) x(n + i) = init.scale * normal(engines[n]);
        } else if constexpr (std::is_same_v<T, Eigen::VectorXd>) {
          if (init.size() != dim) throw InvalidSizeError("initial state has wrong dimension");
          x = init;
        }
      },
      cfg.initial_state);

  const auto steps = static_cast<long long>(std::floor(cfg.horizon / cfg.dt + 1e-9));
  const auto rows = steps / cfg.record_every + 1;
  traj.times.reserve(rows);
  traj.output.resize(rows, n);
  if (cfg.record_states) traj.states.resize(rows, dim);

  Eigen::Index row = 0;
  const auto record = [&](double t) {
    traj.times.push_back(t);
    traj.output.row(row) = centered(x.head(n)).transpose();
    if (cfg.record_states) traj.states.row(row) = x.transpose();
    ++row;
  };
  record(0.0);

  const Eigen::SparseMatrix<double, Eigen::RowMajor> a = sys.a.sparseView();
  const double noise_scale = std::sqrt(cfg.dt) * cfg.noise_intensity;
  Eigen::VectorXd drift(dim);
  for (long long k = 1; k <= steps; ++k) {
    drift.noalias() = a * x;
    x.noalias() += cfg.dt * drift;
    if (noise_scale > 0.0) {
      for (int i = 0; i < n; ++i) x(n + i) += noise_scale * normal(engines[i]);
    }
    if (k % cfg.record_every == 0) record(static_cast<double>(k) * cfg.dt);
  }
  traj.output.conservativeResize(row, Eigen::NoChange);
  if (cfg.record_states) traj.states.conservativeResize(row, Eigen::NoChange);
  return traj;
}

double empirical_vn(const Trajectory& traj, double burn_in) {
  double total = 0.0;
  long long count = 0;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] > burn_in) {
      total += traj.output.row(static_cast<Eigen::Index>(k)).squaredNorm();
      ++count;
    }
  }
  if (count == 0) throw WindowError("no samples after burn-in");
  return total / static_cast<double>(count) / traj.n;
}

std::vector<double> ensemble_vn(const ClosedLoopSystem& sys, SimConfig cfg,
                                const std::vector<std::uint64_t>& seeds, double burn_in,
                                int threads) {
  cfg.record_states = false;
  const auto run = [&sys, cfg, burn_in](std::uint64_t seed) {
    SimConfig local = cfg;
    local.seed = seed;
    return empirical_vn(simulate_em(sys, local), burn_in);
  };

  std::vector<double> results(seeds.size());
  if (threads <= 1) {
    for (std::size_t k = 0; k < seeds.size(); ++k) results[k] = run(seeds[k]);
    return results;
  }
  for (std::size_t start = 0; start < seeds.size(); start += threads) {
    std::vector<std::future<double>> batch;
    const std::size_t stop = std::min(seeds.size(), start + threads);
    for (std::size_t k = start; k < stop; ++k) {
      batch.push_back(std::async(std::launch::async, run, seeds[k]));
    }
    for (std::size_t k = start; k < stop; ++k) results[k] = batch[k - start].get();
  }
  return results;
}

std::optional<Scenario> parse_scenario(std::string_view name) {
  for (auto s : {Scenario::DapiPath10, Scenario::DapiPath100, Scenario::PPath10,
                 Scenario::PPath100, Scenario::FdpdPlatoon100,
                 Scenario::PPlatoon100}) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

std::string_view to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::DapiPath10:
      return "dapi_path_10";
    case Scenario::DapiPath100:
      return "dapi_path_100";
    case Scenario::PPath10:
      return "p_path_10";
    case Scenario::PPath100:
      return "p_path_100";
    case Scenario::FdpdPlatoon100:
      return "fdpd_platoon_100";
    case Scenario::PPlatoon100:
      return "p_platoon_100";
  }
  return "unknown";
}

ScenarioSetup scenario_setup(Scenario scenario, std::uint64_t seed) {
  constexpr double omega_ref = 2.0 * std::numbers::pi * 60.0;
  constexpr double inertia = 20.0 / omega_ref;
  constexpr double damping = 10.0 / omega_ref;
  constexpr double susceptance = 0.3;

  SimConfig cfg;
  cfg.dt = 0.005;
  cfg.horizon = 2000.0;
  cfg.seed = seed;
  cfg.record_every = 100;

  const auto power_case = [&](int n, bool dapi) {
    const auto graph = build_path(n, 1.0);
    cfg.initial_state = RandomFrequencyPerturbation{0.1};
    return dapi ? assemble_dapi(graph, power_preset(inertia, damping, susceptance, 1.0, 1.0, 0.1))
                : assemble_p(graph, power_droop(inertia, damping, susceptance, 1.0));
  };

  ClosedLoopSystem sys = [&] {
    switch (scenario) {
      case Scenario::DapiPath10:
        return power_case(10, true);
      case Scenario::DapiPath100:
        return power_case(100, true);
      case Scenario::PPath10:
        return power_case(10, false);
      case Scenario::PPath100:
        return power_case(100, false);
      case Scenario::FdpdPlatoon100:
        return assemble_fdpd(build_path(100, 1.0), FdpdGains{1.0, 1.0, 1.0, 1.0, 0.1});
      case Scenario::PPlatoon100:
        return assemble_p(build_path(100, 1.0), PGains{1.0, 1.0, 1.0, 0.0});
    }
    throw InvalidParameterError("unknown scenario");
  }();

  const double burn_in = default_burn_in(sys, cfg.horizon);
  return {std::move(sys), std::move(cfg), burn_in};
}

Trajectory run_scenario(Scenario scenario, std::uint64_t seed) {
  const auto setup = scenario_setup(scenario, seed);
  return simulate_em(setup.system, setup.config);
}

std::string to_csv(const Trajectory& traj, bool include_v, bool include_z) {
  if (traj.states.rows() == 0 && !traj.times.empty()) {
    throw InvalidParameterError("trajectory was recorded without states");
  }
  if (include_z && traj.blocks < 3) {
    throw InvalidParameterError("trajectory has no z block");
  }
  const int n = traj.n;
  std::ostringstream out;
  out << 't';
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  if (include_v)
    for (int i = 1; i <= n; ++i) out << ",v_" << i;
  if (include_z)
    for (int i = 1; i <= n; ++i) out << ",z_" << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    out << format_double(traj.times[k]);
    const auto write_block = [&](int block) {
      for (int i = 0; i < n; ++i) out << ',' << format_double(traj.states(r, block * n + i));
    };
    write_block(0);
    if (include_v) write_block(1);
    if (include_z) write_block(2);
    out << '\n';
  }
  return out.str();
}

}  // namespace coherence
