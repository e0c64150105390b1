#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "coherence/closed_loop.hpp"

namespace coherence {

struct ZeroInitialState {};

/// Zero-mean normal perturbation of the velocity (frequency) block.
struct RandomFrequencyPerturbation {
  double scale = 0.1;
};

using InitialState = std::variant<ZeroInitialState, RandomFrequencyPerturbation, Eigen::VectorXd>;

struct SimConfig {
  double dt = 1e-2;
  double horizon = 100.0;
  double noise_intensity = 1.0;
  std::uint64_t seed = 0;
  InitialState initial_state = ZeroInitialState{};
  int record_every = 1;        // keep every k-th step (plus t = 0)
  bool record_states = true;   // false keeps only times and y
};

/// Rows are recorded samples. `states` is empty when states were not
/// recorded. `output` holds y = (I - 11^T/N) x.
struct Trajectory {
  int n = 0;
  int blocks = 0;
  std::vector<double> times;
  Eigen::MatrixXd states;
  Eigen::MatrixXd output;
  std::vector<std::string> warnings;
};

/// Stream splitting: node i draws from std::mt19937_64 seeded with
/// splitmix64(seed + (i + 1) * 0x9E3779B97F4A7C15); the initial-state draw
/// uses stream index N. Normals come from std::normal_distribution, so
/// trajectories are bit-identical within one standard library build.
std::uint64_t node_stream_seed(std::uint64_t seed, int stream);

/// Eigenvalues of the closed loop restricted to the complement of the
/// network-average subspace.
Eigen::VectorXcd observable_eigenvalues(const ClosedLoopSystem& sys);

/// Step size keeping the Euler-Maruyama stationary-variance bias of every
/// non-average mode near `relative_bias`, estimated per mode as
/// dt |xi|^2 / (2 |Re xi|); also capped at 0.1 / max |Re xi|.
double suggest_dt(const ClosedLoopSystem& sys, double relative_bias = 0.01);

/// 1 / min |Re xi| over non-average modes.
double slowest_time_constant(const ClosedLoopSystem& sys);

/// Five slowest time constants, capped at horizon / 2.
double default_burn_in(const ClosedLoopSystem& sys, double horizon);

/// x_{k+1} = x_k + dt A x_k + sqrt(dt) * noise_intensity * B xi_k.
///
/// Throws InstabilityError when a non-average mode is not Hurwitz and
/// StepSizeError when dt * max |Re xi| > 1. Adds a warning to the trajectory
/// when that product exceeds 0.1.
Trajectory simulate_em(const ClosedLoopSystem& sys, const SimConfig& cfg);

/// Time average of |y(t)|^2 / N over recorded samples with t > burn_in.
/// Throws WindowError when no sample lies past burn_in.
double empirical_vn(const Trajectory& traj, double burn_in);

/// Runs one simulation per seed and returns empirical_vn for each, in seed
/// order. `threads` > 1 runs seeds concurrently.
std::vector<double> ensemble_vn(const ClosedLoopSystem& sys, SimConfig cfg,
                                const std::vector<std::uint64_t>& seeds, double burn_in,
                                int threads = 1);

enum class Scenario {
  DapiPath10,
  DapiPath100,
  PPath10,
  PPath100,
  FdpdPlatoon100,
  PPlatoon100,
};

std::optional<Scenario> parse_scenario(std::string_view name);
std::string_view to_string(Scenario scenario);

/// Power scenarios: path graph, m = 20/w_ref, d = 10/w_ref, w_ref = 2 pi 60,
/// b = 0.3, l = 1, K_I = 1, c = 0.1, random initial frequency perturbation of
/// scale 0.1. Platoon scenarios: path of 100 vehicles, f = g = f0 = 1 with
/// K_D = 1, tau = 0.1 for F-DPD and g0 = 0 for P, zero initial state.
struct ScenarioSetup {
  ClosedLoopSystem system;
  SimConfig config;
  double burn_in;
};

ScenarioSetup scenario_setup(Scenario scenario, std::uint64_t seed);
Trajectory run_scenario(Scenario scenario, std::uint64_t seed);

/// "t,x_1..x_N" header; optional v and z blocks append v_i / z_i columns.
std::string to_csv(const Trajectory& traj, bool include_v = false, bool include_z = false);

}  // namespace coherence
