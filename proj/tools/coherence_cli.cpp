// coherence: command line front end for the coherence library.
//
//   coherence spectrum --graph ring --n 8
//   coherence vn --graph path --n 10 --controller dapi --f 1 --g0 1 --ki 1 --c 0.1
//   coherence tune --graph complete --n 4 --f 4 --g0 1 --ki 1
//   coherence simulate --scenario dapi_path_10 --seed 3 --out traj.csv
//   coherence scale --family ring --controller p --f 1 --g 1 --f0 1 --sizes geometric:64:4096:2
//
// CSV goes to --out when given, stdout otherwise. Diagnostics go to stderr.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coherence/coherence.hpp"

namespace {

using namespace coherence;

struct GraphOptions {
  std::string kind = "ring";
  int n = 10;
  int dim = 1;
  double weight = 1.0;
  std::string edges;
};

struct GainOptions {
  std::string controller = "p";
  std::string gains_file;
  double f = 0, g = 0, f0 = 0, g0 = 0, ki = 0, c = 0, kd = 0, tau = 0;
};

void add_graph_options(CLI::App* app, GraphOptions& opt) {
  app->add_option("--graph", opt.kind, "path | ring | torus | complete | file")
      ->check(CLI::IsMember({"path", "ring", "torus", "complete", "file"}));
  app->add_option("--n", opt.n, "node count (torus: side length)");
  app->add_option("--dim", opt.dim, "torus dimension");
  app->add_option("--weight", opt.weight, "uniform edge weight");
  app->add_option("--edges", opt.edges, "edge-list file for --graph file");
}

void add_gain_options(CLI::App* app, GainOptions& opt, bool with_controller = true) {
  if (with_controller) {
    app->add_option("--controller", opt.controller, "p | dapi | fdpd")
        ->check(CLI::IsMember({"p", "dapi", "fdpd"}));
  }
  app->add_option("--gains-file", opt.gains_file, "key = value gains file (overrides gain flags)");
  app->add_option("--f", opt.f, "relative position gain");
  app->add_option("--g", opt.g, "relative velocity gain");
  app->add_option("--f0", opt.f0, "absolute position gain");
  app->add_option("--g0", opt.g0, "absolute velocity gain");
  app->add_option("--ki", opt.ki, "DAPI integral gain");
  app->add_option("--c", opt.c, "DAPI averaging-filter gain");
  app->add_option("--kd", opt.kd, "F-DPD derivative gain");
  app->add_option("--tau", opt.tau, "F-DPD filter time constant");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameterError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

WeightedGraph make_graph(const GraphOptions& opt) {
  if (opt.kind == "path") return build_path(opt.n, opt.weight);
  if (opt.kind == "ring") return build_ring(opt.n, opt.weight);
  if (opt.kind == "torus") return build_torus(opt.n, opt.dim, opt.weight);
  if (opt.kind == "complete") return build_complete(opt.n, opt.weight);
  if (opt.edges.empty()) throw InvalidParameterError("--graph file needs --edges");
  return parse_edge_list(read_file(opt.edges));
}

Gains make_gains(const GainOptions& opt) {
  if (!opt.gains_file.empty()) return parse_gains_config(read_file(opt.gains_file));
  Gains gains;
  if (opt.controller == "p") gains = PGains{opt.f, opt.g, opt.f0, opt.g0};
  else if (opt.controller == "dapi") gains = DapiGains{opt.f, opt.g, opt.g0, opt.ki, opt.c};
  else gains = FdpdGains{opt.f, opt.g, opt.f0, opt.kd, opt.tau};
  validate(gains);
  return gains;
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw InvalidParameterError("cannot write " + out_path);
  out << text;
}

int run_spectrum(const GraphOptions& graph, const std::string& out) {
  const auto spec = spectrum(make_graph(graph));
  std::ostringstream csv;
  csv << "n,lambda\n";
  for (int k = 0; k < spec.size(); ++k) csv << k + 1 << ',' << format_double(spec.eigenvalues[k]) << '\n';
  emit(out, csv.str());
  if (!spec.connected()) std::cerr << "warning: graph is disconnected\n";
  return 0;
}

int run_vn(const GraphOptions& graph_opt, const GainOptions& gain_opt, const std::string& method,
           const std::string& out) {
  const auto graph = make_graph(graph_opt);
  const auto gains = make_gains(gain_opt);
  VarianceReport report;
  if (method == "closed") {
    report = vn_closed_form(spectrum(graph), gains);
  } else if (method == "modal") {
    report = vn_modal_oracle(spectrum(graph), gains);
  } else {
    report = vn_full_oracle(assemble(graph, gains));
  }
  emit(out, to_csv(report));
  return 0;
}

int run_tune(const GraphOptions& graph_opt, const GainOptions& gain_opt, ScalarSearchConfig cfg,
             const std::string& out) {
  GainOptions opt = gain_opt;
  opt.controller = "dapi";
  const auto gains = std::get<DapiGains>(make_gains(opt));
  const auto spec = spectrum(make_graph(graph_opt));
  const auto verdict = classify_c_star(spec, gains);
  const auto result = c_star_numeric(spec, gains, cfg);
  std::ostringstream csv;
  csv << "c,gridscan_vn\n";
  for (const auto& [c, v] : result.grid) csv << format_double(c) << ',' << format_double(v) << '\n';
  csv << "c_star," << format_double(result.c_star) << ",v_star," << format_double(result.v_star)
      << ",verdict," << to_string(verdict.verdict) << '\n';
  emit(out, csv.str());
  return 0;
}

struct SimulateOptions {
  std::string scenario;
  double dt = 0.0;
  double horizon = 0.0;
  double noise = 1.0;
  double burn_in = -1.0;
  std::uint64_t seed = 0;
  int record_every = 0;
  bool with_v = false;
  bool with_z = false;
};

int run_simulate(const GraphOptions& graph_opt, const GainOptions& gain_opt,
                 const SimulateOptions& opt, const std::string& out) {
  ClosedLoopSystem sys;
  SimConfig cfg;
  double burn_in = 0.0;
  if (!opt.scenario.empty()) {
    const auto scenario = parse_scenario(opt.scenario);
    if (!scenario) throw InvalidParameterError("unknown scenario " + opt.scenario);
    auto setup = scenario_setup(*scenario, opt.seed);
    sys = std::move(setup.system);
    cfg = setup.config;
    burn_in = setup.burn_in;
  } else {
    sys = assemble(make_graph(graph_opt), make_gains(gain_opt));
    cfg.seed = opt.seed;
    cfg.dt = suggest_dt(sys);
  }
  if (opt.dt > 0.0) cfg.dt = opt.dt;
  if (opt.horizon > 0.0) cfg.horizon = opt.horizon;
  if (opt.record_every > 0) cfg.record_every = opt.record_every;
  cfg.noise_intensity = opt.noise;
  if (opt.scenario.empty() || opt.horizon > 0.0) burn_in = default_burn_in(sys, cfg.horizon);
  if (opt.burn_in >= 0.0) burn_in = opt.burn_in;

  const auto traj = simulate_em(sys, cfg);
  for (const auto& w : traj.warnings) std::cerr << "warning: " << w << '\n';
  emit(out, to_csv(traj, opt.with_v, opt.with_z));
  try {
    std::cerr << "dt " << format_double(cfg.dt) << ", burn-in " << format_double(burn_in)
              << ", empirical V_N " << format_double(empirical_vn(traj, burn_in)) << '\n';
  } catch (const WindowError&) {
    std::cerr << "burn-in covers the whole horizon; no V_N estimate\n";
  }
  return 0;
}

int run_scale(const std::string& family_name, int dim, double weight, const GainOptions& gain_opt,
              const std::string& sizes_text, const std::string& window, const std::string& out) {
  const auto family = parse_graph_family(family_name);
  if (!family) throw InvalidParameterError("unknown family " + family_name);
  std::optional<std::pair<int, int>> fit_window;
  if (!window.empty()) {
    const auto colon = window.find(':');
    if (colon == std::string::npos) throw InvalidParameterError("--window expects lo:hi");
    fit_window = std::pair{std::stoi(window.substr(0, colon)), std::stoi(window.substr(colon + 1))};
  }
  const auto result = run_scaling({*family, dim, weight}, make_gains(gain_opt), parse_sizes(sizes_text),
                                  fit_window);
  emit(out, to_csv(result));
  if (result.fitted_exponent) {
    std::cerr << "fitted exponent " << format_double(*result.fitted_exponent) << " over N in ["
              << result.fit_window.first << ", " << result.fit_window.second << "]\n";
  } else {
    std::cerr << "too few finite points in the fit window for an exponent\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coherence of double-integrator consensus networks"};
  app.require_subcommand(1);

  GraphOptions graph;
  GainOptions gains;
  std::string out;

  auto* spectrum_cmd = app.add_subcommand("spectrum", "Laplacian eigenvalues");
  add_graph_options(spectrum_cmd, graph);
  spectrum_cmd->add_option("--out", out, "output CSV file");

  std::string method = "closed";
  auto* vn_cmd = app.add_subcommand("vn", "steady-state per-node variance V_N");
  add_graph_options(vn_cmd, graph);
  add_gain_options(vn_cmd, gains);
  vn_cmd->add_option("--method", method, "closed | modal | full")
      ->check(CLI::IsMember({"closed", "modal", "full"}));
  vn_cmd->add_option("--out", out, "output CSV file");

  ScalarSearchConfig search;
  auto* tune_cmd = app.add_subcommand("tune", "optimal DAPI averaging gain c*");
  add_graph_options(tune_cmd, graph);
  add_gain_options(tune_cmd, gains, false);
  tune_cmd->add_option("--bracket-hi", search.bracket_hi, "upper end of the c search (0 = auto)");
  tune_cmd->add_option("--tol", search.abs_tolerance, "absolute tolerance on c");
  tune_cmd->add_option("--max-iter", search.max_iterations, "golden-section iteration limit");
  tune_cmd->add_option("--out", out, "output CSV file");

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Euler-Maruyama simulation");
  add_graph_options(sim_cmd, graph);
  add_gain_options(sim_cmd, gains);
  sim_cmd->add_option("--scenario", sim.scenario,
                      "dapi_path_10 | dapi_path_100 | p_path_10 | p_path_100 | "
                      "fdpd_platoon_100 | p_platoon_100");
  sim_cmd->add_option("--dt", sim.dt, "step size (default: scenario or bias-based suggestion)");
  sim_cmd->add_option("--horizon", sim.horizon, "simulated time");
  sim_cmd->add_option("--noise", sim.noise, "noise intensity");
  sim_cmd->add_option("--burn-in", sim.burn_in, "burn-in for the V_N estimate");
  sim_cmd->add_option("--seed", sim.seed, "random seed");
  sim_cmd->add_option("--record-every", sim.record_every, "keep every k-th step");
  sim_cmd->add_flag("--with-v", sim.with_v, "append velocity columns");
  sim_cmd->add_flag("--with-z", sim.with_z, "append controller-state columns");
  sim_cmd->add_option("--out", out, "output CSV file");

  std::string family = "ring";
  std::string sizes = "geometric:64:4096:2";
  std::string window;
  auto* scale_cmd = app.add_subcommand("scale", "V_N across network sizes");
  scale_cmd->add_option("--family", family, "path | ring | torus | complete")
      ->check(CLI::IsMember({"path", "ring", "torus", "complete"}));
  scale_cmd->add_option("--dim", graph.dim, "torus dimension");
  scale_cmd->add_option("--weight", graph.weight, "uniform edge weight");
  add_gain_options(scale_cmd, gains);
  scale_cmd->add_option("--sizes", sizes, "comma list or geometric:start:stop:factor");
  scale_cmd->add_option("--window", window, "fit window lo:hi in node counts");
  scale_cmd->add_option("--out", out, "output CSV file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*spectrum_cmd) return run_spectrum(graph, out);
    if (*vn_cmd) return run_vn(graph, gains, method, out);
    if (*tune_cmd) return run_tune(graph, gains, search, out);
    if (*sim_cmd) return run_simulate(graph, gains, sim, out);
    if (*scale_cmd) return run_scale(family, graph.dim, graph.weight, gains, sizes, window, out);
  } catch (const UnboundedVarianceError& e) {
    std::cerr << "unbounded variance: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
