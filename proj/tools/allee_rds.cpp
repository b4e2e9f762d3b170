// Command-line front end for two-map switching systems: analyze maps,
// certify theorem hypotheses, simulate trajectories, estimate absorption
// probabilities and first-passage times, and sweep T(p).
//
// Exit codes: 0 success (certify: all hypotheses hold), 1 certify found a
// failing hypothesis, 2 invalid flags or config, 3 map fails the Allee
// axioms or feature extraction, 4 estimate unavailable (all trials
// censored).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "allee/certify.hpp"
#include "allee/io.hpp"
#include "allee/montecarlo.hpp"
#include "allee/rds.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSomeFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNotAllee = 3;
constexpr int kExitUnavailable = 4;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw allee::ConfigError("cannot open output file '" + out_path + "'");
  out << text;
}

std::vector<double> parse_p_grid(const std::string& csv) {
  std::vector<double> grid;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      grid.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw allee::ConfigError("cannot parse p-grid entry '" + tok + "'");
    }
  }
  if (grid.empty()) throw allee::ConfigError("empty p grid");
  return grid;
}

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 0;
};

int cmd_analyze(const CommonArgs& args, int grid_n) {
  const allee::RdsConfig config = allee::load_system_config(args.config_path);
  const allee::ValidationReport vf = allee::validate_allee(config.f, grid_n);
  const allee::ValidationReport vg = allee::validate_allee(config.g, grid_n);

  nlohmann::json j;
  j["config"] = allee::resolved_config_json(config);
  j["f"] = allee::validation_to_json(vf);
  j["g"] = allee::validation_to_json(vg);
  if (vf.features && vg.features) {
    j["ordering"] = allee::ordering_to_json(
        allee::classify_ordering(*vf.features, *vg.features));
  }
  emit(j.dump(2), args.out_path);
  if (!vf.all_pass || !vg.all_pass) {
    std::cerr << "allee axiom validation failed: "
              << (!vf.all_pass ? "f: " + vf.failure : "g: " + vg.failure)
              << "\n";
    return kExitNotAllee;
  }
  return kExitOk;
}

int cmd_certify(const CommonArgs& args, const std::string& theorem,
                std::optional<double> delta) {
  const allee::RdsConfig config = allee::load_system_config(args.config_path);
  const allee::TheoremId id = allee::theorem_from_string(theorem);
  const allee::CertificateReport report =
      allee::certify(id, config.f, config.g, delta);
  nlohmann::json j = allee::certificate_to_json(report);
  j["config"] = allee::resolved_config_json(config);
  emit(j.dump(2), args.out_path);
  return report.all_hold ? kExitOk : kExitSomeFail;
}

int cmd_simulate(const CommonArgs& args, double x0, std::size_t steps) {
  const allee::RdsConfig config = allee::load_system_config(args.config_path);
  allee::Trajectory traj = allee::simulate(config, x0, args.seed, steps);

  const allee::MapFeatures ff = allee::analyze_map(config.f);
  const allee::MapFeatures fg = allee::analyze_map(config.g);
  allee::label_outcome(traj,
                       allee::default_outcome_options(ff, fg, config.b));

  std::ostringstream csv;
  allee::write_trajectory_csv(csv, traj);
  emit(csv.str(), args.out_path);

  const char* label = traj.outcome == allee::Outcome::Extinct    ? "Extinct"
                      : traj.outcome == allee::Outcome::Survived ? "Survived"
                                                                 : "Undecided";
  std::cerr << "outcome=" << label << " step=" << traj.outcome_step
            << " seed=" << traj.seed << "\n";
  return kExitOk;
}

int cmd_estimate(const CommonArgs& args, const std::string& mode, double x0,
                 std::size_t n_trials, std::size_t horizon, std::size_t cap,
                 std::optional<double> threshold, bool adaptive) {
  const allee::RdsConfig config = allee::load_system_config(args.config_path);
  if (n_trials == 0) throw allee::InputError("--n-trials must be >= 1");

  nlohmann::json j;
  j["config"] = allee::resolved_config_json(config);
  nlohmann::json params;
  params["x0"] = x0;
  params["seed"] = args.seed;
  params["n_trials"] = n_trials;
  params["mode"] = mode;

  if (mode == "absorption") {
    allee::AbsorptionEstimate est;
    if (adaptive) {
      est = allee::estimate_absorption_adaptive(config, x0, n_trials,
                                                args.seed);
    } else {
      est = allee::estimate_absorption(config, x0, n_trials, horizon,
                                       args.seed);
    }
    params["horizon"] = est.p0.horizon;
    if (args.format == "csv") {
      std::ostringstream csv;
      csv << "kind,estimate,ci_low,ci_high,n_trials,n_undecided,seed,horizon\n";
      for (const auto& [kind, r] :
           {std::pair{"p0", est.p0}, {"p1", est.p1}}) {
        csv << kind << ',' << allee::format_double(r.estimate) << ','
            << allee::format_double(r.ci_low) << ','
            << allee::format_double(r.ci_high) << ',' << r.n_trials << ','
            << r.n_undecided << ',' << r.seed << ',' << r.horizon << '\n';
      }
      emit(csv.str(), args.out_path);
      return kExitOk;
    }
    j["params"] = params;
    j["result"] = allee::absorption_to_json(est);
    emit(j.dump(2), args.out_path);
  } else if (mode == "hitting") {
    double thr;
    if (threshold) {
      thr = *threshold;
    } else {
      const allee::MapFeatures ff = allee::analyze_map(config.f);
      const allee::MapFeatures fg = allee::analyze_map(config.g);
      thr = std::min(ff.A, fg.A);
    }
    params["threshold"] = thr;
    params["cap"] = cap;
    const allee::EstimateResult est = allee::estimate_hitting_time(
        config, x0, thr, n_trials, cap, args.seed);
    if (args.format == "csv") {
      std::ostringstream csv;
      csv << "kind,estimate,ci_low,ci_high,n_trials,n_undecided,seed,horizon\n"
          << "hitting," << allee::format_double(est.estimate) << ','
          << allee::format_double(est.ci_low) << ','
          << allee::format_double(est.ci_high) << ',' << est.n_trials << ','
          << est.n_undecided << ',' << est.seed << ',' << est.horizon << '\n';
      emit(csv.str(), args.out_path);
      return kExitOk;
    }
    j["params"] = params;
    j["result"] = allee::estimate_to_json(est);
    emit(j.dump(2), args.out_path);
  } else {
    throw allee::ConfigError("unknown estimate mode '" + mode + "'");
  }
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& p_grid_csv, double x0,
              std::size_t n_trials, std::size_t cap) {
  const allee::RdsConfig config = allee::load_system_config(args.config_path);
  const std::vector<double> p_grid = parse_p_grid(p_grid_csv);
  if (n_trials == 0) throw allee::InputError("--n-trials must be >= 1");

  const allee::SweepResult sweep = allee::sweep_T_of_p(
      config.f, config.g, p_grid, x0, n_trials, cap, args.seed);
  for (const allee::SweepPoint& pt : sweep.points) {
    std::cerr << "p=" << pt.p << " "
              << (pt.value ? "done" : "failed: " + pt.error) << "\n";
  }

  if (args.format == "csv") {
    std::ostringstream csv;
    allee::write_sweep_csv(csv, sweep);
    emit(csv.str(), args.out_path);
  } else {
    nlohmann::json j;
    j["config"] = allee::resolved_config_json(config);
    j["result"] = allee::sweep_to_json(sweep);
    emit(j.dump(2), args.out_path);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random switching systems of two Allee maps: analysis, "
               "certification and Monte Carlo estimation"};
  app.require_subcommand(1);

  CommonArgs common;

  // analyze
  auto* analyze = app.add_subcommand(
      "analyze", "Extract fixed points, peaks and the ordering of both maps");
  int grid_n = allee::kSetScanGrid;
  analyze->add_option("--config", common.config_path, "system config JSON")
      ->required();
  analyze->add_option("--grid", grid_n, "axiom-scan grid size (>= 1000)");
  analyze->add_option("--out", common.out_path, "output path (default stdout)");
  analyze->add_option("--format", common.format)
      ->check(CLI::IsMember({"json"}));

  // certify
  auto* certify = app.add_subcommand(
      "certify", "Check the hypotheses of one of the theorems T1..T5");
  std::string theorem;
  double delta_flag = -1.0;
  certify->add_option("--config", common.config_path)->required();
  certify->add_option("--theorem", theorem, "T1|T2|T3|T4|T5")->required();
  certify->add_option("--delta", delta_flag,
                      "noise half-width for T2/T5 (positive)");
  certify->add_option("--out", common.out_path);
  certify->add_option("--format", common.format)
      ->check(CLI::IsMember({"json"}));

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "Generate one trajectory and classify its outcome");
  double x0 = 0.0;
  std::size_t steps = 1000;
  simulate->add_option("--config", common.config_path)->required();
  simulate->add_option("--x0", x0, "initial state in [0, b]")->required();
  simulate->add_option("--steps", steps, "number of steps (>= 1)");
  simulate->add_option("--seed", common.seed, "RNG seed");
  simulate->add_option("--out", common.out_path, "trajectory CSV path");

  // estimate
  auto* estimate = app.add_subcommand(
      "estimate",
      "Monte Carlo absorption probabilities or mean first-passage time");
  std::string mode = "absorption";
  std::size_t n_trials = 10000;
  std::size_t horizon = 1000;
  std::size_t cap = 100000;
  double threshold_flag = -1.0;
  bool adaptive = false;
  estimate->add_option("--config", common.config_path)->required();
  estimate->add_option("--x0", x0)->required();
  estimate->add_option("--mode", mode)
      ->check(CLI::IsMember({"absorption", "hitting"}));
  estimate->add_option("--n-trials", n_trials);
  estimate->add_option("--horizon", horizon, "steps per trial (absorption)");
  estimate->add_option("--cap", cap, "censoring cap (hitting)");
  estimate->add_option("--threshold", threshold_flag,
                       "passage threshold (default min(A_f, A_g))");
  estimate->add_flag("--adaptive", adaptive,
                     "double the horizon until the undecided fraction is "
                     "negligible");
  estimate->add_option("--seed", common.seed);
  estimate->add_option("--out", common.out_path);
  estimate->add_option("--format", common.format)
      ->check(CLI::IsMember({"json", "csv"}));

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "Mean first-passage time across a grid of probabilities p");
  std::string p_grid_csv;
  std::size_t sweep_trials = 2000;
  std::size_t sweep_cap = 100000;
  sweep->add_option("--config", common.config_path)->required();
  sweep->add_option("--p-grid", p_grid_csv, "comma-separated p values")
      ->required();
  sweep->add_option("--x0", x0)->required();
  sweep->add_option("--n-trials", sweep_trials);
  sweep->add_option("--cap", sweep_cap);
  sweep->add_option("--seed", common.seed);
  sweep->add_option("--out", common.out_path);
  sweep->add_option("--format", common.format)
      ->check(CLI::IsMember({"json", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(common, grid_n);
    if (certify->parsed()) {
      std::optional<double> delta;
      if (certify->count("--delta")) delta = delta_flag;
      return cmd_certify(common, theorem, delta);
    }
    if (simulate->parsed()) return cmd_simulate(common, x0, steps);
    if (estimate->parsed()) {
      std::optional<double> threshold;
      if (estimate->count("--threshold")) threshold = threshold_flag;
      return cmd_estimate(common, mode, x0, n_trials, horizon, cap, threshold,
                          adaptive);
    }
    if (sweep->parsed()) {
      common.format = sweep->count("--format") ? common.format : "csv";
      return cmd_sweep(common, p_grid_csv, x0, sweep_trials, sweep_cap);
    }
  } catch (const allee::EstimateUnavailableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnavailable;
  } catch (const allee::NotAnAlleeMapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotAllee;
  } catch (const allee::NotUnimodalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotAllee;
  } catch (const allee::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const allee::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
