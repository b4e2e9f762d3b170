#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "allee/rds.hpp"
#include "allee/stats.hpp"

namespace allee {

/// Thread cap for the parallel kernels: the ALLEE_RDS_THREADS environment
/// variable when set to a positive value, otherwise the OpenMP default.
/// Returns 0 for "auto".
int thread_cap();

struct EstimateResult {
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t n_trials = 0;
  std::size_t n_undecided = 0;  // undecided outcomes / censored hitting times
  std::uint64_t seed = 0;
  std::size_t horizon = 0;      // horizon or cap the trials ran with
  bool degenerate_ci = false;   // single-observation interval
};

struct TrialOutcome {
  Outcome outcome = Outcome::Undecided;
  std::size_t step = 0;
};

/// Classified outcomes for trials [first_trial, first_trial + n_trials),
/// each sub-seeded as derive_subseed(seed, trial index). Serial reference
/// kernel; kept alongside the parallel one for testing and benchmarking.
std::vector<TrialOutcome> run_outcome_batch_serial(
    const RdsConfig& config, double x0, std::size_t horizon,
    std::uint64_t seed, std::size_t first_trial, std::size_t n_trials,
    const OutcomeOptions& opts);

/// OpenMP kernel; bit-identical to run_outcome_batch_serial regardless of
/// the thread count (trials are index-keyed; the merge is deterministic).
std::vector<TrialOutcome> run_outcome_batch(
    const RdsConfig& config, double x0, std::size_t horizon,
    std::uint64_t seed, std::size_t first_trial, std::size_t n_trials,
    const OutcomeOptions& opts);

/// First-passage steps below `threshold` per trial; 0 marks a censored
/// trial (cap reached). Serial reference and OpenMP kernels.
std::vector<std::size_t> run_hitting_batch_serial(
    const RdsConfig& config, double x0, double threshold, std::size_t cap,
    std::uint64_t seed, std::size_t first_trial, std::size_t n_trials);
std::vector<std::size_t> run_hitting_batch(
    const RdsConfig& config, double x0, double threshold, std::size_t cap,
    std::uint64_t seed, std::size_t first_trial, std::size_t n_trials);

struct AbsorptionEstimate {
  EstimateResult p0;  // extinction
  EstimateResult p1;  // survival (trap residence)
  OutcomeOptions classification;  // the classifier the batch ran with
};

/// Proportion estimates for extinction/survival over n_trials independent
/// trajectories at a fixed horizon. Undecided trials are counted apart and
/// never folded into either proportion.
AbsorptionEstimate estimate_absorption(const RdsConfig& config, double x0,
                                       std::size_t n_trials,
                                       std::size_t horizon, std::uint64_t seed,
                                       const OutcomeOptions* opts = nullptr);

struct HorizonPolicy {
  std::size_t start = 1000;
  double max_undecided_fraction = 0.001;  // 0 = insist on none
  std::size_t cap = std::size_t{1} << 20;
};

/// estimate_absorption with the horizon doubled from policy.start until the
/// undecided fraction drops to the target (or the cap is reached).
AbsorptionEstimate estimate_absorption_adaptive(
    const RdsConfig& config, double x0, std::size_t n_trials,
    std::uint64_t seed, const HorizonPolicy& policy = {},
    const OutcomeOptions* opts = nullptr);

/// Mean first-passage time below `threshold` with a 95% t-interval.
/// Censored trials (cap reached) are excluded from the mean and counted in
/// n_undecided; throws EstimateUnavailableError when every trial censors.
EstimateResult estimate_hitting_time(const RdsConfig& config, double x0,
                                     double threshold, std::size_t n_trials,
                                     std::size_t cap, std::uint64_t seed);

struct SweepPoint {
  double p = 0.0;
  std::optional<EstimateResult> value;  // absent when the point failed
  std::string error;                    // failure reason when absent
};

struct SweepResult {
  std::vector<double> p_grid;
  std::vector<SweepPoint> points;
  double x0 = 0.0;
  double threshold = 0.0;
  std::size_t n_trials = 0;
  std::size_t cap = 0;
  std::uint64_t seed = 0;
};

/// One hitting-time estimate per grid probability, threshold fixed at
/// min(A_f, A_g). Point failures are recorded, not propagated.
SweepResult sweep_T_of_p(const MapSpec& f, const MapSpec& g,
                         const std::vector<double>& p_grid, double x0,
                         std::size_t n_trials, std::size_t cap,
                         std::uint64_t seed);

struct ExtinctionRow {
  double x0 = 0.0;
  double extinct_fraction = 0.0;
  ConfidenceInterval ci;
  std::size_t n_undecided = 0;
  bool flagged = false;  // CI excludes 1 after the final horizon
};

struct ExtinctionReport {
  std::vector<ExtinctionRow> rows;
  std::size_t horizon = 0;  // final horizon shared by all rows
  std::size_t n_trials = 0;
  bool all_extinct = false;
};

/// For each start in x0_grid, the fraction of trajectories classified
/// Extinct, with the horizon doubled until the undecided target is met for
/// every start.
ExtinctionReport verify_extinction_theorem(const RdsConfig& config,
                                           const std::vector<double>& x0_grid,
                                           std::size_t n_trials,
                                           std::uint64_t seed,
                                           const HorizonPolicy& policy = {});

}  // namespace allee
