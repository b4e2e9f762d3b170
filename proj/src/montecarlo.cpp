#include "allee/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace allee {

int thread_cap() {
  static const int cap = [] {
    const char* env = std::getenv("ALLEE_RDS_THREADS");
    if (!env) return 0;
    const long v = std::strtol(env, nullptr, 10);
    return v > 0 ? static_cast<int>(v) : 0;
  }();
  return cap;
}

namespace {

#ifdef _OPENMP
int effective_threads() {
  const int cap = thread_cap();
  return cap > 0 ? cap : omp_get_max_threads();
}
#endif

// Exceptions must not unwind out of an OpenMP region, so argument
// problems are rejected before any parallel loop starts.
void check_start_state(const RdsConfig& config, double x0) {
  if (x0 < 0.0 || x0 > config.b || !std::isfinite(x0))
    throw InputError("initial state " + std::to_string(x0) +
                     " outside [0, " + std::to_string(config.b) + "]");
}

void check_outcome_options(const OutcomeOptions& opts) {
  if (opts.window == 0)
    throw InputError("classification window must be >= 1");
}

TrialOutcome run_one_outcome(const RdsConfig& config, double x0,
                             std::size_t horizon, std::uint64_t subseed,
                             const OutcomeOptions& opts) {
  TrajectorySimulator sim(config, x0, subseed);
  OutcomeTracker tracker(opts);
  tracker.feed(x0);
  for (std::size_t t = 0; t < horizon; ++t) tracker.feed(sim.advance());
  return {tracker.result(), tracker.outcome_step()};
}

std::size_t run_one_hitting(const RdsConfig& config, double x0,
                            double threshold, std::size_t cap,
                            std::uint64_t subseed) {
  TrajectorySimulator sim(config, x0, subseed);
  for (std::size_t t = 1; t <= cap; ++t)
    if (sim.advance() < threshold) return t;
  return 0;  // censored
}

}  // namespace

std::vector<TrialOutcome> run_outcome_batch_serial(
    const RdsConfig& config, double x0, std::size_t horizon,
    std::uint64_t seed, std::size_t first_trial, std::size_t n_trials,
    const OutcomeOptions& opts) {
  check_start_state(config, x0);
  check_outcome_options(opts);
  std::vector<TrialOutcome> out(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i)
    out[i] = run_one_outcome(config, x0, horizon,
                             derive_subseed(seed, first_trial + i), opts);
  return out;
}

std::vector<TrialOutcome> run_outcome_batch(
    const RdsConfig& config, double x0, std::size_t horizon,
    std::uint64_t seed, std::size_t first_trial, std::size_t n_trials,
    const OutcomeOptions& opts) {
  check_start_state(config, x0);
  check_outcome_options(opts);
  std::vector<TrialOutcome> out(n_trials);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(effective_threads())
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_trials); ++i)
    out[i] = run_one_outcome(config, x0, horizon,
                             derive_subseed(seed, first_trial + i), opts);
  return out;
}

std::vector<std::size_t> run_hitting_batch_serial(
    const RdsConfig& config, double x0, double threshold, std::size_t cap,
    std::uint64_t seed, std::size_t first_trial, std::size_t n_trials) {
  check_start_state(config, x0);
  std::vector<std::size_t> out(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i)
    out[i] = run_one_hitting(config, x0, threshold, cap,
                             derive_subseed(seed, first_trial + i));
  return out;
}

std::vector<std::size_t> run_hitting_batch(
    const RdsConfig& config, double x0, double threshold, std::size_t cap,
    std::uint64_t seed, std::size_t first_trial, std::size_t n_trials) {
  check_start_state(config, x0);
  std::vector<std::size_t> out(n_trials);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(effective_threads())
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n_trials); ++i)
    out[i] = run_one_hitting(config, x0, threshold, cap,
                             derive_subseed(seed, first_trial + i));
  return out;
}

namespace {

AbsorptionEstimate summarize_outcomes(const std::vector<TrialOutcome>& outcomes,
                                      std::uint64_t seed,
                                      std::size_t horizon) {
  const std::size_t n = outcomes.size();
  std::size_t extinct = 0, survived = 0;
  for (const TrialOutcome& o : outcomes) {
    if (o.outcome == Outcome::Extinct) ++extinct;
    if (o.outcome == Outcome::Survived) ++survived;
  }
  const std::size_t undecided = n - extinct - survived;

  AbsorptionEstimate est;
  const auto fill = [&](EstimateResult& r, std::size_t k) {
    r.estimate = static_cast<double>(k) / static_cast<double>(n);
    const ConfidenceInterval ci = wilson_interval(k, n);
    r.ci_low = ci.lo;
    r.ci_high = ci.hi;
    r.n_trials = n;
    r.n_undecided = undecided;
    r.seed = seed;
    r.horizon = horizon;
  };
  fill(est.p0, extinct);
  fill(est.p1, survived);
  return est;
}

}  // namespace

AbsorptionEstimate estimate_absorption(const RdsConfig& config, double x0,
                                       std::size_t n_trials,
                                       std::size_t horizon, std::uint64_t seed,
                                       const OutcomeOptions* opts) {
  config.validate();
  if (n_trials == 0) throw InputError("n_trials must be >= 1");
  OutcomeOptions effective;
  if (opts) {
    effective = *opts;
  } else {
    effective = default_outcome_options(analyze_map(config.f),
                                        analyze_map(config.g), config.b);
  }
  const auto outcomes =
      run_outcome_batch(config, x0, horizon, seed, 0, n_trials, effective);
  AbsorptionEstimate est = summarize_outcomes(outcomes, seed, horizon);
  est.classification = effective;
  return est;
}

AbsorptionEstimate estimate_absorption_adaptive(const RdsConfig& config,
                                                double x0,
                                                std::size_t n_trials,
                                                std::uint64_t seed,
                                                const HorizonPolicy& policy,
                                                const OutcomeOptions* opts) {
  std::size_t horizon = policy.start;
  for (;;) {
    AbsorptionEstimate est =
        estimate_absorption(config, x0, n_trials, horizon, seed, opts);
    const double undecided_fraction =
        static_cast<double>(est.p0.n_undecided) /
        static_cast<double>(n_trials);
    if (undecided_fraction <= policy.max_undecided_fraction ||
        horizon >= policy.cap)
      return est;
    horizon = std::min(policy.cap, horizon * 2);
  }
}

EstimateResult estimate_hitting_time(const RdsConfig& config, double x0,
                                     double threshold, std::size_t n_trials,
                                     std::size_t cap, std::uint64_t seed) {
  config.validate();
  if (n_trials == 0) throw InputError("n_trials must be >= 1");
  if (!(threshold > 0.0) || !(threshold < config.b))
    throw InputError("threshold must lie in (0, b)");
  if (!(x0 > threshold))
    throw InputError("x0 must start above the threshold");

  const auto times =
      run_hitting_batch(config, x0, threshold, cap, seed, 0, n_trials);
  std::size_t censored = 0;
  double sum = 0.0;
  std::size_t hit = 0;
  for (std::size_t t : times) {
    if (t == 0) {
      ++censored;
    } else {
      sum += static_cast<double>(t);
      ++hit;
    }
  }
  if (hit == 0)
    throw EstimateUnavailableError(
        "all " + std::to_string(censored) + " trials censored at cap " +
            std::to_string(cap),
        censored);

  const double mean = sum / static_cast<double>(hit);
  double ss = 0.0;
  for (std::size_t t : times)
    if (t != 0) {
      const double d = static_cast<double>(t) - mean;
      ss += d * d;
    }
  const double sd =
      hit > 1 ? std::sqrt(ss / static_cast<double>(hit - 1)) : 0.0;

  EstimateResult r;
  r.estimate = mean;
  const ConfidenceInterval ci = t_interval(mean, sd, hit);
  r.ci_low = ci.lo;
  r.ci_high = ci.hi;
  r.degenerate_ci = hit == 1;
  r.n_trials = n_trials;
  r.n_undecided = censored;
  r.seed = seed;
  r.horizon = cap;
  return r;
}

SweepResult sweep_T_of_p(const MapSpec& f, const MapSpec& g,
                         const std::vector<double>& p_grid, double x0,
                         std::size_t n_trials, std::size_t cap,
                         std::uint64_t seed) {
  if (p_grid.empty()) throw InputError("p grid must not be empty");
  if (!std::is_sorted(p_grid.begin(), p_grid.end()))
    throw InputError("p grid must be sorted ascending");
  for (double p : p_grid)
    if (!(p > 0.0) || !(p < 1.0))
      throw InputError("every p must lie in (0, 1)");

  // Standalone maps may carry their individual natural bounds; the
  // two-map system shares the larger one.
  const double b = std::max(f.domain_bound, g.domain_bound);
  MapSpec fb = f;
  MapSpec gb = g;
  fb.domain_bound = b;
  gb.domain_bound = b;

  const MapFeatures ff = find_fixed_points(fb);
  const MapFeatures fg = find_fixed_points(gb);
  const double threshold = std::min(ff.A, fg.A);

  SweepResult sweep;
  sweep.p_grid = p_grid;
  sweep.x0 = x0;
  sweep.threshold = threshold;
  sweep.n_trials = n_trials;
  sweep.cap = cap;
  sweep.seed = seed;

  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    RdsConfig config;
    config.f = fb;
    config.g = gb;
    config.p = p_grid[i];
    config.b = b;
    SweepPoint point;
    point.p = p_grid[i];
    const std::uint64_t point_seed = derive_subseed(seed, i);
    try {
      point.value = estimate_hitting_time(config, x0, threshold, n_trials,
                                          cap, point_seed);
    } catch (const Error& e) {
      point.error = e.what();
    }
    sweep.points.push_back(std::move(point));
  }
  return sweep;
}

ExtinctionReport verify_extinction_theorem(const RdsConfig& config,
                                           const std::vector<double>& x0_grid,
                                           std::size_t n_trials,
                                           std::uint64_t seed,
                                           const HorizonPolicy& policy) {
  config.validate();
  if (x0_grid.empty()) throw InputError("x0 grid must not be empty");
  const OutcomeOptions opts = default_outcome_options(
      analyze_map(config.f), analyze_map(config.g), config.b);

  ExtinctionReport report;
  report.n_trials = n_trials;
  std::size_t horizon = policy.start;
  for (;;) {
    report.rows.clear();
    std::size_t worst_undecided = 0;
    for (std::size_t j = 0; j < x0_grid.size(); ++j) {
      const std::uint64_t row_seed = derive_subseed(seed, j);
      const auto outcomes = run_outcome_batch(config, x0_grid[j], horizon,
                                              row_seed, 0, n_trials, opts);
      std::size_t extinct = 0, undecided = 0;
      for (const TrialOutcome& o : outcomes) {
        if (o.outcome == Outcome::Extinct) ++extinct;
        if (o.outcome == Outcome::Undecided) ++undecided;
      }
      ExtinctionRow row;
      row.x0 = x0_grid[j];
      row.extinct_fraction =
          static_cast<double>(extinct) / static_cast<double>(n_trials);
      row.ci = wilson_interval(extinct, n_trials);
      row.n_undecided = undecided;
      row.flagged = row.ci.hi < 1.0;
      report.rows.push_back(row);
      worst_undecided = std::max(worst_undecided, undecided);
    }
    const double undecided_fraction =
        static_cast<double>(worst_undecided) / static_cast<double>(n_trials);
    if (undecided_fraction <= policy.max_undecided_fraction ||
        horizon >= policy.cap)
      break;
    horizon = std::min(policy.cap, horizon * 2);
  }
  report.horizon = horizon;
  report.all_extinct =
      std::all_of(report.rows.begin(), report.rows.end(),
                  [](const ExtinctionRow& r) {
                    return r.extinct_fraction == 1.0 && !r.flagged;
                  });
  return report;
}

}  // namespace allee
