#include "allee/rds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace allee {

void RdsConfig::validate() const {
  f.validate();
  g.validate();
  if (!(p > 0.0) || !(p < 1.0))
    throw ConfigError("switching probability p must lie in (0, 1), got " +
                      std::to_string(p));
  if (!(b > 0.0) || !std::isfinite(b))
    throw ConfigError("clamp bound b must be finite and positive");
  if (f.domain_bound != b || g.domain_bound != b)
    throw ConfigError("both maps must share the system domain bound b");
  if (perturbation) {
    if (!(perturbation->delta > 0.0))
      throw ConfigError("perturbation half-width delta must be positive");
  }
}

namespace {

inline double draw_noise(const PerturbationSpec& pert, Xoshiro256pp& rng) {
  switch (pert.distribution) {
    case NoiseLaw::Uniform:
      return pert.delta * (2.0 * rng.next_double() - 1.0);
    case NoiseLaw::TruncatedTriangular:
      // Symmetric triangle on (-delta, delta), peak at 0.
      return pert.delta * (rng.next_double() + rng.next_double() - 1.0);
  }
  return 0.0;
}

}  // namespace

double step(const RdsConfig& config, double x, bool choose_f, double eps) {
  const double y = choose_f ? eval_unchecked(config.f, x)
                            : eval_unchecked(config.g, x);
  if (config.perturbation) return clamp_state(y + eps, config.b);
  // A valid map keeps [0,b] invariant; the clamp only absorbs the last ulp
  // when the state sits at the peak that defines b.
  return clamp_state(y, config.b);
}

TrajectorySimulator::TrajectorySimulator(const RdsConfig& config, double x0,
                                         std::uint64_t seed)
    : config_(&config), rng_(seed), x_(x0) {
  if (x0 < 0.0 || x0 > config.b || !std::isfinite(x0)) {
    std::ostringstream os;
    os << "initial state " << x0 << " outside [0, " << config.b << "]";
    throw InputError(os.str());
  }
}

double TrajectorySimulator::advance() {
  // Fixed draw order per step: coin first, then noise.
  const bool choose_f = rng_.next_double() < config_->p;
  const double eps =
      config_->perturbation ? draw_noise(*config_->perturbation, rng_) : 0.0;
  last_f_ = choose_f;
  x_ = step(*config_, x_, choose_f, eps);
  return x_;
}

Trajectory simulate(const RdsConfig& config, double x0, std::uint64_t seed,
                    std::size_t n_steps) {
  config.validate();
  if (n_steps < 1) throw InputError("n_steps must be >= 1");
  TrajectorySimulator sim(config, x0, seed);
  Trajectory traj;
  traj.x0 = x0;
  traj.seed = seed;
  traj.states.reserve(n_steps + 1);
  traj.choices.reserve(n_steps);
  traj.states.push_back(x0);
  for (std::size_t i = 0; i < n_steps; ++i) {
    traj.states.push_back(sim.advance());
    traj.choices.push_back(sim.last_choice_f() ? 1 : 0);
  }
  return traj;
}

OutcomeOptions default_outcome_options(const MapFeatures& ff,
                                       const MapFeatures& fg, double b) {
  OutcomeOptions opts;
  const double a_min = std::min(ff.A, fg.A);
  opts.eps_extinct = a_min / 100.0;
  opts.window = 50;
  const bool both_increasing =
      ff.monotonicity == Monotonicity::StrictlyIncreasing &&
      fg.monotonicity == Monotonicity::StrictlyIncreasing;
  if (both_increasing && ff.A < fg.A && fg.A < ff.K && ff.K < fg.K) {
    opts.trap_lo = ff.K;
    opts.trap_hi = fg.K;
  } else {
    opts.trap_lo = a_min;
    opts.trap_hi = b;
  }
  return opts;
}

Outcome classify_outcome(const std::vector<double>& states,
                         const OutcomeOptions& opts,
                         std::size_t* outcome_step_out) {
  OutcomeTracker tracker(opts);
  for (double x : states) tracker.feed(x);
  if (outcome_step_out) *outcome_step_out = tracker.outcome_step();
  return tracker.result();
}

void label_outcome(Trajectory& traj, const OutcomeOptions& opts) {
  traj.outcome = classify_outcome(traj.states, opts, &traj.outcome_step);
}

Outcome classify_outcome(const Trajectory& traj, const MapFeatures& ff,
                         const MapFeatures& fg, double eps_extinct,
                         std::size_t window, std::size_t* outcome_step_out) {
  // States are confined to [0,b], so an unbounded upper trap edge matches
  // the "everything above min(A_f, A_g)" fallback.
  OutcomeOptions opts =
      default_outcome_options(ff, fg, std::numeric_limits<double>::infinity());
  opts.eps_extinct = eps_extinct;
  opts.window = window;
  return classify_outcome(traj.states, opts, outcome_step_out);
}

}  // namespace allee
