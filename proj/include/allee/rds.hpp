#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "allee/maps.hpp"
#include "allee/random.hpp"

namespace allee {

enum class NoiseLaw { Uniform, TruncatedTriangular };

/// Additive noise on (-delta, delta) with strictly positive density.
struct PerturbationSpec {
  double delta = 0.0;
  NoiseLaw distribution = NoiseLaw::Uniform;
};

/// A two-map switching system: apply f with probability p, else g, with
/// optional clamped additive noise.
struct RdsConfig {
  MapSpec f;
  MapSpec g;
  double p = 0.5;
  std::optional<PerturbationSpec> perturbation;
  double b = 0.0;  // shared state-space and clamp bound

  void validate() const;
};

enum class Outcome { Extinct, Survived, Undecided };

struct Trajectory {
  double x0 = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> states;          // x0 .. x_N
  std::vector<std::uint8_t> choices;   // 1 = f applied, length N
  Outcome outcome = Outcome::Undecided;
  std::size_t outcome_step = 0;
};

/// Saturation onto [0, b]: 0 below, identity inside, b above.
inline double clamp_state(double x, double b) {
  if (x < 0.0) return 0.0;
  if (x > b) return b;
  return x;
}

/// One transition from x. eps must be 0 when the config has no perturbation.
double step(const RdsConfig& config, double x, bool choose_f, double eps);

/// Streaming trajectory engine. Copying the simulator checkpoints the full
/// stream state, so a copy resumed at step k reproduces the original run.
class TrajectorySimulator {
 public:
  TrajectorySimulator(const RdsConfig& config, double x0, std::uint64_t seed);

  /// Advance one step; returns the new state.
  double advance();

  double state() const { return x_; }
  bool last_choice_f() const { return last_f_; }

 private:
  const RdsConfig* config_;
  Xoshiro256pp rng_;
  double x_;
  bool last_f_ = false;
};

Trajectory simulate(const RdsConfig& config, double x0, std::uint64_t seed,
                    std::size_t n_steps);

/// Tail-window classification parameters.
struct OutcomeOptions {
  double eps_extinct = 0.0;   // Extinct: trailing window all < eps_extinct
  std::size_t window = 50;
  double trap_lo = 0.0;       // Survived: trailing window all in [trap_lo, trap_hi]
  double trap_hi = 0.0;
};

/// Default classifier: trap [K_f, K_g] for increasing pairs ordered
/// A_f < A_g < K_f < K_g, otherwise everything above min(A_f, A_g);
/// eps_extinct = min(A_f, A_g) / 100, window 50.
OutcomeOptions default_outcome_options(const MapFeatures& ff,
                                       const MapFeatures& fg, double b);

/// Classify by the trailing window of states; outcome_step_out (optional)
/// receives the first step at which the decisive window was complete.
Outcome classify_outcome(const std::vector<double>& states,
                         const OutcomeOptions& opts,
                         std::size_t* outcome_step_out = nullptr);

/// Convenience overload deriving the trap from the map features.
Outcome classify_outcome(const Trajectory& traj, const MapFeatures& ff,
                         const MapFeatures& fg, double eps_extinct,
                         std::size_t window,
                         std::size_t* outcome_step_out = nullptr);

/// Classify and store the outcome on the trajectory itself.
void label_outcome(Trajectory& traj, const OutcomeOptions& opts);

/// Incremental version of classify_outcome: feed states one at a time;
/// result() matches classify_outcome over the whole sequence.
class OutcomeTracker {
 public:
  explicit OutcomeTracker(const OutcomeOptions& opts) : opts_(opts) {}

  void feed(double x) {
    ++n_;
    if (x < opts_.eps_extinct)
      ++ext_run_;
    else
      ext_run_ = 0;
    if (x >= opts_.trap_lo && x <= opts_.trap_hi)
      ++trap_run_;
    else
      trap_run_ = 0;
  }

  Outcome result() const {
    if (ext_run_ >= opts_.window) return Outcome::Extinct;
    if (trap_run_ >= opts_.window) return Outcome::Survived;
    return Outcome::Undecided;
  }

  /// Step index (into the fed sequence, 0-based) at which the current
  /// decisive run first filled a window; n-1 when undecided.
  std::size_t outcome_step() const {
    if (result() == Outcome::Undecided) return n_ == 0 ? 0 : n_ - 1;
    const std::size_t run =
        result() == Outcome::Extinct ? ext_run_ : trap_run_;
    return (n_ - run) + opts_.window - 1;
  }

 private:
  OutcomeOptions opts_;
  std::size_t n_ = 0;
  std::size_t ext_run_ = 0;
  std::size_t trap_run_ = 0;
};

}  // namespace allee
