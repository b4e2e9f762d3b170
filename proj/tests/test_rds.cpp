#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "allee/io.hpp"
#include "allee/rds.hpp"

using namespace allee;

namespace {

RdsConfig ex1_config(double p = 0.5) {
  const double b = 4.386322154443666;
  RdsConfig cfg;
  cfg.f = MapSpec::rational_unimodal(1.1, 2.0, 3.0, b);
  cfg.g = MapSpec::rational_unimodal(1.3, 1.0, 3.3, b);
  cfg.p = p;
  cfg.b = b;
  return cfg;
}

RdsConfig sigmoid_config(double p = 0.5,
                         std::optional<PerturbationSpec> pert = {}) {
  RdsConfig cfg;
  cfg.f = MapSpec::sigmoid(2.5, 1.0, 3.0);
  cfg.g = MapSpec::sigmoid(3.0, 1.8, 3.0);
  cfg.p = p;
  cfg.b = 3.0;
  cfg.perturbation = pert;
  return cfg;
}

}  // namespace

TEST_CASE("clamp saturates onto [0, b]") {
  CHECK(clamp_state(-1.0, 5.0) == 0.0);
  CHECK(clamp_state(3.0, 5.0) == 3.0);
  CHECK(clamp_state(7.0, 5.0) == 5.0);
}

TEST_CASE("single steps: fixed points and clamping") {
  const RdsConfig cfg = ex1_config();
  CHECK(step(cfg, 0.0, true, 0.0) == 0.0);
  CHECK(step(cfg, 0.0, false, 0.0) == 0.0);

  const double Kf = 3.0 + std::sqrt(0.2);
  CHECK(step(cfg, Kf, true, 0.0) == Catch::Approx(Kf).epsilon(0.0).margin(1e-12));

  RdsConfig noisy = sigmoid_config(0.5, PerturbationSpec{0.05});
  CHECK(step(noisy, 0.001, true, -0.049) == 0.0);  // clamped at the floor
}

TEST_CASE("switching between identical maps reproduces deterministic iteration") {
  RdsConfig cfg = ex1_config();
  cfg.g = cfg.f;
  const Trajectory traj = simulate(cfg, 3.0, 42, 200);
  double x = 3.0;
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    x = eval_unchecked(cfg.f, x);
    CHECK(traj.states[i] == x);
  }
}

TEST_CASE("trajectories stay in range and absorb at zero") {
  const RdsConfig cfg = ex1_config();
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 99ull}) {
    const Trajectory traj = simulate(cfg, 3.0, seed, 5000);
    REQUIRE(traj.states.size() == 5001);
    REQUIRE(traj.choices.size() == 5000);
    CHECK(traj.states.front() == 3.0);
    bool hit_zero = false;
    for (double s : traj.states) {
      CHECK(s >= 0.0);
      CHECK(s <= cfg.b);
      if (hit_zero) CHECK(s == 0.0);
      if (s == 0.0) hit_zero = true;
    }
  }
  CHECK_THROWS_AS(simulate(cfg, -1.0, 1, 10), InputError);
  CHECK_THROWS_AS(simulate(cfg, 100.0, 1, 10), InputError);
}

TEST_CASE("simulation replays bit-for-bit from its seed") {
  for (const RdsConfig& cfg :
       {ex1_config(0.3), sigmoid_config(0.7, PerturbationSpec{0.05}),
        sigmoid_config(0.5,
                       PerturbationSpec{0.02, NoiseLaw::TruncatedTriangular})}) {
    const Trajectory a = simulate(cfg, 1.5, 777, 2000);
    const Trajectory b = simulate(cfg, 1.5, 777, 2000);
    CHECK(a.states == b.states);
    CHECK(a.choices == b.choices);

    std::ostringstream csv_a, csv_b;
    write_trajectory_csv(csv_a, a);
    write_trajectory_csv(csv_b, b);
    CHECK(csv_a.str() == csv_b.str());
  }
}

TEST_CASE("a checkpointed simulator resumes the same stream") {
  const RdsConfig cfg = sigmoid_config(0.4, PerturbationSpec{0.05});
  TrajectorySimulator sim(cfg, 1.2, 31337);
  std::vector<double> full;
  for (int i = 0; i < 100; ++i) full.push_back(sim.advance());

  TrajectorySimulator sim2(cfg, 1.2, 31337);
  for (int i = 0; i < 40; ++i) sim2.advance();
  TrajectorySimulator checkpoint = sim2;  // copy carries the RNG state
  for (int i = 40; i < 100; ++i) CHECK(checkpoint.advance() == full[i]);
}

TEST_CASE("noise stays inside (-delta, delta) and both laws differ") {
  const RdsConfig uni = sigmoid_config(0.5, PerturbationSpec{0.05});
  const RdsConfig tri = sigmoid_config(
      0.5, PerturbationSpec{0.05, NoiseLaw::TruncatedTriangular});
  const Trajectory a = simulate(uni, 1.5, 5, 500);
  const Trajectory b = simulate(tri, 1.5, 5, 500);
  CHECK(a.states != b.states);
  for (const Trajectory* t : {&a, &b})
    for (double s : t->states) {
      CHECK(s >= 0.0);
      CHECK(s <= 3.0);
    }
}

TEST_CASE("increasing-pair survival trap [Kf, Kg] is invariant") {
  const RdsConfig cfg = sigmoid_config();
  const double Kf = 2.0;
  const double Kg = (3.0 + std::sqrt(9.0 - 7.2)) / 2.0;
  Xoshiro256pp rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double x = Kf + (Kg - Kf) * rng.next_double();
    for (bool coin : {true, false}) {
      const double y = step(cfg, x, coin, 0.0);
      CHECK(y >= Kf);
      CHECK(y <= Kg);
    }
  }
}

TEST_CASE("certified noise traps are invariant under perturbed steps") {
  // Points rounded into the delta-gap sets of the sigmoid pair at
  // delta = 0.05; membership is asserted before the trap property.
  const double delta = 0.05;
  const RdsConfig cfg = sigmoid_config(0.5, PerturbationSpec{delta});
  const double w1 = 0.0586;
  const double z2 = 1.9135;
  const double w3 = 2.2775;
  const auto gap_down = [&](double x) {
    return std::min(x - eval_unchecked(cfg.f, x), x - eval_unchecked(cfg.g, x));
  };
  const auto gap_up = [&](double x) {
    return std::min(eval_unchecked(cfg.f, x) - x, eval_unchecked(cfg.g, x) - x);
  };
  REQUIRE(gap_down(w1) >= delta);
  REQUIRE(gap_up(z2) >= delta);
  REQUIRE(gap_down(w3) >= delta);

  Xoshiro256pp rng(13);
  for (int i = 0; i < 2000; ++i) {
    const double x = w1 * rng.next_double() * 0.999999;
    for (bool coin : {true, false})
      for (double eps : {-delta + 1e-12, 0.0, delta - 1e-12})
        CHECK(step(cfg, x, coin, eps) < w1);
    const double y = z2 + (w3 - z2) * rng.next_double();
    for (bool coin : {true, false})
      for (double eps : {-delta + 1e-12, 0.0, delta - 1e-12}) {
        const double ynext = step(cfg, y, coin, eps);
        CHECK(ynext > z2);
        CHECK(ynext < w3);
      }
  }
}

TEST_CASE("oversized noise lets trajectories cross both thresholds") {
  // With delta well above any certified gap the long-term behavior is
  // unpredictable: a single run wanders below the lower threshold and
  // above the upper one.
  const RdsConfig cfg = sigmoid_config(0.5, PerturbationSpec{0.5});
  const double a_lo = 0.5;                              // f threshold
  const double a_hi = (3.0 - std::sqrt(1.8)) / 2.0;     // g threshold
  bool below = false, above = false;
  const Trajectory traj = simulate(cfg, 1.0, 2718, 20000);
  for (double s : traj.states) {
    below = below || s < a_lo;
    above = above || s > a_hi;
  }
  CHECK(below);
  CHECK(above);
}

TEST_CASE("label_outcome stores the classification on the trajectory") {
  const RdsConfig cfg = sigmoid_config();
  Trajectory traj = simulate(cfg, 0.2, 5, 400);
  const OutcomeOptions opts = default_outcome_options(
      analyze_map(cfg.f), analyze_map(cfg.g), cfg.b);
  label_outcome(traj, opts);
  CHECK(traj.outcome == Outcome::Extinct);
  CHECK(traj.outcome_step > 0);
  CHECK(traj.outcome_step < traj.states.size());
}

TEST_CASE("outcome classification by trailing window") {
  OutcomeOptions opts;
  opts.eps_extinct = 0.01;
  opts.window = 5;
  opts.trap_lo = 2.0;
  opts.trap_hi = 2.2;

  std::vector<double> extinct{1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0};
  std::size_t at = 0;
  CHECK(classify_outcome(extinct, opts, &at) == Outcome::Extinct);
  CHECK(at == 6);

  std::vector<double> survived{1.0, 2.1, 2.1, 2.1, 2.1, 2.1};
  CHECK(classify_outcome(survived, opts, &at) == Outcome::Survived);
  CHECK(at == 5);

  std::vector<double> undecided{1.0, 0.0, 3.0, 0.0, 3.0, 0.0, 3.0};
  CHECK(classify_outcome(undecided, opts) == Outcome::Undecided);

  // too short to fill a window
  std::vector<double> brief{0.0, 0.0};
  CHECK(classify_outcome(brief, opts) == Outcome::Undecided);
}

TEST_CASE("spec-shaped classifier overload uses the feature-derived trap") {
  const RdsConfig cfg = sigmoid_config();
  const MapFeatures ff = analyze_map(cfg.f);
  const MapFeatures fg = analyze_map(cfg.g);

  Trajectory traj;
  traj.states.assign(60, ff.K);  // constant tail at Kf
  CHECK(classify_outcome(traj, ff, fg, 0.005, 50) == Outcome::Survived);

  traj.states.assign(60, 0.0);
  CHECK(classify_outcome(traj, ff, fg, 0.005, 50) == Outcome::Extinct);

  // oscillation across min(Af, Ag) matches neither region
  traj.states.clear();
  for (int i = 0; i < 60; ++i) traj.states.push_back(i % 2 ? 0.1 : 0.9);
  CHECK(classify_outcome(traj, ff, fg, 0.005, 50) == Outcome::Undecided);
}

TEST_CASE("trajectory CSV format") {
  RdsConfig cfg = ex1_config();
  const Trajectory traj = simulate(cfg, 3.0, 1, 3);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "step,state,choice");
  std::getline(is, line);
  CHECK(line == "0,3,");
  int rows = 1;
  while (std::getline(is, line)) {
    ++rows;
    CHECK((line.back() == 'f' || line.back() == 'g'));
  }
  CHECK(rows == 4);
}

TEST_CASE("config validation rejects out-of-range parameters") {
  RdsConfig cfg = ex1_config();
  cfg.p = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.p = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ex1_config();
  cfg.perturbation = PerturbationSpec{0.0};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ex1_config();
  cfg.g.domain_bound = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
