#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "allee/maps.hpp"

namespace allee {

// All certification checks are floating-point grid scans with declared
// resolution: they produce numeric evidence with explicit witnesses, not
// rigorous proofs.

enum class OrderingPattern { AfAgKfKg, AgAfKgKf, AfKfAgKg, AgKgAfKf, Other };

struct OrderingClass {
  OrderingPattern pattern = OrderingPattern::Other;
  // The four threshold/upper fixed points sorted ascending, with labels
  // "Af", "Ag", "Kf", "Kg".
  std::array<std::pair<std::string, double>, 4> sorted;
  bool has_ties = false;
};

OrderingClass classify_ordering(const MapFeatures& ff, const MapFeatures& fg);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Numeric approximation of the three delta-gap sets of the noise-trapping
/// theorem for increasing pairs. w_i = inf U_i, z_j = sup U_j; boundary
/// points are rounded into the set so the reported endpoints satisfy the
/// defining inequality.
struct Theorem2Report {
  double delta = 0.0;
  std::vector<Interval> U1, U2, U3;
  std::optional<double> w1, z1, w2, z2, w3;
  bool tail_ok = false;       // every x in [0,b] has an x* >= x with gap >= delta
  bool all_nonempty = false;
};

Theorem2Report theorem2_sets(const MapSpec& f, const MapSpec& g, double delta,
                             int grid_n = kSetScanGrid);

struct ContractionBand {
  bool holds = false;
  bool vacuous = false;  // band (B, M) empty because M <= B
  double sup_abs_derivative = 0.0;
  double argmax = 0.0;
};

/// sup |f'| over the band (B_f, M_f); holds iff sup < 1 - 1e-6.
ContractionBand check_contraction_band(const MapSpec& f,
                                       int margin_grid = kFixedPointGrid);

enum class MapChoice : std::uint8_t { F, G };

/// A composition h1 o h2 o ... o hm with h_i in {f, g} that squeezes the
/// upper fixed point K_f below the threshold A_f. `sequence` is in
/// composition order: sequence.back() is applied to K_f first.
struct CompositionWitness {
  std::vector<MapChoice> sequence;
  double value = 0.0;
  std::size_t length() const { return sequence.size(); }
};

std::string witness_string(const CompositionWitness& w);

/// Replay a composition sequence (innermost applied first) on x.
double apply_composition(const MapSpec& f, const MapSpec& g,
                         const std::vector<MapChoice>& sequence, double x);

/// Breadth-first search over all 2^m sequences of length <= m_max for the
/// shortest witness, ties broken lexicographically with F < G.
std::optional<CompositionWitness> search_composition(const MapSpec& f,
                                                     const MapSpec& g,
                                                     int m_max = 12);

struct T4Extra {
  bool holds = false;  // |f(g(A_f)) - A_f| > tol
  double value = 0.0;  // f(g(A_f))
  char branch = '=';   // '<' or '>' relative to A_f
};

T4Extra check_t4_extra(const MapSpec& f, const MapSpec& g);

struct Theorem5U {
  double delta = 0.0;
  std::vector<Interval> U;
  std::optional<double> inf_U;
};

/// Gap set on [0, min(A_f, A_g)] for the perturbed unimodal theorem.
Theorem5U theorem5_U(const MapSpec& f, const MapSpec& g, double delta,
                     int grid_n = kSetScanGrid);

enum class TheoremId { T1, T2, T3, T4, T5 };

TheoremId theorem_from_string(const std::string& name);
std::string to_string(TheoremId id);

struct Hypothesis {
  std::string name;
  bool holds = false;
  nlohmann::json witness;  // numeric witness or counterexample payload
};

struct CertificateReport {
  TheoremId theorem = TheoremId::T1;
  std::vector<Hypothesis> hypotheses;
  bool all_hold = false;
};

/// Bundle the hypothesis checks of one theorem. T2 and T5 require delta.
/// Throws PreconditionError on monotonicity-class mismatch.
CertificateReport certify(TheoremId theorem, const MapSpec& f,
                          const MapSpec& g,
                          std::optional<double> delta = std::nullopt);

}  // namespace allee
