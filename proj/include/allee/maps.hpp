#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "allee/errors.hpp"

namespace allee {

// Numeric policy shared across the library.
inline constexpr double kTolFp = 1e-9;           // fixed-point residual tolerance
inline constexpr double kTolDeriv = 1e-6;        // safety margin on |f'| < 1
inline constexpr int kFixedPointGrid = 4096;     // bracketing grid for f(x) = x
inline constexpr int kSetScanGrid = 8192;        // gap-set scan grid
inline constexpr double kBisectWidth = 1e-12;    // root bracket width
inline constexpr double kBoundaryRefine = 1e-10; // set-boundary bracket width

enum class MapFamily { Sigmoid, RationalUnimodal, Custom };
enum class Monotonicity { StrictlyIncreasing, Unimodal };

/// A parametric population map on the interval [0, domain_bound].
///
/// Sigmoid:           f(x) = rho*x^2 / (a + x^2),        rho > 2*sqrt(a)
/// RationalUnimodal:  f(x) = G*bp*x / ((x - T)^2 + bp),  G > 1, bp > 0, T > 0
/// Custom:            an arbitrary continuous self-map supplied as a closure.
struct MapSpec {
  MapFamily family = MapFamily::Sigmoid;

  // Sigmoid parameters.
  double rho = 0.0;
  double a = 0.0;

  // RationalUnimodal parameters.
  double G = 0.0;
  double bp = 0.0;
  double T = 0.0;

  double domain_bound = 0.0;  // b > 0, finite

  std::function<double(double)> custom;  // Custom family only

  static MapSpec sigmoid(double rho, double a, double b);
  static MapSpec rational_unimodal(double G, double bp, double T, double b);
  static MapSpec custom_map(std::function<double(double)> fn, double b);

  /// Structural parameter checks; throws ConfigError.
  void validate() const;
};

/// Landmarks of a map: threshold fixed point A, upper fixed point K,
/// peak location B and peak value M (unimodal maps only).
struct MapFeatures {
  double A = 0.0;
  double K = 0.0;
  std::optional<double> B;
  std::optional<double> M;
  Monotonicity monotonicity = Monotonicity::StrictlyIncreasing;
};

struct AxiomCheck {
  std::string name;
  bool pass = false;
  double worst_x = 0.0;          // most violating grid point, if any
  double worst_violation = 0.0;  // signed margin at worst_x
};

struct ValidationReport {
  bool all_pass = false;
  std::vector<AxiomCheck> axioms;
  std::optional<MapFeatures> features;  // absent when the fixed points are missing
  std::string failure;                  // human-readable reason when !all_pass
};

/// Map value without the domain check; callers must keep x in [0, b].
inline double eval_unchecked(const MapSpec& spec, double x) {
  switch (spec.family) {
    case MapFamily::Sigmoid:
      return spec.rho * x * x / (spec.a + x * x);
    case MapFamily::RationalUnimodal: {
      const double d = x - spec.T;
      return spec.G * spec.bp * x / (d * d + spec.bp);
    }
    case MapFamily::Custom:
      return spec.custom(x);
  }
  return 0.0;
}

/// f(x) for x in [0, domain_bound]; throws InputError outside.
double eval_map(const MapSpec& spec, double x);

/// f'(x): closed form for the built-in families, central finite difference
/// for Custom (step 1e-6 * max(1, |x|)).
double derivative(const MapSpec& spec, double x);

/// Closed-form fixed points (A, K) for the built-in families.
/// Throws NotAnAlleeMapError when the discriminant is <= 0 and
/// PreconditionError for Custom maps.
std::pair<double, double> closed_form_fixed_points(const MapSpec& spec);

/// Positive fixed points by sign-bracketing f(x)-x on a uniform grid over
/// (tol, b] and bisecting each bracket to width 1e-12. Built-in families are
/// cross-checked against the closed forms. Fills A and K only.
MapFeatures find_fixed_points(const MapSpec& spec);

/// Peak location/value. RationalUnimodal: B = sqrt(T^2 + bp), M = f(B).
/// Sigmoid: absent (strictly increasing). Custom: grid profile + golden
/// section; throws NotUnimodalError if the profile has several peaks.
MapFeatures find_critical_point(const MapSpec& spec);

/// find_fixed_points + find_critical_point merged into one feature set.
MapFeatures analyze_map(const MapSpec& spec);

/// Grid check of the three Allee-map axioms plus range containment.
/// Failures are carried in the report, never thrown.
ValidationReport validate_allee(const MapSpec& spec, int grid_n = kSetScanGrid);

/// Natural state-space bound of a standalone unimodal map (its peak value M).
double natural_bound(const MapSpec& spec);

}  // namespace allee
