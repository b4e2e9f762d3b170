#include "allee/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace allee {

namespace {

std::string describe(const MapSpec& spec) {
  std::ostringstream os;
  switch (spec.family) {
    case MapFamily::Sigmoid:
      os << "sigmoid(rho=" << spec.rho << ", a=" << spec.a << ")";
      break;
    case MapFamily::RationalUnimodal:
      os << "rational_unimodal(G=" << spec.G << ", bp=" << spec.bp
         << ", T=" << spec.T << ")";
      break;
    case MapFamily::Custom:
      os << "custom";
      break;
  }
  return os.str();
}

double bisect_root(const std::function<double(double)>& phi, double lo,
                   double hi, double flo) {
  // Invariant: phi changes sign on [lo, hi]; flo = phi(lo).
  while (hi - lo > kBisectWidth) {
    const double mid = 0.5 * (lo + hi);
    const double fm = phi(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Golden-section maximum of fn on [lo, hi] to bracket width `tol`.
double golden_max(const std::function<double(double)>& fn, double lo,
                  double hi, double tol) {
  constexpr double inv_phi = 0.6180339887498949;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = fn(x1);
  double f2 = fn(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = fn(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = fn(x1);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

MapSpec MapSpec::sigmoid(double rho, double a, double b) {
  MapSpec s;
  s.family = MapFamily::Sigmoid;
  s.rho = rho;
  s.a = a;
  s.domain_bound = b;
  s.validate();
  closed_form_fixed_points(s);  // fails fast when rho <= 2*sqrt(a)
  return s;
}

MapSpec MapSpec::rational_unimodal(double G, double bp, double T, double b) {
  MapSpec s;
  s.family = MapFamily::RationalUnimodal;
  s.G = G;
  s.bp = bp;
  s.T = T;
  s.domain_bound = b > 0.0 ? b : 0.0;
  if (s.domain_bound == 0.0) {
    // Default to the natural bound: the peak value M.
    MapSpec probe = s;
    probe.domain_bound = 1.0;  // placeholder; natural_bound only needs params
    s.domain_bound = natural_bound(probe);
  }
  s.validate();
  closed_form_fixed_points(s);  // fails fast when G <= 1 or A <= 0
  return s;
}

MapSpec MapSpec::custom_map(std::function<double(double)> fn, double b) {
  MapSpec s;
  s.family = MapFamily::Custom;
  s.custom = std::move(fn);
  s.domain_bound = b;
  s.validate();
  return s;
}

void MapSpec::validate() const {
  // Structural parameter ranges only; whether an admissible pair of fixed
  // points exists is an Allee-axiom question answered by
  // closed_form_fixed_points / find_fixed_points (NotAnAlleeMapError).
  if (!(domain_bound > 0.0) || !std::isfinite(domain_bound))
    throw ConfigError("domain bound must be finite and positive, got " +
                      std::to_string(domain_bound));
  switch (family) {
    case MapFamily::Sigmoid:
      if (!(rho > 0.0) || !(a > 0.0))
        throw ConfigError("sigmoid requires rho > 0 and a > 0");
      break;
    case MapFamily::RationalUnimodal:
      if (!(G > 0.0) || !(bp > 0.0) || !(T > 0.0))
        throw ConfigError("rational_unimodal requires G > 0, bp > 0, T > 0");
      break;
    case MapFamily::Custom:
      if (!custom) throw ConfigError("custom map requires a callable");
      break;
  }
}

double eval_map(const MapSpec& spec, double x) {
  if (x < 0.0 || x > spec.domain_bound || !std::isfinite(x)) {
    std::ostringstream os;
    os << "state " << x << " outside [0, " << spec.domain_bound << "]";
    throw InputError(os.str());
  }
  return eval_unchecked(spec, x);
}

double derivative(const MapSpec& spec, double x) {
  switch (spec.family) {
    case MapFamily::Sigmoid: {
      const double den = spec.a + x * x;
      return 2.0 * spec.rho * spec.a * x / (den * den);
    }
    case MapFamily::RationalUnimodal: {
      const double d = x - spec.T;
      const double den = d * d + spec.bp;
      return spec.G * spec.bp * (spec.T * spec.T + spec.bp - x * x) /
             (den * den);
    }
    case MapFamily::Custom: {
      const double h = 1e-6 * std::max(1.0, std::fabs(x));
      const double lo = std::max(0.0, x - h);
      const double hi = std::min(spec.domain_bound, x + h);
      return (spec.custom(hi) - spec.custom(lo)) / (hi - lo);
    }
  }
  return 0.0;
}

std::pair<double, double> closed_form_fixed_points(const MapSpec& spec) {
  switch (spec.family) {
    case MapFamily::Sigmoid: {
      // x^2 - rho*x + a = 0
      const double disc = spec.rho * spec.rho - 4.0 * spec.a;
      if (disc <= 0.0)
        throw NotAnAlleeMapError("no pair of positive fixed points for " +
                                 describe(spec));
      const double s = std::sqrt(disc);
      return {(spec.rho - s) / 2.0, (spec.rho + s) / 2.0};
    }
    case MapFamily::RationalUnimodal: {
      // (x - T)^2 = bp*(G - 1)
      const double disc = spec.bp * (spec.G - 1.0);
      if (disc <= 0.0)
        throw NotAnAlleeMapError("no pair of positive fixed points for " +
                                 describe(spec));
      const double s = std::sqrt(disc);
      if (spec.T - s <= 0.0)
        throw NotAnAlleeMapError("threshold fixed point not positive for " +
                                 describe(spec));
      return {spec.T - s, spec.T + s};
    }
    case MapFamily::Custom:
      throw PreconditionError("custom maps have no closed-form fixed points");
  }
  throw PreconditionError("unreachable");
}

MapFeatures find_fixed_points(const MapSpec& spec) {
  spec.validate();
  const double b = spec.domain_bound;
  const auto phi = [&spec](double x) { return eval_unchecked(spec, x) - x; };

  // Bracket sign changes of f(x) - x on a uniform grid over (tol, b].
  std::vector<double> roots;
  const double lo0 = kTolFp;
  double xprev = lo0;
  double fprev = phi(xprev);
  for (int i = 1; i <= kFixedPointGrid; ++i) {
    const double x = lo0 + (b - lo0) * static_cast<double>(i) / kFixedPointGrid;
    const double fx = phi(x);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if ((fprev < 0.0) != (fx < 0.0)) {
      roots.push_back(bisect_root(phi, xprev, x, fprev));
    }
    xprev = x;
    fprev = fx;
  }

  if (roots.size() < 2)
    throw NotAnAlleeMapError(
        "expected two positive fixed points in (0, b], found " +
        std::to_string(roots.size()) + " for " + describe(spec));
  // Tangencies collapse to nearly coincident brackets; treat as degenerate.
  if (roots.back() - roots.front() <= kTolFp)
    throw NotAnAlleeMapError("degenerate (tangent) fixed points for " +
                             describe(spec));

  MapFeatures feats;
  feats.A = roots.front();
  feats.K = roots.back();

  if (spec.family != MapFamily::Custom) {
    const auto [A, K] = closed_form_fixed_points(spec);
    if (std::fabs(feats.A - A) > 1e-9 || std::fabs(feats.K - K) > 1e-9)
      throw Error("fixed-point solver disagrees with closed form for " +
                  describe(spec));
  }
  return feats;
}

namespace {

/// Count strict local maxima of the grid profile of a custom map and locate
/// the dominant one. Plateaus within tol collapse into one peak.
int grid_peak_count(const MapSpec& spec, int n, int* peak_idx) {
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i)
    v[i] = eval_unchecked(spec, spec.domain_bound * i / n);
  int peaks = 0;
  int best = 0;
  int dir = 0;  // last significant slope sign
  for (int i = 1; i <= n; ++i) {
    const double d = v[i] - v[i - 1];
    if (std::fabs(d) <= kTolFp) continue;
    const int s = d > 0.0 ? 1 : -1;
    if (dir > 0 && s < 0) ++peaks;
    dir = s;
    if (v[i] > v[best]) best = i;
  }
  if (peak_idx) *peak_idx = best;
  return peaks;
}

}  // namespace

MapFeatures find_critical_point(const MapSpec& spec) {
  spec.validate();
  MapFeatures feats;
  switch (spec.family) {
    case MapFamily::Sigmoid:
      feats.monotonicity = Monotonicity::StrictlyIncreasing;
      return feats;
    case MapFamily::RationalUnimodal: {
      feats.monotonicity = Monotonicity::Unimodal;
      const double B = std::sqrt(spec.T * spec.T + spec.bp);
      feats.B = B;
      feats.M = eval_unchecked(spec, B);
      return feats;
    }
    case MapFamily::Custom: {
      int best = 0;
      const int n = kSetScanGrid;
      const int peaks = grid_peak_count(spec, n, &best);
      if (peaks > 1)
        throw NotUnimodalError("custom map has " + std::to_string(peaks) +
                               " interior peaks");
      if (peaks == 0 || best == n) {
        feats.monotonicity = Monotonicity::StrictlyIncreasing;
        return feats;
      }
      feats.monotonicity = Monotonicity::Unimodal;
      const double h = spec.domain_bound / n;
      const double lo = std::max(0.0, (best - 1) * h);
      const double hi = std::min(spec.domain_bound, (best + 1) * h);
      const double B = golden_max(
          [&spec](double x) { return eval_unchecked(spec, x); }, lo, hi,
          kBoundaryRefine);
      feats.B = B;
      feats.M = eval_unchecked(spec, B);
      return feats;
    }
  }
  return feats;
}

MapFeatures analyze_map(const MapSpec& spec) {
  MapFeatures feats = find_fixed_points(spec);
  const MapFeatures crit = find_critical_point(spec);
  feats.B = crit.B;
  feats.M = crit.M;
  feats.monotonicity = crit.monotonicity;
  return feats;
}

ValidationReport validate_allee(const MapSpec& spec, int grid_n) {
  if (grid_n < 1000) throw InputError("validation grid must have >= 1000 points");
  spec.validate();
  ValidationReport report;
  const double b = spec.domain_bound;

  MapFeatures feats;
  try {
    feats = analyze_map(spec);
  } catch (const NotAnAlleeMapError& e) {
    report.axioms.push_back({"fixed_points_exist", false, 0.0, 0.0});
    report.all_pass = false;
    report.failure = e.what();
    return report;
  }
  report.features = feats;
  report.axioms.push_back({"fixed_points_exist", true, 0.0, 0.0});

  AxiomCheck below{"below_identity_outside", true, 0.0, 0.0};  // f(x) < x on (0,A) u (K,b]
  AxiomCheck above{"above_identity_inside", true, 0.0, 0.0};   // f(x) > x on (A,K)
  AxiomCheck range{"maps_into_domain", true, 0.0, 0.0};        // f([0,b]) within [0,b]

  for (int i = 0; i <= grid_n; ++i) {
    const double x = b * static_cast<double>(i) / grid_n;
    const double fx = eval_unchecked(spec, x);
    if (fx < 0.0 || fx > b) {
      const double viol = fx < 0.0 ? -fx : fx - b;
      if (range.pass || viol > range.worst_violation) {
        range.worst_x = x;
        range.worst_violation = viol;
      }
      range.pass = false;
    }
    const double resid = fx - x;
    if (std::fabs(resid) <= kTolFp) continue;  // at a fixed point
    if (x > 0.0 && ((x < feats.A) || (x > feats.K))) {
      if (resid > 0.0) {
        if (below.pass || resid > below.worst_violation) {
          below.worst_x = x;
          below.worst_violation = resid;
        }
        below.pass = false;
      }
    } else if (x > feats.A && x < feats.K) {
      if (resid < 0.0) {
        if (above.pass || -resid > above.worst_violation) {
          above.worst_x = x;
          above.worst_violation = -resid;
        }
        above.pass = false;
      }
    }
  }

  report.axioms.push_back(below);
  report.axioms.push_back(above);
  report.axioms.push_back(range);
  report.all_pass = below.pass && above.pass && range.pass;
  if (!report.all_pass) {
    for (const auto& ax : report.axioms)
      if (!ax.pass) {
        report.failure = "axiom '" + ax.name + "' fails near x = " +
                         std::to_string(ax.worst_x);
        break;
      }
  }
  return report;
}

double natural_bound(const MapSpec& spec) {
  switch (spec.family) {
    case MapFamily::RationalUnimodal: {
      const double B = std::sqrt(spec.T * spec.T + spec.bp);
      const double d = B - spec.T;
      return spec.G * spec.bp * B / (d * d + spec.bp);
    }
    case MapFamily::Custom: {
      const MapFeatures crit = find_critical_point(spec);
      if (crit.M) return *crit.M;
      throw PreconditionError("increasing map has no natural bound");
    }
    case MapFamily::Sigmoid:
      throw PreconditionError(
          "sigmoid maps need an explicit domain bound (supremum rho is not "
          "attained)");
  }
  throw PreconditionError("unreachable");
}

}  // namespace allee
