#include "allee/certify.hpp"

#include <algorithm>
#include <cmath>

namespace allee {

OrderingClass classify_ordering(const MapFeatures& ff, const MapFeatures& fg) {
  OrderingClass oc;
  std::array<std::pair<std::string, double>, 4> vals = {{
      {"Af", ff.A}, {"Ag", fg.A}, {"Kf", ff.K}, {"Kg", fg.K}}};
  std::stable_sort(vals.begin(), vals.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  oc.sorted = vals;
  for (int i = 0; i + 1 < 4; ++i)
    if (std::fabs(vals[i].second - vals[i + 1].second) <= kTolFp)
      oc.has_ties = true;

  const auto is = [&vals](const char* a, const char* b, const char* c,
                          const char* d) {
    return vals[0].first == a && vals[1].first == b && vals[2].first == c &&
           vals[3].first == d;
  };
  if (oc.has_ties)
    oc.pattern = OrderingPattern::Other;
  else if (is("Af", "Ag", "Kf", "Kg"))
    oc.pattern = OrderingPattern::AfAgKfKg;
  else if (is("Ag", "Af", "Kg", "Kf"))
    oc.pattern = OrderingPattern::AgAfKgKf;
  else if (is("Af", "Kf", "Ag", "Kg"))
    oc.pattern = OrderingPattern::AfKfAgKg;
  else if (is("Ag", "Kg", "Af", "Kf"))
    oc.pattern = OrderingPattern::AgKgAfKf;
  else
    oc.pattern = OrderingPattern::Other;
  return oc;
}

namespace {

/// Scan fn >= delta on the open interval (lo, hi) sampled at grid_n interior
/// points; each maximal run becomes an interval whose endpoints are bisected
/// to width kBoundaryRefine and rounded into the set.
std::vector<Interval> scan_gap_set(const std::function<double(double)>& fn,
                                   double lo, double hi, double delta,
                                   int grid_n) {
  std::vector<Interval> out;
  if (!(hi > lo)) return out;
  const double h = (hi - lo) / (grid_n + 1);
  const auto x_at = [&](int i) { return lo + h * i; };  // i in [0, grid_n+1]

  const auto refine = [&](double inside, double outside) {
    // Keep the endpoint that satisfies fn >= delta.
    while (std::fabs(inside - outside) > kBoundaryRefine) {
      const double mid = 0.5 * (inside + outside);
      if (fn(mid) >= delta)
        inside = mid;
      else
        outside = mid;
    }
    return inside;
  };

  bool in_run = false;
  double run_start = 0.0;
  double prev_x = x_at(0);
  for (int i = 1; i <= grid_n; ++i) {
    const double x = x_at(i);
    const bool member = fn(x) >= delta;
    if (member && !in_run) {
      // Entering a run: the boundary lies in (prev_x, x] for i > 1; a run
      // beginning at the first sample is pushed toward the open endpoint.
      run_start = i == 1 ? refine(x, lo) : refine(x, prev_x);
      in_run = true;
    } else if (!member && in_run) {
      out.push_back({run_start, refine(prev_x, x)});
      in_run = false;
    }
    prev_x = x;
  }
  if (in_run) out.push_back({run_start, refine(prev_x, hi)});
  return out;
}

nlohmann::json intervals_json(const std::vector<Interval>& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& iv : v) arr.push_back({iv.lo, iv.hi});
  return arr;
}

}  // namespace

Theorem2Report theorem2_sets(const MapSpec& f, const MapSpec& g, double delta,
                             int grid_n) {
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  const MapFeatures ff = analyze_map(f);
  const MapFeatures fg = analyze_map(g);
  if (ff.monotonicity != Monotonicity::StrictlyIncreasing ||
      fg.monotonicity != Monotonicity::StrictlyIncreasing)
    throw PreconditionError(
        "gap-set certification requires two strictly increasing maps");
  const double b = f.domain_bound;

  const auto gap_down = [&](double x) {
    return std::min(x - eval_unchecked(f, x), x - eval_unchecked(g, x));
  };
  const auto gap_up = [&](double x) {
    return std::min(eval_unchecked(f, x) - x, eval_unchecked(g, x) - x);
  };

  Theorem2Report rep;
  rep.delta = delta;
  rep.U1 = scan_gap_set(gap_down, 0.0, ff.A, delta, grid_n);
  rep.U2 = scan_gap_set(gap_up, fg.A, ff.K, delta, grid_n);
  rep.U3 = scan_gap_set(gap_down, fg.K, b, delta, grid_n);
  if (!rep.U1.empty()) {
    rep.w1 = rep.U1.front().lo;
    rep.z1 = rep.U1.back().hi;
  }
  if (!rep.U2.empty()) {
    rep.w2 = rep.U2.front().lo;
    rep.z2 = rep.U2.back().hi;
  }
  if (!rep.U3.empty()) rep.w3 = rep.U3.front().lo;
  rep.all_nonempty = !rep.U1.empty() && !rep.U2.empty() && !rep.U3.empty();

  // Tail condition, scanned literally on a closed grid including b:
  // every x must see some x* >= x with gap_down(x*) >= delta.
  rep.tail_ok = true;
  bool seen_ahead = false;
  for (int i = grid_n; i >= 0; --i) {
    const double x = b * static_cast<double>(i) / grid_n;
    if (gap_down(x) >= delta) seen_ahead = true;
    if (!seen_ahead) {
      rep.tail_ok = false;
      break;
    }
  }
  return rep;
}

ContractionBand check_contraction_band(const MapSpec& f, int margin_grid) {
  const MapFeatures crit = find_critical_point(f);
  ContractionBand band;
  if (crit.monotonicity != Monotonicity::Unimodal)
    throw PreconditionError("contraction band requires a unimodal map");
  const double B = *crit.B;
  const double M = *crit.M;
  if (!(M > B)) {
    band.vacuous = true;
    band.holds = true;
    band.argmax = B;
    return band;
  }

  const auto abs_deriv = [&f](double x) { return std::fabs(derivative(f, x)); };
  double best_x = B;
  double best = abs_deriv(B);
  for (int i = 1; i <= margin_grid; ++i) {
    const double x = B + (M - B) * static_cast<double>(i) / margin_grid;
    const double v = abs_deriv(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  // Golden-section refinement around the best grid cell. The band is open,
  // but its sup equals the max over the closure, so the endpoints join in.
  const double h = (M - B) / margin_grid;
  constexpr double inv_phi = 0.6180339887498949;
  double a = std::max(B, best_x - h);
  double c = std::min(M, best_x + h);
  double xa = c - inv_phi * (c - a), xc = a + inv_phi * (c - a);
  double fa = abs_deriv(xa), fc = abs_deriv(xc);
  while (c - a > kBoundaryRefine) {
    if (fa < fc) {
      a = xa;
      xa = xc;
      fa = fc;
      xc = a + inv_phi * (c - a);
      fc = abs_deriv(xc);
    } else {
      c = xc;
      xc = xa;
      fc = fa;
      xa = c - inv_phi * (c - a);
      fa = abs_deriv(xa);
    }
  }
  band.argmax = best_x;
  band.sup_abs_derivative = best;
  for (double x : {0.5 * (a + c), M}) {
    const double v = abs_deriv(x);
    if (v > band.sup_abs_derivative) {
      band.sup_abs_derivative = v;
      band.argmax = x;
    }
  }
  band.holds = band.sup_abs_derivative < 1.0 - kTolDeriv;
  return band;
}

std::string witness_string(const CompositionWitness& w) {
  std::string s;
  for (std::size_t i = 0; i < w.sequence.size(); ++i) {
    if (i) s += ',';
    s += w.sequence[i] == MapChoice::F ? 'f' : 'g';
  }
  return s;
}

double apply_composition(const MapSpec& f, const MapSpec& g,
                         const std::vector<MapChoice>& sequence, double x) {
  for (auto it = sequence.rbegin(); it != sequence.rend(); ++it)
    x = *it == MapChoice::F ? eval_unchecked(f, x) : eval_unchecked(g, x);
  return x;
}

std::optional<CompositionWitness> search_composition(const MapSpec& f,
                                                     const MapSpec& g,
                                                     int m_max) {
  if (m_max < 1) throw InputError("m_max must be >= 1");
  const MapFeatures ff = find_fixed_points(f);
  const double Af = ff.A;
  const double Kf = ff.K;

  struct Node {
    double value;
    std::vector<MapChoice> seq;  // composition order, h1 first
  };
  // Frontier kept in lexicographic order (F < G); prepending the new
  // outermost symbol preserves that order level by level.
  std::vector<Node> frontier{{Kf, {}}};
  for (int depth = 1; depth <= m_max; ++depth) {
    std::vector<Node> next;
    next.reserve(frontier.size() * 2);
    for (MapChoice h : {MapChoice::F, MapChoice::G}) {
      for (const Node& node : frontier) {
        Node child;
        child.value = h == MapChoice::F ? eval_unchecked(f, node.value)
                                        : eval_unchecked(g, node.value);
        child.seq.reserve(node.seq.size() + 1);
        child.seq.push_back(h);
        child.seq.insert(child.seq.end(), node.seq.begin(), node.seq.end());
        next.push_back(std::move(child));
      }
    }
    for (const Node& node : next) {
      if (node.value < Af) {
        CompositionWitness w;
        w.sequence = node.seq;
        // Replay in application order for the exact reported value.
        w.value = apply_composition(f, g, node.seq, Kf);
        return w;
      }
    }
    frontier = std::move(next);
  }
  return std::nullopt;
}

T4Extra check_t4_extra(const MapSpec& f, const MapSpec& g) {
  const MapFeatures ff = find_fixed_points(f);
  T4Extra extra;
  extra.value = eval_unchecked(f, eval_unchecked(g, ff.A));
  const double diff = extra.value - ff.A;
  extra.holds = std::fabs(diff) > kTolFp;
  extra.branch = !extra.holds ? '=' : (diff < 0.0 ? '<' : '>');
  return extra;
}

Theorem5U theorem5_U(const MapSpec& f, const MapSpec& g, double delta,
                     int grid_n) {
  if (!(delta > 0.0)) throw InputError("delta must be positive");
  const MapFeatures ff = find_fixed_points(f);
  const MapFeatures fg = find_fixed_points(g);
  const double hi = std::min(ff.A, fg.A);
  const auto gap_down = [&](double x) {
    return std::min(x - eval_unchecked(f, x), x - eval_unchecked(g, x));
  };
  Theorem5U rep;
  rep.delta = delta;
  rep.U = scan_gap_set(gap_down, 0.0, hi, delta, grid_n);
  if (!rep.U.empty()) rep.inf_U = rep.U.front().lo;
  return rep;
}

TheoremId theorem_from_string(const std::string& name) {
  if (name == "T1") return TheoremId::T1;
  if (name == "T2") return TheoremId::T2;
  if (name == "T3") return TheoremId::T3;
  if (name == "T4") return TheoremId::T4;
  if (name == "T5") return TheoremId::T5;
  throw ConfigError("unknown theorem '" + name + "' (expected T1..T5)");
}

std::string to_string(TheoremId id) {
  switch (id) {
    case TheoremId::T1: return "T1";
    case TheoremId::T2: return "T2";
    case TheoremId::T3: return "T3";
    case TheoremId::T4: return "T4";
    case TheoremId::T5: return "T5";
  }
  return "?";
}

namespace {

void require_class(const MapFeatures& ff, const MapFeatures& fg,
                   Monotonicity want, TheoremId id) {
  if (ff.monotonicity != want || fg.monotonicity != want) {
    const char* cls = want == Monotonicity::StrictlyIncreasing
                          ? "strictly increasing"
                          : "unimodal";
    throw PreconditionError(to_string(id) + " requires two " + cls +
                            " Allee maps");
  }
}

nlohmann::json ordering_json(const OrderingClass& oc) {
  nlohmann::json j;
  j["pattern"] = [&] {
    switch (oc.pattern) {
      case OrderingPattern::AfAgKfKg: return "AfAgKfKg";
      case OrderingPattern::AgAfKgKf: return "AgAfKgKf";
      case OrderingPattern::AfKfAgKg: return "AfKfAgKg";
      case OrderingPattern::AgKgAfKf: return "AgKgAfKf";
      case OrderingPattern::Other: return "Other";
    }
    return "Other";
  }();
  nlohmann::json sorted = nlohmann::json::array();
  for (const auto& [label, value] : oc.sorted)
    sorted.push_back({{"label", label}, {"value", value}});
  j["sorted"] = sorted;
  j["has_ties"] = oc.has_ties;
  return j;
}

}  // namespace

CertificateReport certify(TheoremId theorem, const MapSpec& f,
                          const MapSpec& g, std::optional<double> delta) {
  CertificateReport rep;
  rep.theorem = theorem;
  const MapFeatures ff = analyze_map(f);
  const MapFeatures fg = analyze_map(g);
  const OrderingClass oc = classify_ordering(ff, fg);

  const auto add = [&rep](std::string name, bool holds, nlohmann::json witness) {
    rep.hypotheses.push_back({std::move(name), holds, std::move(witness)});
  };

  switch (theorem) {
    case TheoremId::T1: {
      require_class(ff, fg, Monotonicity::StrictlyIncreasing, theorem);
      add("ordering_Af_Ag_Kf_Kg", oc.pattern == OrderingPattern::AfAgKfKg,
          ordering_json(oc));
      break;
    }
    case TheoremId::T2: {
      require_class(ff, fg, Monotonicity::StrictlyIncreasing, theorem);
      if (!delta) throw InputError("T2 requires delta");
      add("ordering_Af_Ag_Kf_Kg", oc.pattern == OrderingPattern::AfAgKfKg,
          ordering_json(oc));
      const Theorem2Report sets = theorem2_sets(f, g, *delta);
      nlohmann::json w;
      w["delta"] = sets.delta;
      w["U1"] = intervals_json(sets.U1);
      w["U2"] = intervals_json(sets.U2);
      w["U3"] = intervals_json(sets.U3);
      if (sets.w1) w["w1"] = *sets.w1;
      if (sets.z1) w["z1"] = *sets.z1;
      if (sets.w2) w["w2"] = *sets.w2;
      if (sets.z2) w["z2"] = *sets.z2;
      if (sets.w3) w["w3"] = *sets.w3;
      add("gap_sets_nonempty", sets.all_nonempty, w);
      add("tail_gap_condition", sets.tail_ok, {{"delta", sets.delta}});
      break;
    }
    case TheoremId::T3:
    case TheoremId::T4: {
      require_class(ff, fg, Monotonicity::Unimodal, theorem);
      if (theorem == TheoremId::T3)
        add("threshold_order_Af_lt_Ag", ff.A < fg.A,
            {{"Af", ff.A}, {"Ag", fg.A}});
      else
        add("threshold_order_Ag_lt_Af", fg.A < ff.A,
            {{"Af", ff.A}, {"Ag", fg.A}});
      const ContractionBand band = check_contraction_band(f);
      add("contraction_band", band.holds,
          {{"sup", band.sup_abs_derivative},
           {"argmax", band.argmax},
           {"vacuous", band.vacuous}});
      const auto witness = search_composition(f, g);
      nlohmann::json wj;
      if (witness) {
        wj["sequence"] = witness_string(*witness);
        wj["value"] = witness->value;
        wj["m"] = witness->length();
        wj["Af"] = ff.A;
      }
      add("composition_witness", witness.has_value(), wj);
      if (theorem == TheoremId::T4) {
        const T4Extra extra = check_t4_extra(f, g);
        add("f_of_g_at_Af_not_fixed", extra.holds,
            {{"value", extra.value},
             {"Af", ff.A},
             {"branch", std::string(1, extra.branch)}});
      }
      break;
    }
    case TheoremId::T5: {
      require_class(ff, fg, Monotonicity::Unimodal, theorem);
      if (!delta) throw InputError("T5 requires delta");
      const ContractionBand band = check_contraction_band(f);
      add("contraction_band", band.holds,
          {{"sup", band.sup_abs_derivative},
           {"argmax", band.argmax},
           {"vacuous", band.vacuous}});
      const auto witness = search_composition(f, g);
      nlohmann::json wj;
      if (witness) {
        wj["sequence"] = witness_string(*witness);
        wj["value"] = witness->value;
        wj["m"] = witness->length();
      }
      add("composition_witness", witness.has_value(), wj);
      const Theorem5U U = theorem5_U(f, g, *delta);
      nlohmann::json uj;
      uj["delta"] = U.delta;
      uj["U"] = intervals_json(U.U);
      if (U.inf_U) uj["inf_U"] = *U.inf_U;
      add("gap_set_nonempty", !U.U.empty(), uj);
      break;
    }
  }

  rep.all_hold = std::all_of(rep.hypotheses.begin(), rep.hypotheses.end(),
                             [](const Hypothesis& h) { return h.holds; });
  return rep;
}

}  // namespace allee
