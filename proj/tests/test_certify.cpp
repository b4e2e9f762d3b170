#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "allee/certify.hpp"
#include "allee/io.hpp"
#include "allee/random.hpp"

using namespace allee;

namespace {

MapSpec ex1_f() { return MapSpec::rational_unimodal(1.1, 2.0, 3.0, 4.386322154443666); }
MapSpec ex1_g() { return MapSpec::rational_unimodal(1.3, 1.0, 3.3, 4.386322154443666); }
MapSpec ex2_f() { return MapSpec::rational_unimodal(1.1, 1.05, 2.8, 3.878922014523136); }
MapSpec ex2_g() { return MapSpec::rational_unimodal(1.3, 1.0, 2.9, 3.878922014523136); }
MapSpec sig_f() { return MapSpec::sigmoid(2.5, 1.0, 3.0); }
MapSpec sig_g() { return MapSpec::sigmoid(3.0, 1.8, 3.0); }

/// Exhaustive witness enumeration (test oracle, application order built
/// directly from bit patterns).
struct EnumWitness {
  int m;
  std::vector<MapChoice> seq;
  double value;
};
std::vector<EnumWitness> enumerate_witnesses(const MapSpec& f, const MapSpec& g,
                                             int m_max) {
  const MapFeatures ff = find_fixed_points(f);
  std::vector<EnumWitness> found;
  for (int m = 1; m <= m_max; ++m) {
    for (unsigned bits = 0; bits < (1u << m); ++bits) {
      std::vector<MapChoice> seq(m);
      for (int k = 0; k < m; ++k)
        seq[k] = (bits >> (m - 1 - k)) & 1u ? MapChoice::G : MapChoice::F;
      double v = ff.K;
      for (auto it = seq.rbegin(); it != seq.rend(); ++it)
        v = *it == MapChoice::F ? eval_unchecked(f, v) : eval_unchecked(g, v);
      if (v < ff.A) found.push_back({m, seq, v});
    }
  }
  return found;
}

double max_on_grid(const std::function<double(double)>& fn, double lo,
                   double hi, int n = 200000) {
  double best = -1e300;
  for (int i = 1; i < n; ++i)
    best = std::max(best, fn(lo + (hi - lo) * static_cast<double>(i) / n));
  return best;
}

}  // namespace

TEST_CASE("ordering classification of the worked pairs") {
  const OrderingClass oc1 = classify_ordering(analyze_map(ex1_f()),
                                              analyze_map(ex1_g()));
  CHECK(oc1.pattern == OrderingPattern::AfAgKfKg);
  CHECK_FALSE(oc1.has_ties);

  const OrderingClass oc2 = classify_ordering(analyze_map(ex2_f()),
                                              analyze_map(ex2_g()));
  CHECK(oc2.pattern == OrderingPattern::Other);
  CHECK(oc2.sorted[0].first == "Ag");
  CHECK(oc2.sorted[1].first == "Af");
  CHECK(oc2.sorted[2].first == "Kf");
  CHECK(oc2.sorted[3].first == "Kg");

  const OrderingClass same = classify_ordering(analyze_map(ex1_f()),
                                               analyze_map(ex1_f()));
  CHECK(same.has_ties);
}

TEST_CASE("ordering classification is antisymmetric under swapping the maps") {
  const MapFeatures a = analyze_map(sig_f());
  const MapFeatures b = analyze_map(sig_g());
  const OrderingClass fwd = classify_ordering(a, b);
  const OrderingClass rev = classify_ordering(b, a);
  CHECK(fwd.pattern == OrderingPattern::AfAgKfKg);
  CHECK(rev.pattern == OrderingPattern::AgAfKgKf);
  for (int i = 0; i < 4; ++i) {
    CHECK(fwd.sorted[i].second == rev.sorted[i].second);
    std::string swapped = rev.sorted[i].first;
    swapped[1] = swapped[1] == 'f' ? 'g' : 'f';
    CHECK(fwd.sorted[i].first == swapped);
  }
}

TEST_CASE("gap sets for a vanishing delta fill the full regions") {
  const Theorem2Report rep = theorem2_sets(sig_f(), sig_g(), 1e-12);
  REQUIRE(rep.all_nonempty);
  CHECK(*rep.w1 < 1e-6);
  CHECK(*rep.z1 == Catch::Approx(0.5).epsilon(0.0).margin(1e-6));  // threshold of f
  CHECK(rep.tail_ok);
}

TEST_CASE("gap sets vanish when delta exceeds the largest gap") {
  const Theorem2Report rep = theorem2_sets(sig_f(), sig_g(), 10.0);
  CHECK_FALSE(rep.all_nonempty);
  CHECK(rep.U1.empty());
  CHECK(rep.U2.empty());
  CHECK(rep.U3.empty());
  CHECK_FALSE(rep.tail_ok);
}

TEST_CASE("gap sets bracket the peak of the middle gap profile") {
  const MapSpec f = sig_f();
  const MapSpec g = sig_g();
  const MapFeatures ff = analyze_map(f);
  const MapFeatures fg = analyze_map(g);
  const auto gap_up = [&](double x) {
    return std::min(eval_unchecked(f, x) - x, eval_unchecked(g, x) - x);
  };
  const double peak = max_on_grid(gap_up, fg.A, ff.K);
  const double delta = 0.5 * peak;
  const Theorem2Report rep = theorem2_sets(f, g, delta);
  REQUIRE_FALSE(rep.U2.empty());
  CHECK(*rep.w2 < *rep.z2);
  // the middle set contains the argmax of the gap profile
  double argmax = fg.A;
  double best = -1.0;
  for (int i = 1; i < 100000; ++i) {
    const double x = fg.A + (ff.K - fg.A) * i / 100000.0;
    if (gap_up(x) > best) {
      best = gap_up(x);
      argmax = x;
    }
  }
  CHECK(*rep.w2 < argmax);
  CHECK(argmax < *rep.z2);
}

TEST_CASE("gap-set invariants: ordering, membership, delta monotonicity") {
  const MapSpec f = sig_f();
  const MapSpec g = sig_g();
  const double delta = 0.05;
  const Theorem2Report rep = theorem2_sets(f, g, delta);
  REQUIRE(rep.all_nonempty);
  CHECK(*rep.w1 <= *rep.z1);
  CHECK(*rep.z1 < *rep.w2);
  CHECK(*rep.w2 <= *rep.z2);
  CHECK(*rep.z2 < *rep.w3);

  const auto gap_down = [&](double x) {
    return std::min(x - eval_unchecked(f, x), x - eval_unchecked(g, x));
  };
  const auto gap_up = [&](double x) {
    return std::min(eval_unchecked(f, x) - x, eval_unchecked(g, x) - x);
  };
  // interval midpoints and endpoints satisfy the defining inequality
  for (const Interval& iv : rep.U1) {
    CHECK(gap_down(0.5 * (iv.lo + iv.hi)) >= delta);
    CHECK(gap_down(iv.lo) >= delta);
    CHECK(gap_down(iv.hi) >= delta);
  }
  for (const Interval& iv : rep.U2) CHECK(gap_up(0.5 * (iv.lo + iv.hi)) >= delta);
  for (const Interval& iv : rep.U3) CHECK(gap_down(0.5 * (iv.lo + iv.hi)) >= delta);

  // points one grid cell outside the reported boundaries fail the inequality
  const MapFeatures ff = analyze_map(f);
  const double cell = ff.A / (kSetScanGrid + 1);
  CHECK(gap_down(std::max(0.0, rep.U1.front().lo - cell)) < delta);
  CHECK(gap_down(std::min(ff.A, rep.U1.back().hi + cell)) < delta);

  // a larger delta shrinks every set (grid-level inclusion)
  const Theorem2Report tighter = theorem2_sets(f, g, delta * 1.5);
  for (const auto& [set_lo, set_hi] :
       {std::pair{&tighter.U1, &rep.U1}, {&tighter.U2, &rep.U2},
        {&tighter.U3, &rep.U3}}) {
    for (const Interval& inner : *set_lo) {
      bool contained = false;
      for (const Interval& outer : *set_hi)
        if (inner.lo >= outer.lo - 1e-9 && inner.hi <= outer.hi + 1e-9)
          contained = true;
      CHECK(contained);
    }
  }
}

TEST_CASE("gap sets demand strictly increasing maps") {
  CHECK_THROWS_AS(theorem2_sets(ex1_f(), ex1_g(), 0.05), PreconditionError);
}

TEST_CASE("contraction band holds for both worked maps") {
  const ContractionBand b1 = check_contraction_band(ex1_f());
  CHECK(b1.holds);
  CHECK_FALSE(b1.vacuous);
  CHECK(b1.sup_abs_derivative == Catch::Approx(0.475).epsilon(0.0).margin(5e-4));
  const MapFeatures f1 = analyze_map(ex1_f());
  CHECK(b1.argmax == Catch::Approx(*f1.M).epsilon(0.0).margin(1e-6));

  const ContractionBand b2 = check_contraction_band(ex2_f());
  CHECK(b2.holds);
  CHECK(b2.sup_abs_derivative == Catch::Approx(0.989).epsilon(0.0).margin(5e-4));
}

TEST_CASE("contraction band fails when the slope passes -1") {
  // G=1.5, bp=1, T=4 gives |f'(M)| > 1 at the peak-value endpoint.
  const MapSpec steep = MapSpec::rational_unimodal(1.5, 1.0, 4.0, 0.0);
  const ContractionBand band = check_contraction_band(steep);
  CHECK_FALSE(band.holds);
  CHECK(band.sup_abs_derivative > 1.0);
  const MapFeatures feats = analyze_map(steep);
  CHECK(band.sup_abs_derivative >=
        std::fabs(derivative(steep, *feats.M)) - 1e-12);
}

TEST_CASE("contraction band sup dominates the sampled slopes") {
  for (const MapSpec& spec : {ex1_f(), ex2_f()}) {
    const MapFeatures feats = analyze_map(spec);
    const ContractionBand band = check_contraction_band(spec);
    Xoshiro256pp rng(17);
    for (int i = 0; i < 1000; ++i) {
      const double x = *feats.B + (*feats.M - *feats.B) * rng.next_double();
      CHECK(band.sup_abs_derivative >= std::fabs(derivative(spec, x)) - 1e-9);
    }
  }
}

TEST_CASE("contraction band requires a unimodal map") {
  CHECK_THROWS_AS(check_contraction_band(sig_f()), PreconditionError);
}

TEST_CASE("composition search returns the shortest witness") {
  // First pair: the exhaustive oracle shows the minimal witness has
  // length 2 (f after g), even though longer squeezing sequences exist.
  const auto w1 = search_composition(ex1_f(), ex1_g());
  REQUIRE(w1.has_value());
  CHECK(witness_string(*w1) == "f,g");
  CHECK(w1->value == Catch::Approx(2.460530446753385).epsilon(0.0).margin(1e-9));

  const auto w2 = search_composition(ex2_f(), ex2_g());
  REQUIRE(w2.has_value());
  CHECK(witness_string(*w2) == "f,g");
  CHECK(w2->value == Catch::Approx(2.041).epsilon(0.0).margin(5e-4));

  // identical maps fix K, so no composition can cross the threshold
  CHECK_FALSE(search_composition(ex1_f(), ex1_f()).has_value());
}

TEST_CASE("the longer squeezing sequence of the first pair replays as documented") {
  // g(f(g(K_f))) is a valid (non-minimal) witness for the first pair.
  const std::vector<MapChoice> gfg{MapChoice::G, MapChoice::F, MapChoice::G};
  const MapFeatures ff = analyze_map(ex1_f());
  const double v = apply_composition(ex1_f(), ex1_g(), gfg, ff.K);
  CHECK(v == Catch::Approx(1.876).epsilon(0.0).margin(5e-4));
  CHECK(v < ff.A);
}

TEST_CASE("witness replay and shortest-length property against enumeration") {
  struct Pair { MapSpec f, g; };
  const std::vector<Pair> pairs = {{ex1_f(), ex1_g()}, {ex2_f(), ex2_g()}};
  for (const Pair& pr : pairs) {
    const auto witness = search_composition(pr.f, pr.g, 6);
    const auto all = enumerate_witnesses(pr.f, pr.g, 6);
    REQUIRE(witness.has_value());
    REQUIRE_FALSE(all.empty());
    const int min_len = all.front().m;
    CHECK(static_cast<int>(witness->length()) == min_len);

    // lexicographically smallest among the minimal-length witnesses
    std::vector<std::vector<MapChoice>> minimal;
    for (const EnumWitness& w : all)
      if (w.m == min_len) minimal.push_back(w.seq);
    CHECK(witness->sequence == *std::min_element(minimal.begin(), minimal.end()));

    // replay reproduces the reported value
    const MapFeatures ff = find_fixed_points(pr.f);
    const double replay =
        apply_composition(pr.f, pr.g, witness->sequence, ff.K);
    CHECK(std::fabs(replay - witness->value) <= 1e-12);
    CHECK(witness->value < ff.A);
  }
}

TEST_CASE("extra fixed-point-avoidance hypothesis of the second pair") {
  const T4Extra extra = check_t4_extra(ex2_f(), ex2_g());
  CHECK(extra.holds);
  CHECK(extra.value == Catch::Approx(2.986).epsilon(0.0).margin(5e-4));
  CHECK(extra.branch == '>');

  // direct evaluation chain agrees
  const MapFeatures ff = analyze_map(ex2_f());
  CHECK(extra.value ==
        Catch::Approx(eval_map(ex2_f(), eval_map(ex2_g(), ff.A))).epsilon(0.0).margin(1e-12));

  // the first pair: computed and reported, lands below the threshold
  const T4Extra extra1 = check_t4_extra(ex1_f(), ex1_g());
  CHECK(extra1.holds);
  CHECK(extra1.branch == '<');

  // an identity-like partner makes the composition land exactly on A_f
  const MapSpec ident = MapSpec::custom_map([](double x) { return x; },
                                            3.878922014523136);
  const T4Extra fixed = check_t4_extra(ex2_f(), ident);
  CHECK_FALSE(fixed.holds);
  CHECK(fixed.branch == '=');
}

TEST_CASE("low-threshold gap set of the perturbed unimodal theorem") {
  const Theorem5U tiny = theorem5_U(ex2_f(), ex2_g(), 1e-12);
  REQUIRE(tiny.inf_U.has_value());
  CHECK(*tiny.inf_U < 1e-6);

  const Theorem5U none = theorem5_U(ex2_f(), ex2_g(), 10.0);
  CHECK(none.U.empty());
  CHECK_FALSE(none.inf_U.has_value());

  // half the peak gap: nonempty with a strictly positive infimum
  const MapSpec f = ex2_f();
  const MapSpec g = ex2_g();
  const double Amin = std::min(analyze_map(f).A, analyze_map(g).A);
  const auto gap_down = [&](double x) {
    return std::min(x - eval_unchecked(f, x), x - eval_unchecked(g, x));
  };
  const double delta = 0.5 * max_on_grid(gap_down, 0.0, Amin);
  const Theorem5U rep = theorem5_U(f, g, delta);
  REQUIRE(rep.inf_U.has_value());
  CHECK(*rep.inf_U > 0.0);
  CHECK(gap_down(*rep.inf_U) >= delta);
}

TEST_CASE("certificates for the worked pairs") {
  const CertificateReport t3 = certify(TheoremId::T3, ex1_f(), ex1_g());
  CHECK(t3.all_hold);

  const CertificateReport t4 = certify(TheoremId::T4, ex2_f(), ex2_g());
  CHECK(t4.all_hold);

  // the second pair violates the T3 threshold order A_f < A_g
  const CertificateReport t3bad = certify(TheoremId::T3, ex2_f(), ex2_g());
  CHECK_FALSE(t3bad.all_hold);
  bool order_failed = false;
  for (const Hypothesis& h : t3bad.hypotheses)
    if (h.name == "threshold_order_Af_lt_Ag") order_failed = !h.holds;
  CHECK(order_failed);

  CHECK_THROWS_AS(certify(TheoremId::T1, ex1_f(), ex1_g()), PreconditionError);
  CHECK_THROWS_AS(certify(TheoremId::T3, sig_f(), sig_g()), PreconditionError);

  const CertificateReport t1 = certify(TheoremId::T1, sig_f(), sig_g());
  CHECK(t1.all_hold);

  const CertificateReport t2 = certify(TheoremId::T2, sig_f(), sig_g(), 0.05);
  CHECK(t2.all_hold);
  const CertificateReport t2bad = certify(TheoremId::T2, sig_f(), sig_g(), 10.0);
  CHECK_FALSE(t2bad.all_hold);
  CHECK_THROWS_AS(certify(TheoremId::T2, sig_f(), sig_g()), InputError);

  const CertificateReport t5 = certify(TheoremId::T5, ex2_f(), ex2_g(), 0.05);
  CHECK(t5.all_hold);
}

TEST_CASE("certificate serialization shape") {
  const CertificateReport t3 = certify(TheoremId::T3, ex1_f(), ex1_g());
  const nlohmann::json j = certificate_to_json(t3);
  CHECK(j["theorem"] == "T3");
  CHECK(j["verdict"] == "AllHold");
  REQUIRE(j["hypotheses"].is_array());
  bool has_band = false;
  for (const auto& h : j["hypotheses"]) {
    REQUIRE(h.contains("name"));
    REQUIRE(h.contains("holds"));
    if (h["name"] == "contraction_band") {
      has_band = true;
      CHECK(h["witness"]["sup"].get<double>() ==
            Catch::Approx(0.475).epsilon(0.0).margin(5e-4));
    }
  }
  CHECK(has_band);
}
