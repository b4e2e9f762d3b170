#include "allee/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

namespace allee {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
}

double require_number(const json& obj, const std::string& key,
                      const std::string& where) {
  if (!obj.contains(key))
    throw ConfigError("missing key '" + key + "' in " + where);
  if (!obj[key].is_number())
    throw ConfigError("key '" + key + "' in " + where + " must be a number");
  return obj[key].get<double>();
}

/// Parsed map entry; bound may be unresolved (NaN).
struct RawMap {
  MapFamily family;
  double rho = 0, a = 0, G = 0, bp = 0, T = 0;
  double b = std::numeric_limits<double>::quiet_NaN();
};

RawMap raw_map_from_json(const json& obj, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  if (!obj.contains("family"))
    throw ConfigError("missing key 'family' in " + where);
  const std::string family = obj["family"].get<std::string>();
  RawMap raw;
  if (family == "sigmoid") {
    reject_unknown_keys(obj, {"family", "rho", "a", "b"}, where);
    raw.family = MapFamily::Sigmoid;
    raw.rho = require_number(obj, "rho", where);
    raw.a = require_number(obj, "a", where);
  } else if (family == "rational_unimodal") {
    reject_unknown_keys(obj, {"family", "G", "bp", "T", "b"}, where);
    raw.family = MapFamily::RationalUnimodal;
    raw.G = require_number(obj, "G", where);
    raw.bp = require_number(obj, "bp", where);
    raw.T = require_number(obj, "T", where);
  } else if (family == "custom") {
    throw ConfigError("custom maps cannot be loaded from a config file");
  } else {
    throw ConfigError("unknown map family '" + family + "' in " + where);
  }
  if (obj.contains("b") && !obj["b"].is_null()) {
    if (!obj["b"].is_number())
      throw ConfigError("key 'b' in " + where + " must be a number or null");
    raw.b = obj["b"].get<double>();
    if (!std::isfinite(raw.b) || raw.b <= 0.0)
      throw ConfigError("key 'b' in " + where +
                        " must be finite and positive");
  }
  return raw;
}

MapSpec build_map(const RawMap& raw, double b) {
  switch (raw.family) {
    case MapFamily::Sigmoid:
      return MapSpec::sigmoid(raw.rho, raw.a, b);
    case MapFamily::RationalUnimodal:
      return MapSpec::rational_unimodal(raw.G, raw.bp, raw.T, b);
    case MapFamily::Custom:
      break;
  }
  throw ConfigError("unsupported family");
}

/// Peak value of a raw unimodal entry, independent of the bound.
double raw_peak(const RawMap& raw) {
  const double B = std::sqrt(raw.T * raw.T + raw.bp);
  const double d = B - raw.T;
  return raw.G * raw.bp * B / (d * d + raw.bp);
}

NoiseLaw noise_law_from_string(const std::string& name) {
  if (name == "uniform") return NoiseLaw::Uniform;
  if (name == "truncated_triangular") return NoiseLaw::TruncatedTriangular;
  throw ConfigError("unknown noise distribution '" + name + "'");
}

std::string noise_law_to_string(NoiseLaw law) {
  return law == NoiseLaw::Uniform ? "uniform" : "truncated_triangular";
}

}  // namespace

json map_spec_to_json(const MapSpec& spec) {
  json j;
  switch (spec.family) {
    case MapFamily::Sigmoid:
      j["family"] = "sigmoid";
      j["rho"] = spec.rho;
      j["a"] = spec.a;
      break;
    case MapFamily::RationalUnimodal:
      j["family"] = "rational_unimodal";
      j["G"] = spec.G;
      j["bp"] = spec.bp;
      j["T"] = spec.T;
      break;
    case MapFamily::Custom:
      throw ConfigError("custom maps cannot be serialized to a config file");
  }
  j["b"] = spec.domain_bound;
  return j;
}

MapSpec map_spec_from_json(const json& obj) {
  const RawMap raw = raw_map_from_json(obj, "map");
  if (!std::isnan(raw.b)) return build_map(raw, raw.b);
  if (raw.family == MapFamily::RationalUnimodal)
    return MapSpec::rational_unimodal(raw.G, raw.bp, raw.T, 0.0);
  throw ConfigError("map entry needs an explicit bound 'b'");
}

RdsConfig system_config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(doc, {"f", "g", "p", "perturbation", "b"}, "config");
  if (!doc.contains("f") || !doc.contains("g"))
    throw ConfigError("config requires map entries 'f' and 'g'");

  const RawMap raw_f = raw_map_from_json(doc["f"], "map 'f'");
  const RawMap raw_g = raw_map_from_json(doc["g"], "map 'g'");

  double top_b = std::numeric_limits<double>::quiet_NaN();
  if (doc.contains("b") && !doc["b"].is_null()) {
    if (!doc["b"].is_number())
      throw ConfigError("config key 'b' must be a number or null");
    top_b = doc["b"].get<double>();
    if (!std::isfinite(top_b) || top_b <= 0.0)
      throw ConfigError("config key 'b' must be finite and positive");
  }

  // Resolve the shared bound: explicit values must agree; otherwise both
  // maps must be unimodal so b = max(M_f, M_g) applies.
  double b = top_b;
  for (const RawMap* raw : {&raw_f, &raw_g}) {
    if (std::isnan(raw->b)) continue;
    if (std::isnan(b))
      b = raw->b;
    else if (std::fabs(b - raw->b) > 0.0)
      throw ConfigError("conflicting domain bounds in config");
  }
  if (std::isnan(b)) {
    if (raw_f.family == MapFamily::RationalUnimodal &&
        raw_g.family == MapFamily::RationalUnimodal)
      b = std::max(raw_peak(raw_f), raw_peak(raw_g));
    else
      throw ConfigError(
          "domain bound 'b' is required unless both maps are unimodal");
  }

  RdsConfig config;
  config.f = build_map(raw_f, b);
  config.g = build_map(raw_g, b);
  config.b = b;
  if (!doc.contains("p")) throw ConfigError("config requires 'p'");
  if (!doc["p"].is_number())
    throw ConfigError("config key 'p' must be a number");
  config.p = doc["p"].get<double>();

  if (doc.contains("perturbation") && !doc["perturbation"].is_null()) {
    const json& pj = doc["perturbation"];
    if (!pj.is_object())
      throw ConfigError("config key 'perturbation' must be an object");
    reject_unknown_keys(pj, {"delta", "distribution"}, "perturbation");
    PerturbationSpec pert;
    pert.delta = require_number(pj, "delta", "perturbation");
    if (pj.contains("distribution"))
      pert.distribution =
          noise_law_from_string(pj["distribution"].get<std::string>());
    config.perturbation = pert;
  }

  config.validate();
  return config;
}

RdsConfig load_system_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " +
                      e.what());
  }
  return system_config_from_json(doc);
}

json resolved_config_json(const RdsConfig& config) {
  json j;
  j["f"] = map_spec_to_json(config.f);
  j["g"] = map_spec_to_json(config.g);
  j["p"] = config.p;
  j["b"] = config.b;
  if (config.perturbation) {
    j["perturbation"] = {
        {"delta", config.perturbation->delta},
        {"distribution", noise_law_to_string(config.perturbation->distribution)}};
  }
  return j;
}

json features_to_json(const MapFeatures& feats) {
  json j;
  j["A"] = feats.A;
  j["K"] = feats.K;
  j["B"] = feats.B ? json(*feats.B) : json(nullptr);
  j["M"] = feats.M ? json(*feats.M) : json(nullptr);
  j["monotonicity"] = feats.monotonicity == Monotonicity::StrictlyIncreasing
                          ? "strictly_increasing"
                          : "unimodal";
  return j;
}

json ordering_to_json(const OrderingClass& oc) {
  json j;
  switch (oc.pattern) {
    case OrderingPattern::AfAgKfKg: j["pattern"] = "AfAgKfKg"; break;
    case OrderingPattern::AgAfKgKf: j["pattern"] = "AgAfKgKf"; break;
    case OrderingPattern::AfKfAgKg: j["pattern"] = "AfKfAgKg"; break;
    case OrderingPattern::AgKgAfKf: j["pattern"] = "AgKgAfKf"; break;
    case OrderingPattern::Other: j["pattern"] = "Other"; break;
  }
  json sorted = json::array();
  for (const auto& [label, value] : oc.sorted)
    sorted.push_back({{"label", label}, {"value", value}});
  j["sorted"] = sorted;
  j["has_ties"] = oc.has_ties;
  return j;
}

json certificate_to_json(const CertificateReport& report) {
  json j;
  j["theorem"] = to_string(report.theorem);
  j["rigor"] = "numeric_grid_evidence";
  json hyps = json::array();
  for (const Hypothesis& h : report.hypotheses) {
    json hj;
    hj["name"] = h.name;
    hj["holds"] = h.holds;
    if (!h.witness.is_null()) hj["witness"] = h.witness;
    hyps.push_back(hj);
  }
  j["hypotheses"] = hyps;
  j["verdict"] = report.all_hold ? "AllHold" : "SomeFail";
  return j;
}

json validation_to_json(const ValidationReport& report) {
  json j;
  j["all_pass"] = report.all_pass;
  json axioms = json::array();
  for (const AxiomCheck& ax : report.axioms) {
    json aj;
    aj["name"] = ax.name;
    aj["pass"] = ax.pass;
    if (!ax.pass) {
      aj["worst_x"] = ax.worst_x;
      aj["worst_violation"] = ax.worst_violation;
    }
    axioms.push_back(aj);
  }
  j["axioms"] = axioms;
  if (report.features) j["features"] = features_to_json(*report.features);
  if (!report.failure.empty()) j["failure"] = report.failure;
  return j;
}

json estimate_to_json(const EstimateResult& est) {
  json j;
  j["estimate"] = est.estimate;
  j["ci_low"] = est.ci_low;
  j["ci_high"] = est.ci_high;
  j["n_trials"] = est.n_trials;
  j["n_undecided"] = est.n_undecided;
  j["seed"] = est.seed;
  j["horizon"] = est.horizon;
  if (est.degenerate_ci) j["degenerate_ci"] = true;
  return j;
}

json absorption_to_json(const AbsorptionEstimate& est) {
  json j;
  j["p0"] = estimate_to_json(est.p0);
  j["p1"] = estimate_to_json(est.p1);
  j["undecided_fraction"] =
      static_cast<double>(est.p0.n_undecided) /
      static_cast<double>(est.p0.n_trials);
  j["classification"] = {{"eps_extinct", est.classification.eps_extinct},
                         {"window", est.classification.window},
                         {"trap_lo", est.classification.trap_lo},
                         {"trap_hi", est.classification.trap_hi}};
  return j;
}

json sweep_to_json(const SweepResult& sweep) {
  json j;
  j["x0"] = sweep.x0;
  j["threshold"] = sweep.threshold;
  j["n_trials"] = sweep.n_trials;
  j["cap"] = sweep.cap;
  j["seed"] = sweep.seed;
  json points = json::array();
  for (const SweepPoint& pt : sweep.points) {
    json pj;
    pj["p"] = pt.p;
    if (pt.value)
      pj["value"] = estimate_to_json(*pt.value);
    else
      pj["error"] = pt.error;
    points.push_back(pj);
  }
  j["points"] = points;
  return j;
}

json extinction_report_to_json(const ExtinctionReport& report) {
  json j;
  j["horizon"] = report.horizon;
  j["n_trials"] = report.n_trials;
  j["all_extinct"] = report.all_extinct;
  json rows = json::array();
  for (const ExtinctionRow& row : report.rows) {
    rows.push_back({{"x0", row.x0},
                    {"extinct_fraction", row.extinct_fraction},
                    {"ci_low", row.ci.lo},
                    {"ci_high", row.ci.hi},
                    {"n_undecided", row.n_undecided},
                    {"flagged", row.flagged}});
  }
  j["rows"] = rows;
  return j;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "step,state,choice\n";
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    os << i << ',' << format_double(traj.states[i]) << ',';
    if (i > 0) os << (traj.choices[i - 1] ? 'f' : 'g');
    os << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << "p,estimate,ci_low,ci_high,n_trials,n_censored,seed\n";
  for (std::size_t i = 0; i < sweep.points.size(); ++i) {
    const SweepPoint& pt = sweep.points[i];
    const std::uint64_t point_seed = derive_subseed(sweep.seed, i);
    os << format_double(pt.p) << ',';
    if (pt.value) {
      os << format_double(pt.value->estimate) << ','
         << format_double(pt.value->ci_low) << ','
         << format_double(pt.value->ci_high) << ',' << pt.value->n_trials
         << ',' << pt.value->n_undecided << ',' << pt.value->seed;
    } else {
      os << "nan,nan,nan," << sweep.n_trials << ',' << sweep.n_trials << ','
         << point_seed;
    }
    os << '\n';
  }
}

}  // namespace allee
