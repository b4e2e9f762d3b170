#pragma once

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "allee/certify.hpp"
#include "allee/montecarlo.hpp"
#include "allee/rds.hpp"

namespace allee {

/// Shortest decimal representation that round-trips the double exactly.
std::string format_double(double v);

// MapSpec <-> {"family":"sigmoid","rho":..,"a":..,"b":..} /
//             {"family":"rational_unimodal","G":..,"bp":..,"T":..,"b":..}
nlohmann::json map_spec_to_json(const MapSpec& spec);

/// Standalone map entry. A null/absent "b" means the natural bound (the
/// peak value) for unimodal maps, and is an error for increasing maps;
/// inside a system config the shared-bound resolution applies instead.
MapSpec map_spec_from_json(const nlohmann::json& obj);

/// System configuration document:
///   {"f": <map>, "g": <map>, "p": 0.5,
///    "perturbation": {"delta": 0.05, "distribution": "uniform"},   (optional)
///    "b": 3.0}                                                     (optional)
/// Unknown keys are rejected. A missing bound is derived as
/// max(M_f, M_g) when both maps are unimodal, otherwise it must be given.
RdsConfig system_config_from_json(const nlohmann::json& doc);
RdsConfig load_system_config(const std::string& path);

/// The fully resolved config (numeric b everywhere), reloadable through
/// system_config_from_json.
nlohmann::json resolved_config_json(const RdsConfig& config);

nlohmann::json features_to_json(const MapFeatures& feats);
nlohmann::json ordering_to_json(const OrderingClass& oc);
nlohmann::json certificate_to_json(const CertificateReport& report);
nlohmann::json validation_to_json(const ValidationReport& report);
nlohmann::json estimate_to_json(const EstimateResult& est);
nlohmann::json absorption_to_json(const AbsorptionEstimate& est);
nlohmann::json sweep_to_json(const SweepResult& sweep);
nlohmann::json extinction_report_to_json(const ExtinctionReport& report);

/// Trajectory CSV: header "step,state,choice", one row per state; the
/// choice column carries the map applied on the incoming step (empty for
/// the initial state).
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

/// Sweep CSV: "p,estimate,ci_low,ci_high,n_trials,n_censored,seed"; failed
/// points carry "nan" estimates and full censoring.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

}  // namespace allee
