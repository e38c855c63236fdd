#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "bit/circuit_model.hpp"
#include "bit/estimator.hpp"
#include "bit/simulator.hpp"

namespace bit {

/// Versioned design document ("schema": 1) with explicit unit annotations
/// (uH / pF / ohm / m / MHz). The same document serves as InterfaceDesign
/// (all values are ground truth) and KnownDesign (each sensing branch's
/// unknown component holds its nominal value).
nlohmann::json design_to_json(const InterfaceDesign& design);
InterfaceDesign design_from_json(const nlohmann::json& document);

InterfaceDesign load_design(const std::string& path);
void save_design(const InterfaceDesign& design, const std::string& path);

KnownDesign load_known_design(const std::string& path);

nlohmann::json estimation_result_to_json(const EstimationResult& result);
std::string estimation_result_csv_header();
std::string estimation_result_csv_row(const EstimationResult& result);

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& document);

}  // namespace bit
