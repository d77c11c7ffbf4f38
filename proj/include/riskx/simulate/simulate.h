#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>
#include "riskx/explain/explanation_view.h"
#include "riskx/model/feature_schema.h"
#include "riskx/model/risk.h"
#include "riskx/model/tree_ensemble.h"

namespace riskx::simulate {

struct SimulationRequest {
  model::PatientRecord base_record;
  // feature id -> new value. Only controllable features may be overridden.
  std::map<std::string, double> overrides;
};

struct SimulationResult {
  model::RiskEstimate before;
  model::RiskEstimate after;
  double delta_probability = 0.0;  // after - before
  model::PatientRecord after_record;
  explain::ExplanationView after_view;
};

// Returns base_record with the overrides applied. Throws kUnknownFeature,
// kUncontrollableFeature or kOutOfBounds with a "/overrides/<id>" path.
model::PatientRecord ApplyOverrides(
    const model::FeatureSchema& schema, const model::PatientRecord& base_record,
    const std::map<std::string, double>& overrides);

// What-if evaluation: predicts the base and the overridden record and
// explains the latter. Stateless; `request` is not modified.
SimulationResult Simulate(const model::TreeEnsemble& ensemble,
                          const model::FeatureSchema& schema,
                          const SimulationRequest& request);

nlohmann::json SimulationToJson(const model::FeatureSchema& schema,
                                const SimulationResult& result);

}  // namespace riskx::simulate
