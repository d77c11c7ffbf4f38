#include "riskx/simulate/simulate.h"

#include "riskx/common/error.h"
#include "riskx/explain/shap.h"

namespace riskx::simulate {

model::PatientRecord ApplyOverrides(
    const model::FeatureSchema& schema, const model::PatientRecord& base_record,
    const std::map<std::string, double>& overrides) {
  model::ValidateRecord(schema, base_record);
  model::PatientRecord after = base_record;
  for (const auto& [id, value] : overrides) {
    const std::string path = "/overrides/" + id;
    const auto index = schema.IndexOf(id);
    if (!index) {
      throw Error(ErrorCode::kUnknownFeature, "unknown feature '" + id + "'",
                  path);
    }
    const model::FeatureSpec& spec = schema[*index];
    if (!spec.controllable) {
      throw Error(ErrorCode::kUncontrollableFeature,
                  spec.label + " cannot be changed by lifestyle", path);
    }
    if (!spec.InBounds(value)) {
      throw Error(ErrorCode::kOutOfBounds,
                  id + " override is outside the allowed range", path);
    }
    after.values[*index] = value;
  }
  return after;
}

SimulationResult Simulate(const model::TreeEnsemble& ensemble,
                          const model::FeatureSchema& schema,
                          const SimulationRequest& request) {
  SimulationResult result;
  result.after_record =
      ApplyOverrides(schema, request.base_record, request.overrides);
  result.before = model::Predict(ensemble, schema, request.base_record);
  result.after = model::Predict(ensemble, schema, result.after_record);
  result.delta_probability =
      result.after.probability - result.before.probability;
  result.after_view = explain::ToPercentages(
      explain::TreeShap(ensemble, result.after_record), schema);
  return result;
}

nlohmann::json SimulationToJson(const model::FeatureSchema& schema,
                                const SimulationResult& result) {
  return {{"before", model::EstimateToJson(result.before)},
          {"after", model::EstimateToJson(result.after)},
          {"delta_probability", result.delta_probability},
          {"after_record", model::RecordToJson(schema, result.after_record)},
          {"after_view", explain::ViewToJson(result.after_view)}};
}

}  // namespace riskx::simulate
