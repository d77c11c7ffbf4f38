#include "riskx/model/risk.h"

#include <cmath>

#include "riskx/common/error.h"

namespace riskx::model {

std::string_view RiskLevelName(RiskLevel level) {
  switch (level) {
    case RiskLevel::kLow:
      return "LOW";
    case RiskLevel::kMedium:
      return "MEDIUM";
    case RiskLevel::kHigh:
      return "HIGH";
  }
  return "MEDIUM";
}

double Logistic(double margin) {
  // Split by sign so exp() never overflows.
  if (margin >= 0.0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

RiskLevel RiskLevelFor(double probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw Error(ErrorCode::kOutOfRange, "probability must be within [0, 1]");
  }
  if (probability < kLowRiskBelow) return RiskLevel::kLow;
  if (probability > kHighRiskAbove) return RiskLevel::kHigh;
  return RiskLevel::kMedium;
}

RiskEstimate EstimateFromMargin(double margin) {
  RiskEstimate estimate;
  estimate.margin = margin;
  estimate.probability = Logistic(margin);
  estimate.level = RiskLevelFor(estimate.probability);
  return estimate;
}

RiskEstimate Predict(const TreeEnsemble& ensemble, const FeatureSchema& schema,
                     const PatientRecord& record) {
  if (ensemble.schema_version() != schema.version() ||
      ensemble.num_features() != schema.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "model schema '" + ensemble.schema_version() +
                    "' does not match '" + schema.version() + "'");
  }
  ValidateRecord(schema, record);
  return EstimateFromMargin(ensemble.Margin(record.values));
}

nlohmann::json EstimateToJson(const RiskEstimate& estimate) {
  return {{"margin", estimate.margin},
          {"probability", estimate.probability},
          {"level", RiskLevelName(estimate.level)}};
}

}  // namespace riskx::model
