#pragma once

#include <string_view>

#include <nlohmann/json.hpp>
#include "riskx/model/feature_schema.h"
#include "riskx/model/tree_ensemble.h"

namespace riskx::model {

enum class RiskLevel { kLow, kMedium, kHigh };

std::string_view RiskLevelName(RiskLevel level);

// Probabilities below this are LOW, above kHighRiskAbove are HIGH.
inline constexpr double kLowRiskBelow = 0.35;
inline constexpr double kHighRiskAbove = 0.65;

struct RiskEstimate {
  double margin = 0.0;       // log-odds
  double probability = 0.5;  // logistic(margin)
  RiskLevel level = RiskLevel::kMedium;

  bool operator==(const RiskEstimate&) const = default;
};

double Logistic(double margin);

// Throws kOutOfRange unless 0 <= probability <= 1.
RiskLevel RiskLevelFor(double probability);

// Validates `record` against `schema` (kSchemaMismatch when the ensemble was
// built for another schema or the record has the wrong width).
RiskEstimate Predict(const TreeEnsemble& ensemble, const FeatureSchema& schema,
                     const PatientRecord& record);

// Unchecked variant for records already validated elsewhere.
RiskEstimate EstimateFromMargin(double margin);

nlohmann::json EstimateToJson(const RiskEstimate& estimate);

}  // namespace riskx::model
