#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include "riskx/explain/shap.h"
#include "riskx/model/feature_schema.h"

namespace riskx::explain {

enum class Direction { kIncreases, kDecreases, kNeutral };
enum class Color { kRed, kGreen, kGray };

std::string_view DirectionName(Direction direction);
std::string_view ColorName(Color color);

// Chart-ready view of one feature's attribution.
struct FactorView {
  std::string id;
  std::string abbreviation;
  double shap = 0.0;
  double percent = 0.0;  // |shap| / sum|shap| * 100, full precision.
  double signed_percent = 0.0;
  Direction direction = Direction::kNeutral;
  Color color = Color::kGray;
  int rank = 0;  // 1 = largest |shap|.
};

// Factors are stored in canonical schema order.
struct ExplanationView {
  double base_value = 0.0;
  double margin = 0.0;
  std::vector<FactorView> factors;
  // Set when every attribution is zero and the percentages are undefined.
  bool all_zero = false;
};

// Converts raw attributions into percentage shares of the total absolute
// attribution. Zero attributions are NEUTRAL/GRAY with 0%. Ranks follow
// |shap| descending with ties kept in schema order. When every attribution is
// zero the view is all-NEUTRAL with all_zero set. Throws kSchemaMismatch on a
// width mismatch.
ExplanationView ToPercentages(const Attribution& attribution,
                              const model::FeatureSchema& schema);

// Indices into view.factors ordered by percent descending; stable.
std::vector<std::size_t> RankFactors(const ExplanationView& view);

nlohmann::json ViewToJson(const ExplanationView& view);

}  // namespace riskx::explain
