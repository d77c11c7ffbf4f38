#include "riskx/explain/explanation_view.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskx/common/error.h"

namespace riskx::explain {

std::string_view DirectionName(Direction direction) {
  switch (direction) {
    case Direction::kIncreases:
      return "INCREASES";
    case Direction::kDecreases:
      return "DECREASES";
    case Direction::kNeutral:
      return "NEUTRAL";
  }
  return "NEUTRAL";
}

std::string_view ColorName(Color color) {
  switch (color) {
    case Color::kRed:
      return "RED";
    case Color::kGreen:
      return "GREEN";
    case Color::kGray:
      return "GRAY";
  }
  return "GRAY";
}

ExplanationView ToPercentages(const Attribution& attribution,
                              const model::FeatureSchema& schema) {
  const std::vector<double>& shap = attribution.shap_values;
  if (shap.size() != schema.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "attribution has " + std::to_string(shap.size()) +
                    " values, schema has " + std::to_string(schema.size()));
  }
  ExplanationView view;
  view.base_value = attribution.base_value;
  view.margin = attribution.Total();

  double total = 0.0;
  for (double s : shap) total += std::abs(s);
  view.all_zero = !(total > 0.0);

  view.factors.resize(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    FactorView& factor = view.factors[i];
    factor.id = schema[i].id;
    factor.abbreviation = schema[i].abbreviation;
    factor.shap = shap[i];
    if (view.all_zero || shap[i] == 0.0) continue;
    factor.percent = std::abs(shap[i]) / total * 100.0;
    if (shap[i] > 0.0) {
      factor.direction = Direction::kIncreases;
      factor.color = Color::kRed;
      factor.signed_percent = factor.percent;
    } else {
      factor.direction = Direction::kDecreases;
      factor.color = Color::kGreen;
      factor.signed_percent = -factor.percent;
    }
  }

  std::vector<std::size_t> order(schema.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return std::abs(shap[a]) > std::abs(shap[b]);
                   });
  for (std::size_t r = 0; r < order.size(); ++r) {
    view.factors[order[r]].rank = static_cast<int>(r + 1);
  }
  return view;
}

std::vector<std::size_t> RankFactors(const ExplanationView& view) {
  std::vector<std::size_t> order(view.factors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return view.factors[a].percent > view.factors[b].percent;
                   });
  return order;
}

nlohmann::json ViewToJson(const ExplanationView& view) {
  nlohmann::json factors = nlohmann::json::array();
  for (const FactorView& f : view.factors) {
    factors.push_back({{"id", f.id},
                       {"abbr", f.abbreviation},
                       {"shap", f.shap},
                       {"percent", f.percent},
                       {"signed_percent", f.signed_percent},
                       {"direction", DirectionName(f.direction)},
                       {"color", ColorName(f.color)},
                       {"rank", f.rank}});
  }
  return {{"base_value", view.base_value},
          {"margin", view.margin},
          {"all_zero", view.all_zero},
          {"factors", std::move(factors)}};
}

}  // namespace riskx::explain
