#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include "riskx/model/dataset.h"
#include "riskx/model/feature_schema.h"
#include "riskx/model/tree_ensemble.h"

namespace riskx::narrate {

// Values below `upper` (and at or above the previous band) get `label`.
struct CategoryBand {
  double upper = std::numeric_limits<double>::infinity();
  std::string label;
};

// Static lay knowledge about one factor. Everything a narrative may state
// beyond the patient's own numbers comes from here.
struct KnowledgeEntry {
  std::string id;
  std::string label;
  std::string noun;  // How a sentence refers to the factor ("BMI").
  std::string unit;
  std::string definition;
  bool binary = false;
  bool controllable = false;
  std::string ideal_range_text;  // "18.5–22.9", empty when none applies.
  std::vector<CategoryBand> bands;
  // Binary factors: subject phrase for value 0 and 1 ("Not smoking").
  std::vector<std::string> binary_phrases;
  // Binary factors: display text for value 0 and 1 ("No", "Yes").
  std::vector<std::string> binary_values;
  // Any other numbers the narrative may quote for this factor.
  std::vector<double> reference_numbers;

  // Category label for `value`, empty when the factor has no bands.
  std::string CategoryFor(double value) const;
  // "24.7 kg/m²", "Yes".
  std::string ValueText(double value) const;
};

struct KnowledgeBase {
  std::vector<KnowledgeEntry> entries;  // Schema order.
  // Share of mean |SHAP| over a reference dataset, percent, schema order.
  std::vector<double> global_importance;

  const KnowledgeEntry* Find(std::string_view id) const;
};

// Builds the knowledge base for `schema`. Factors of the default diabetes
// schema get curated nouns, bands and phrases; others fall back to the
// schema's label and definition. Throws kEmptyKnowledgeBase for an empty
// schema and kInvalidArgument when `global_importance` does not cover the
// schema or does not sum to 100 +- 0.1.
KnowledgeBase BuildKnowledgeBase(const model::FeatureSchema& schema,
                                 std::vector<double> global_importance);

// Mean |SHAP| per feature over `rows`, normalized to percent. Falls back to
// an even split when every attribution is zero.
std::vector<double> ComputeGlobalImportance(
    const model::TreeEnsemble& ensemble,
    const std::vector<model::PatientRecord>& rows);

nlohmann::json KnowledgeBaseToJson(const KnowledgeBase& kb);

}  // namespace riskx::narrate
