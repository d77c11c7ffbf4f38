#include "riskx/narrate/knowledge_base.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>

#include "riskx/common/error.h"
#include "riskx/common/numeric_format.h"
#include "riskx/explain/shap.h"
#include "riskx/narrate/numerals.h"

namespace riskx::narrate {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CuratedDetails {
  std::string noun;
  std::string ideal_range_text;
  std::vector<CategoryBand> bands;
  std::vector<std::string> binary_phrases;
  std::vector<std::string> binary_values;
};

// Lay wording for the default diabetes factors. BMI bands use the
// Asia-Pacific cut-offs.
const std::map<std::string, CuratedDetails>& Curated() {
  static const auto* const kDetails = new std::map<std::string, CuratedDetails>{
      {"age", {"age", "", {}, {}, {}}},
      {"sex",
       {"sex", "", {}, {"Being female", "Being male"}, {"Female", "Male"}}},
      {"bmi",
       {"BMI",
        "18.5–22.9",
        {{18.5, "underweight"},
         {23.0, "normal"},
         {25.0, "overweight"},
         {30.0, "obese"},
         {kInf, "severely obese"}},
        {},
        {}}},
      {"fasting_glucose",
       {"fasting blood glucose",
        "70–99",
        {{70.0, "low"},
         {100.0, "normal"},
         {126.0, "prediabetic"},
         {kInf, "diabetic-range"}},
        {},
        {}}},
      {"systolic_bp",
       {"systolic blood pressure",
        "90–119",
        {{90.0, "low"},
         {120.0, "normal"},
         {130.0, "elevated"},
         {kInf, "high"}},
        {},
        {}}},
      {"family_history",
       {"family history of diabetes",
        "",
        {},
        {"Having no family history of diabetes",
         "Having a family history of diabetes"},
        {"No", "Yes"}}},
      {"physical_activity",
       {"weekly physical activity",
        "at least 150",
        {{150.0, "below-recommended"}, {kInf, "sufficient"}},
        {},
        {}}},
      {"smoking",
       {"smoking status",
        "No (non-smoker)",
        {},
        {"Not smoking", "Smoking"},
        {"No", "Yes"}}},
  };
  return *kDetails;
}

std::string LowerFirst(std::string text) {
  if (!text.empty()) {
    text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
  }
  return text;
}

std::string GenericIdealText(const model::FeatureSpec& spec) {
  if (!spec.ideal_range) return "";
  const model::IdealRange& r = *spec.ideal_range;
  if (r.lo == r.hi) return FormatShortest(r.lo);
  return FormatShortest(r.lo) + "–" + FormatShortest(r.hi);
}

}  // namespace

std::string KnowledgeEntry::CategoryFor(double value) const {
  for (const CategoryBand& band : bands) {
    if (value < band.upper) return band.label;
  }
  return "";
}

std::string KnowledgeEntry::ValueText(double value) const {
  if (binary_values.size() == 2 && (value == 0.0 || value == 1.0)) {
    return binary_values[static_cast<std::size_t>(value)];
  }
  std::string text = FormatShortest(value);
  if (!unit.empty()) text += " " + unit;
  return text;
}

const KnowledgeEntry* KnowledgeBase::Find(std::string_view id) const {
  for (const KnowledgeEntry& entry : entries) {
    if (entry.id == id) return &entry;
  }
  return nullptr;
}

KnowledgeBase BuildKnowledgeBase(const model::FeatureSchema& schema,
                                 std::vector<double> global_importance) {
  if (schema.size() == 0) {
    throw Error(ErrorCode::kEmptyKnowledgeBase,
                "knowledge base needs at least one feature");
  }
  if (global_importance.size() != schema.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "global importance must cover every feature");
  }
  double total = 0.0;
  for (double share : global_importance) {
    if (!(share >= 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "global importance must be non-negative");
    }
    total += share;
  }
  if (std::abs(total - 100.0) > 0.1) {
    throw Error(ErrorCode::kInvalidArgument,
                "global importance must sum to 100");
  }

  KnowledgeBase kb;
  kb.global_importance = std::move(global_importance);
  for (const model::FeatureSpec& spec : schema.features()) {
    KnowledgeEntry entry;
    entry.id = spec.id;
    entry.label = spec.label;
    entry.noun = LowerFirst(spec.label);
    entry.unit = spec.unit;
    entry.definition = spec.definition;
    entry.binary = spec.kind == model::FeatureKind::kBinary;
    entry.controllable = spec.controllable;
    entry.ideal_range_text = GenericIdealText(spec);
    if (spec.kind == model::FeatureKind::kBinary) {
      entry.binary_phrases = {"Not having " + entry.noun,
                              "Having " + entry.noun};
      entry.binary_values = {"No", "Yes"};
    }
    const auto curated = Curated().find(spec.id);
    if (curated != Curated().end()) {
      const CuratedDetails& details = curated->second;
      entry.noun = details.noun;
      entry.ideal_range_text = details.ideal_range_text;
      entry.bands = details.bands;
      if (!details.binary_phrases.empty()) {
        entry.binary_phrases = details.binary_phrases;
        entry.binary_values = details.binary_values;
      }
    }

    if (spec.ideal_range) {
      entry.reference_numbers.push_back(spec.ideal_range->lo);
      entry.reference_numbers.push_back(spec.ideal_range->hi);
    }
    for (const CategoryBand& band : entry.bands) {
      if (std::isfinite(band.upper)) entry.reference_numbers.push_back(band.upper);
    }
    for (const std::string* text :
         {&entry.definition, &entry.ideal_range_text, &entry.noun}) {
      for (double n : ExtractNumerals(*text)) entry.reference_numbers.push_back(n);
    }
    kb.entries.push_back(std::move(entry));
  }
  return kb;
}

std::vector<double> ComputeGlobalImportance(
    const model::TreeEnsemble& ensemble,
    const std::vector<model::PatientRecord>& rows) {
  const std::size_t n = ensemble.num_features();
  std::vector<double> mean_abs(n, 0.0);
  for (const model::PatientRecord& row : rows) {
    const explain::Attribution attr = explain::TreeShap(ensemble, row);
    for (std::size_t i = 0; i < n; ++i) mean_abs[i] += std::abs(attr.shap_values[i]);
  }
  double total = 0.0;
  for (double v : mean_abs) total += v;
  std::vector<double> shares(n, n ? 100.0 / static_cast<double>(n) : 0.0);
  if (total > 0.0) {
    for (std::size_t i = 0; i < n; ++i) shares[i] = mean_abs[i] / total * 100.0;
  }
  return shares;
}

nlohmann::json KnowledgeBaseToJson(const KnowledgeBase& kb) {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t i = 0; i < kb.entries.size(); ++i) {
    const KnowledgeEntry& e = kb.entries[i];
    nlohmann::json bands = nlohmann::json::array();
    for (const CategoryBand& band : e.bands) {
      bands.push_back({{"below", std::isfinite(band.upper)
                                     ? nlohmann::json(band.upper)
                                     : nlohmann::json(nullptr)},
                       {"label", band.label}});
    }
    entries.push_back({{"id", e.id},
                       {"label", e.label},
                       {"unit", e.unit},
                       {"definition", e.definition},
                       {"ideal_range", e.ideal_range_text},
                       {"categories", std::move(bands)},
                       {"global_importance", kb.global_importance[i]}});
  }
  return {{"features", std::move(entries)}};
}

}  // namespace riskx::narrate
