#include "riskx/narrate/prompt.h"

#include <sstream>

#include "riskx/common/error.h"
#include "riskx/common/numeric_format.h"
#include "riskx/narrate/llm_response.h"
#include "riskx/narrate/narrative_card.h"

namespace riskx::narrate {
namespace {

std::string Cell(std::string text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out.empty() ? "-" : out;
}

std::string CardsDocument(const std::vector<NarrativeCard>& cards) {
  nlohmann::json out = nlohmann::json::array();
  for (const NarrativeCard& card : cards) {
    out.push_back({{"feature_id", card.feature_id},
                   {"direction", explain::DirectionName(card.direction)},
                   {"contribution_percent", card.contribution_percent},
                   {"sentences", card.sentences}});
  }
  return nlohmann::json{{"cards", std::move(out)}}.dump(2);
}

// Fixed reference patient for the default schema; the attribution gives BMI
// a 17% share.
constexpr double kReferencePatient[] = {52, 1, 24.7, 104, 131, 1, 60, 1};
constexpr double kReferenceShap[] = {0.12,  0.03, 0.17, 0.15,
                                     0.08, 0.30, 0.10, -0.05};

}  // namespace

std::string RenderPatientTable(const explain::ExplanationView& view,
                               const model::PatientRecord& record,
                               const KnowledgeBase& kb) {
  CheckNarrativeInputs(view, record, kb);
  std::ostringstream out;
  out << "| Factor | feature_id | Your value | Unit | Category | SHAP | "
         "Direction | Contribution (%) | Rank |\n"
      << "|---|---|---|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < view.factors.size(); ++i) {
    const explain::FactorView& f = view.factors[i];
    const KnowledgeEntry& e = kb.entries[i];
    const double value = record.values[i];
    std::string value_text = FormatShortest(value);
    if (e.binary_values.size() == 2 && (value == 0.0 || value == 1.0)) {
      value_text += " (" + e.binary_values[static_cast<std::size_t>(value)] + ")";
    }
    out << "| " << Cell(e.label) << " | " << f.id << " | " << value_text
        << " | " << Cell(e.unit) << " | " << Cell(e.CategoryFor(value))
        << " | " << FormatShortest(f.shap) << " | "
        << explain::DirectionName(f.direction) << " | "
        << FormatOneDecimal(f.percent) << " | " << f.rank << " |\n";
  }
  return out.str();
}

FewShotExample MakeFewShot(const explain::ExplanationView& view,
                           const model::PatientRecord& record,
                           const KnowledgeBase& kb) {
  return {RenderPatientTable(view, record, kb),
          CardsDocument(RenderTemplateNarrative(view, record, kb))};
}

std::vector<FewShotExample> DefaultFewShots(const model::FeatureSchema& schema,
                                            const KnowledgeBase& kb) {
  const std::size_t n = schema.size();
  model::PatientRecord record;
  explain::Attribution attribution;
  attribution.base_value = -0.6;
  const bool reference = schema.version() == model::DefaultSchema().version() &&
                         n == std::size(kReferencePatient);
  for (std::size_t i = 0; i < n; ++i) {
    const model::FeatureSpec& spec = schema[i];
    if (reference) {
      record.values.push_back(kReferencePatient[i]);
      attribution.shap_values.push_back(kReferenceShap[i]);
      continue;
    }
    record.values.push_back(spec.kind == model::FeatureKind::kBinary
                                ? 1.0
                                : (spec.min + spec.max) / 2.0);
    const double magnitude = 0.1 * static_cast<double>(n - i);
    attribution.shap_values.push_back(i % 2 == 0 ? magnitude : -magnitude);
  }
  return {MakeFewShot(explain::ToPercentages(attribution, schema), record, kb)};
}

PromptDocument BuildLlmPrompt(const explain::ExplanationView& view,
                              const model::PatientRecord& record,
                              const KnowledgeBase& kb,
                              const std::vector<FewShotExample>& few_shots) {
  if (kb.entries.empty()) {
    throw Error(ErrorCode::kEmptyKnowledgeBase, "knowledge base is empty");
  }
  if (few_shots.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "at least one few-shot example is required");
  }

  std::ostringstream system;
  system
      << "# Role\n"
      << "You are a Medical AI Explainer. You explain a diabetes risk "
         "estimate to a patient in plain, calm language.\n\n"
      << "# Task\n"
      << "For every factor in the patient table, write one card of two or "
         "three short sentences. The first sentence describes the personal "
         "impact: whether the factor increases or decreases this patient's "
         "risk, with its contribution percentage. The second sentence gives "
         "the general context from the knowledge base. A third sentence may "
         "state the ideal range.\n\n"
      << "# Rules\n"
      << "1. Write exactly one card per factor, using its feature_id.\n"
      << "2. Use the word \"increases\" or \"decreases\" in the first "
         "sentence to match the Direction column. For NEUTRAL factors say "
         "the factor currently has no influence.\n"
      << "3. Quote numbers only from the patient table or the knowledge base. "
         "Never compute new numbers.\n"
      << "4. contribution_percent is the table's Contribution (%) value with "
         "one decimal.\n"
      << "5. Reply with JSON only, following the output schema.\n\n"
      << "# Knowledge base\n"
      << "| Factor | feature_id | Unit | Definition | Ideal range | "
         "Global importance (%) |\n"
      << "|---|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < kb.entries.size(); ++i) {
    const KnowledgeEntry& e = kb.entries[i];
    system << "| " << Cell(e.label) << " | " << e.id << " | " << Cell(e.unit)
           << " | " << Cell(e.definition) << " | " << Cell(e.ideal_range_text)
           << " | " << FormatOneDecimal(kb.global_importance[i]) << " |\n";
  }
  system << "\n# Output schema\n```json\n"
         << kNarrativeCardsSchema << "\n```\n\n# Examples\n";
  for (std::size_t i = 0; i < few_shots.size(); ++i) {
    system << "\n## Example " << i + 1 << "\n### Patient\n"
           << few_shots[i].user_text << "\n### Answer\n```json\n"
           << few_shots[i].response_text << "\n```\n";
  }

  PromptDocument prompt;
  prompt.system_text = system.str();
  prompt.user_text = "# Patient\n" + RenderPatientTable(view, record, kb);
  return prompt;
}

}  // namespace riskx::narrate
