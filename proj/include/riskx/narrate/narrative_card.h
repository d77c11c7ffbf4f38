#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include "riskx/explain/explanation_view.h"
#include "riskx/model/feature_schema.h"
#include "riskx/narrate/knowledge_base.h"

namespace riskx::narrate {

// One factor's explanation as shown to the user: what it does to their risk,
// what the factor is, and where it should ideally be.
struct NarrativeCard {
  std::string feature_id;
  std::string label;
  std::string abbreviation;
  explain::Direction direction = explain::Direction::kNeutral;
  double contribution_percent = 0.0;  // One decimal.
  std::string contribution_text;      // "17.0%".
  std::vector<std::string> sentences;
  double user_value = 0.0;
  std::string user_value_text;  // "24.7 kg/m²".
  std::string unit;
  std::string ideal_range;  // Empty when the factor has none.
  std::string category;     // "overweight", empty when not banded.
  bool controllable = false;

  bool operator==(const NarrativeCard&) const = default;
};

// Sentences in `text`: a run ending in '.', '!' or '?' followed by whitespace
// or the end of the text. A period between digits does not end a sentence.
std::vector<std::string> SplitSentences(std::string_view text);

// Total sentence count across every entry of `sentences`.
std::size_t CountSentences(const std::vector<std::string>& sentences);

// Throws kSchemaMismatch unless the view, record and knowledge base list the
// same features in the same order.
void CheckNarrativeInputs(const explain::ExplanationView& view,
                          const model::PatientRecord& record,
                          const KnowledgeBase& kb);

// Deterministic grounded cards, one per feature in schema order. Throws
// kSchemaMismatch when the view, record and knowledge base disagree on the
// feature list.
std::vector<NarrativeCard> RenderTemplateNarrative(
    const explain::ExplanationView& view, const model::PatientRecord& record,
    const KnowledgeBase& kb);

// Fills the display fields of a card from the record and knowledge base,
// keeping the text-bearing fields the caller already set. Unknown feature
// ids are left untouched.
void FillCardFacts(const model::PatientRecord& record, const KnowledgeBase& kb,
                   NarrativeCard& card);

nlohmann::json CardToJson(const NarrativeCard& card);
nlohmann::json CardsToJson(const std::vector<NarrativeCard>& cards);

}  // namespace riskx::narrate
