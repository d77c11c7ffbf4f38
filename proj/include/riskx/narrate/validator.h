#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include "riskx/explain/explanation_view.h"
#include "riskx/model/feature_schema.h"
#include "riskx/narrate/knowledge_base.h"
#include "riskx/narrate/lexicon.h"
#include "riskx/narrate/llm_response.h"
#include "riskx/narrate/narrative_card.h"

namespace riskx::narrate {

enum class Reason {
  kDirectionMismatch,
  kValueMismatch,
  kMissingFeature,
  kSentenceCount,
  kSchemaError,
};

// "DIRECTION_MISMATCH", ...
std::string_view ReasonName(Reason reason);

struct CardVerdict {
  std::string feature_id;
  bool passed = true;
  std::vector<Reason> reasons;  // Each reason at most once, in enum order.
  std::vector<std::string> details;

  bool Has(Reason reason) const;
};

// One verdict per expected feature, in schema order.
struct ValidationReport {
  std::vector<CardVerdict> verdicts;
  // Cards naming a feature the explanation does not have.
  std::vector<std::string> unexpected_features;

  bool AllPassed() const;
  const CardVerdict* Find(std::string_view feature_id) const;
};

// Checks that every card agrees with the data it describes:
//   DIRECTION_MISMATCH  the card's direction or the wording of its first
//                       sentence disagrees with the attribution's sign;
//   VALUE_MISMATCH      a numeral is neither the record value, the
//                       one-decimal percentage, nor a knowledge-base number
//                       for that factor, or the card's own fields disagree;
//   SENTENCE_COUNT      fewer than 2 or more than 3 sentences;
//   MISSING_FEATURE     no card for a factor;
//   SCHEMA_ERROR        more than one card for a factor.
// Throws kSchemaMismatch only when view, record and kb disagree with each
// other; card content problems are always reported, never thrown.
ValidationReport ValidateNarrative(
    const std::vector<NarrativeCard>& cards,
    const explain::ExplanationView& view, const model::PatientRecord& record,
    const KnowledgeBase& kb, const DirectionLexicon& lexicon = DefaultLexicon());

// Turns model output into full cards; values and ideal ranges come from the
// record and knowledge base, never from the model.
std::vector<NarrativeCard> AssembleCards(
    const std::vector<CandidateCard>& candidates,
    const explain::ExplanationView& view, const model::PatientRecord& record,
    const KnowledgeBase& kb);

// Parse, assemble and validate raw completion text in one step. A document
// that fails to parse yields SCHEMA_ERROR for every feature.
ValidationReport ValidateLlmResponse(
    std::string_view text, const explain::ExplanationView& view,
    const model::PatientRecord& record, const KnowledgeBase& kb,
    const DirectionLexicon& lexicon = DefaultLexicon());

nlohmann::json ReportToJson(const ValidationReport& report);

}  // namespace riskx::narrate
