#include "riskx/narrate/validator.h"

#include <algorithm>

#include "riskx/common/error.h"
#include "riskx/common/numeric_format.h"
#include "riskx/narrate/numerals.h"

namespace riskx::narrate {
namespace {

void AddReason(CardVerdict& verdict, Reason reason, std::string detail) {
  verdict.passed = false;
  if (!verdict.Has(reason)) {
    verdict.reasons.push_back(reason);
    std::sort(verdict.reasons.begin(), verdict.reasons.end());
  }
  verdict.details.push_back(std::move(detail));
}

bool NumeralGrounded(double numeral, double value, double percent,
                     double importance, const KnowledgeEntry& entry) {
  if (numeral == value) return true;
  if (RoundOneDecimal(numeral) == RoundOneDecimal(percent)) return true;
  if (RoundOneDecimal(numeral) == RoundOneDecimal(importance)) return true;
  return std::find(entry.reference_numbers.begin(),
                   entry.reference_numbers.end(),
                   numeral) != entry.reference_numbers.end();
}

void CheckCard(const NarrativeCard& card, const explain::FactorView& factor,
               double value, double importance, const KnowledgeEntry& entry,
               const DirectionLexicon& lexicon, CardVerdict& verdict) {
  const std::size_t count = CountSentences(card.sentences);
  if (count < 2 || count > 3) {
    AddReason(verdict, Reason::kSentenceCount,
              std::to_string(count) + " sentences");
  }

  if (card.direction != factor.direction) {
    AddReason(verdict, Reason::kDirectionMismatch,
              "card direction " +
                  std::string(explain::DirectionName(card.direction)) +
                  ", expected " +
                  std::string(explain::DirectionName(factor.direction)));
  }
  std::vector<std::string> first;
  if (!card.sentences.empty()) first = SplitSentences(card.sentences.front());
  const std::string opening = first.empty() ? "" : first.front();
  if (!ClaimsAgree(ClaimsIn(opening, lexicon), factor.direction)) {
    AddReason(verdict, Reason::kDirectionMismatch,
              "first sentence does not state " +
                  std::string(explain::DirectionName(factor.direction)));
  }

  const double expected_percent = RoundOneDecimal(factor.percent);
  if (card.contribution_percent != expected_percent) {
    AddReason(verdict, Reason::kValueMismatch,
              "contribution " + FormatShortest(card.contribution_percent) +
                  ", expected " + FormatOneDecimal(expected_percent));
  }
  if (card.user_value != value) {
    AddReason(verdict, Reason::kValueMismatch,
              "user value " + FormatShortest(card.user_value) + ", expected " +
                  FormatShortest(value));
  }
  for (const std::string& sentence : card.sentences) {
    for (double numeral : ExtractNumerals(sentence)) {
      if (!NumeralGrounded(numeral, value, factor.percent, importance,
                           entry)) {
        AddReason(verdict, Reason::kValueMismatch,
                  "ungrounded numeral " + FormatShortest(numeral));
      }
    }
  }
}

}  // namespace

std::string_view ReasonName(Reason reason) {
  switch (reason) {
    case Reason::kDirectionMismatch:
      return "DIRECTION_MISMATCH";
    case Reason::kValueMismatch:
      return "VALUE_MISMATCH";
    case Reason::kMissingFeature:
      return "MISSING_FEATURE";
    case Reason::kSentenceCount:
      return "SENTENCE_COUNT";
    case Reason::kSchemaError:
      return "SCHEMA_ERROR";
  }
  return "UNKNOWN";
}

bool CardVerdict::Has(Reason reason) const {
  return std::find(reasons.begin(), reasons.end(), reason) != reasons.end();
}

bool ValidationReport::AllPassed() const {
  return unexpected_features.empty() &&
         std::all_of(verdicts.begin(), verdicts.end(),
                     [](const CardVerdict& v) { return v.passed; });
}

const CardVerdict* ValidationReport::Find(std::string_view feature_id) const {
  for (const CardVerdict& verdict : verdicts) {
    if (verdict.feature_id == feature_id) return &verdict;
  }
  return nullptr;
}

ValidationReport ValidateNarrative(const std::vector<NarrativeCard>& cards,
                                   const explain::ExplanationView& view,
                                   const model::PatientRecord& record,
                                   const KnowledgeBase& kb,
                                   const DirectionLexicon& lexicon) {
  CheckNarrativeInputs(view, record, kb);
  ValidationReport report;
  for (std::size_t i = 0; i < view.factors.size(); ++i) {
    const explain::FactorView& factor = view.factors[i];
    CardVerdict verdict;
    verdict.feature_id = factor.id;
    std::vector<const NarrativeCard*> matches;
    for (const NarrativeCard& card : cards) {
      if (card.feature_id == factor.id) matches.push_back(&card);
    }
    if (matches.empty()) {
      AddReason(verdict, Reason::kMissingFeature, "no card");
    } else if (matches.size() > 1) {
      AddReason(verdict, Reason::kSchemaError,
                std::to_string(matches.size()) + " cards for one factor");
    } else {
      CheckCard(*matches.front(), factor, record.values[i],
                kb.global_importance[i], kb.entries[i], lexicon, verdict);
    }
    report.verdicts.push_back(std::move(verdict));
  }
  for (const NarrativeCard& card : cards) {
    const bool known = std::any_of(
        view.factors.begin(), view.factors.end(),
        [&](const explain::FactorView& f) { return f.id == card.feature_id; });
    if (!known) report.unexpected_features.push_back(card.feature_id);
  }
  return report;
}

std::vector<NarrativeCard> AssembleCards(
    const std::vector<CandidateCard>& candidates,
    const explain::ExplanationView& view, const model::PatientRecord& record,
    const KnowledgeBase& kb) {
  std::vector<NarrativeCard> cards;
  for (const CandidateCard& candidate : candidates) {
    NarrativeCard card;
    card.feature_id = candidate.feature_id;
    card.direction = candidate.direction;
    card.contribution_percent = candidate.contribution_percent;
    card.sentences = candidate.sentences;
    for (const explain::FactorView& factor : view.factors) {
      if (factor.id == card.feature_id) card.abbreviation = factor.abbreviation;
    }
    FillCardFacts(record, kb, card);
    cards.push_back(std::move(card));
  }
  return cards;
}

ValidationReport ValidateLlmResponse(std::string_view text,
                                     const explain::ExplanationView& view,
                                     const model::PatientRecord& record,
                                     const KnowledgeBase& kb,
                                     const DirectionLexicon& lexicon) {
  std::vector<CandidateCard> candidates;
  try {
    candidates = ParseLlmResponse(text);
  } catch (const Error& e) {
    CheckNarrativeInputs(view, record, kb);
    ValidationReport report;
    for (const explain::FactorView& factor : view.factors) {
      CardVerdict verdict;
      verdict.feature_id = factor.id;
      AddReason(verdict, Reason::kSchemaError,
                std::string(e.what()) + " at " + e.field_path());
      report.verdicts.push_back(std::move(verdict));
    }
    return report;
  }
  return ValidateNarrative(AssembleCards(candidates, view, record, kb), view,
                           record, kb, lexicon);
}

nlohmann::json ReportToJson(const ValidationReport& report) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (const CardVerdict& verdict : report.verdicts) {
    nlohmann::json reasons = nlohmann::json::array();
    for (Reason reason : verdict.reasons) reasons.push_back(ReasonName(reason));
    verdicts.push_back({{"feature_id", verdict.feature_id},
                        {"passed", verdict.passed},
                        {"reasons", std::move(reasons)},
                        {"details", verdict.details}});
  }
  return {{"passed", report.AllPassed()},
          {"verdicts", std::move(verdicts)},
          {"unexpected_features", report.unexpected_features}};
}

}  // namespace riskx::narrate
