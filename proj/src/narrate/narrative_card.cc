#include "riskx/narrate/narrative_card.h"

#include "riskx/common/error.h"
#include "riskx/common/numeric_format.h"

namespace riskx::narrate {
namespace {

bool IsSpace(char c) {
  return c == ' ' || c == '\n' || c == '\t' || c == '\r';
}

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

std::string Trim(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && IsSpace(text[begin])) ++begin;
  while (end > begin && IsSpace(text[end - 1])) --end;
  return std::string(text.substr(begin, end - begin));
}

std::string ImpactVerb(explain::Direction direction) {
  return direction == explain::Direction::kIncreases ? "increases"
                                                     : "decreases";
}

std::string FirstSentence(const KnowledgeEntry& entry, double value,
                          const explain::FactorView& factor,
                          const std::string& percent_text) {
  std::string subject;
  if (entry.binary && entry.binary_phrases.size() == 2 &&
      (value == 0.0 || value == 1.0)) {
    subject = entry.binary_phrases[static_cast<std::size_t>(value)];
  } else {
    const std::string category = entry.CategoryFor(value);
    subject = "Your " + (category.empty() ? "" : category + " ") + entry.noun +
              " of " + entry.ValueText(value);
  }
  if (factor.direction == explain::Direction::kNeutral) {
    return subject + " currently has no influence on your diabetes risk (" +
           percent_text + " of the total risk influence).";
  }
  return subject + " " + ImpactVerb(factor.direction) +
         " your diabetes risk, accounting for " + percent_text +
         " of the total risk influence.";
}

std::string IdealSentence(const KnowledgeEntry& entry) {
  const std::string& ideal = entry.ideal_range_text;
  std::string text = "The ideal " + entry.noun;
  if (IsDigit(ideal.front())) text += " range";
  text += " is " + ideal;
  if (IsDigit(ideal.back()) && !entry.unit.empty()) text += " " + entry.unit;
  return text + ".";
}

}  // namespace

std::vector<std::string> SplitSentences(std::string_view text) {
  std::vector<std::string> sentences;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 < text.size() && !IsSpace(text[i + 1])) continue;
    std::string sentence = Trim(text.substr(start, i + 1 - start));
    if (!sentence.empty()) sentences.push_back(std::move(sentence));
    start = i + 1;
  }
  std::string tail = Trim(text.substr(start));
  if (!tail.empty()) sentences.push_back(std::move(tail));
  return sentences;
}

void CheckNarrativeInputs(const explain::ExplanationView& view,
                          const model::PatientRecord& record,
                          const KnowledgeBase& kb) {
  if (view.factors.size() != record.values.size() ||
      view.factors.size() != kb.entries.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "explanation, record and knowledge base differ in width");
  }
  for (std::size_t i = 0; i < view.factors.size(); ++i) {
    if (view.factors[i].id != kb.entries[i].id) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "feature order differs at " + view.factors[i].id,
                  "/" + view.factors[i].id);
    }
  }
}

std::size_t CountSentences(const std::vector<std::string>& sentences) {
  std::size_t count = 0;
  for (const std::string& s : sentences) count += SplitSentences(s).size();
  return count;
}

void FillCardFacts(const model::PatientRecord& record, const KnowledgeBase& kb,
                   NarrativeCard& card) {
  for (std::size_t i = 0; i < kb.entries.size(); ++i) {
    const KnowledgeEntry& entry = kb.entries[i];
    if (entry.id != card.feature_id || i >= record.values.size()) continue;
    const double value = record.values[i];
    card.label = entry.label;
    card.user_value = value;
    card.user_value_text = entry.ValueText(value);
    card.unit = entry.unit;
    card.ideal_range = entry.ideal_range_text;
    card.category = entry.CategoryFor(value);
    card.controllable = entry.controllable;
    card.contribution_text = FormatOneDecimal(card.contribution_percent) + "%";
    return;
  }
}

std::vector<NarrativeCard> RenderTemplateNarrative(
    const explain::ExplanationView& view, const model::PatientRecord& record,
    const KnowledgeBase& kb) {
  CheckNarrativeInputs(view, record, kb);
  std::vector<NarrativeCard> cards;
  cards.reserve(view.factors.size());
  for (std::size_t i = 0; i < view.factors.size(); ++i) {
    const explain::FactorView& factor = view.factors[i];
    const KnowledgeEntry& entry = kb.entries[i];
    NarrativeCard card;
    card.feature_id = factor.id;
    card.abbreviation = factor.abbreviation;
    card.direction = factor.direction;
    card.contribution_percent = RoundOneDecimal(factor.percent);
    FillCardFacts(record, kb, card);
    card.sentences.push_back(FirstSentence(entry, record.values[i], factor,
                                           card.contribution_text));
    card.sentences.push_back(entry.definition);
    if (!entry.ideal_range_text.empty()) {
      card.sentences.push_back(IdealSentence(entry));
    }
    cards.push_back(std::move(card));
  }
  return cards;
}

nlohmann::json CardToJson(const NarrativeCard& card) {
  return {{"feature_id", card.feature_id},
          {"label", card.label},
          {"abbr", card.abbreviation},
          {"direction", explain::DirectionName(card.direction)},
          {"contribution_percent", card.contribution_percent},
          {"contribution_text", card.contribution_text},
          {"sentences", card.sentences},
          {"user_value", card.user_value},
          {"user_value_text", card.user_value_text},
          {"unit", card.unit},
          {"ideal_range", card.ideal_range},
          {"category", card.category},
          {"controllable", card.controllable}};
}

nlohmann::json CardsToJson(const std::vector<NarrativeCard>& cards) {
  nlohmann::json out = nlohmann::json::array();
  for (const NarrativeCard& card : cards) out.push_back(CardToJson(card));
  return out;
}

}  // namespace riskx::narrate
