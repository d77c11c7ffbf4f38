#include "riskx/narrate/generator.h"

#include <cstdlib>
#include <iostream>

#include "riskx/common/error.h"
#include "riskx/narrate/validator.h"

namespace riskx::narrate {
namespace {

std::string Env(const char* name) {
  const char* value = std::getenv(name);
  return value ? value : "";
}

std::string Lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string Summarize(const ValidationReport& report) {
  std::string summary;
  for (const CardVerdict& verdict : report.verdicts) {
    for (Reason reason : verdict.reasons) {
      if (!summary.empty()) summary += ", ";
      summary += verdict.feature_id + ":" + std::string(ReasonName(reason));
    }
  }
  for (const std::string& id : report.unexpected_features) {
    if (!summary.empty()) summary += ", ";
    summary += id + ":UNEXPECTED";
  }
  return summary;
}

}  // namespace

std::string_view NarrativeModeName(NarrativeMode mode) {
  switch (mode) {
    case NarrativeMode::kTemplate:
      return "TEMPLATE";
    case NarrativeMode::kLlm:
      return "LLM";
    case NarrativeMode::kFallback:
      return "FALLBACK";
  }
  return "TEMPLATE";
}

std::optional<NarrativeMode> ParseNarrativeMode(std::string_view text) {
  const std::string lowered = Lower(text);
  if (lowered == "template") return NarrativeMode::kTemplate;
  if (lowered == "llm") return NarrativeMode::kLlm;
  return std::nullopt;
}

NarrateConfig NarrateConfigFromEnv() {
  NarrateConfig config;
  if (auto mode = ParseNarrativeMode(Env("NARRATE_MODE"))) {
    config.default_mode = *mode;
  }
  config.completion.base_url = Env("NARRATE_BASE_URL");
  config.completion.api_key = Env("NARRATE_API_KEY");
  if (const std::string model = Env("NARRATE_MODEL"); !model.empty()) {
    config.completion.model = model;
  }
  config.lexicon_path = Env("NARRATE_LEXICON");
  return config;
}

NarrativeGenerator::NarrativeGenerator(KnowledgeBase kb,
                                       std::vector<FewShotExample> few_shots,
                                       std::shared_ptr<CompletionClient> client,
                                       DirectionLexicon lexicon)
    : kb_(std::move(kb)),
      few_shots_(std::move(few_shots)),
      client_(std::move(client)),
      lexicon_(std::move(lexicon)) {}

NarrativeResult NarrativeGenerator::Generate(
    NarrativeMode mode, const explain::ExplanationView& view,
    const model::PatientRecord& record) const {
  NarrativeResult result;
  if (mode != NarrativeMode::kLlm) {
    result.cards = RenderTemplateNarrative(view, record, kb_);
    return result;
  }

  if (!client_) {
    result.failures.push_back("no completion endpoint configured");
  } else {
    const PromptDocument prompt = BuildLlmPrompt(view, record, kb_, few_shots_);
    for (int attempt = 0; attempt < kMaxLlmAttempts; ++attempt) {
      ++result.llm_attempts;
      try {
        const std::string text = client_->Complete(prompt);
        std::vector<NarrativeCard> cards =
            AssembleCards(ParseLlmResponse(text), view, record, kb_);
        const ValidationReport report =
            ValidateNarrative(cards, view, record, kb_, lexicon_);
        if (report.AllPassed()) {
          // Present cards in schema order whatever order the model used.
          std::vector<NarrativeCard> ordered;
          for (const explain::FactorView& factor : view.factors) {
            for (NarrativeCard& card : cards) {
              if (card.feature_id == factor.id) ordered.push_back(std::move(card));
            }
          }
          result.cards = std::move(ordered);
          result.mode_used = NarrativeMode::kLlm;
          return result;
        }
        result.failures.push_back("rejected: " + Summarize(report));
      } catch (const Error& e) {
        result.failures.push_back(std::string(ErrorCodeName(e.code())) + ": " +
                                  e.what());
      } catch (const std::exception& e) {
        result.failures.push_back(e.what());
      }
    }
  }

  for (const std::string& failure : result.failures) {
    std::clog << "narrate: falling back to template cards (" << failure
              << ")\n";
  }
  result.cards = RenderTemplateNarrative(view, record, kb_);
  result.mode_used = NarrativeMode::kFallback;
  return result;
}

}  // namespace riskx::narrate
