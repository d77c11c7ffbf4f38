#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskx/narrate/completion_client.h"
#include "riskx/narrate/knowledge_base.h"
#include "riskx/narrate/lexicon.h"
#include "riskx/narrate/narrative_card.h"
#include "riskx/narrate/prompt.h"

namespace riskx::narrate {

enum class NarrativeMode { kTemplate, kLlm, kFallback };

// "TEMPLATE", "LLM", "FALLBACK".
std::string_view NarrativeModeName(NarrativeMode mode);
// Accepts "template" or "llm" in any case.
std::optional<NarrativeMode> ParseNarrativeMode(std::string_view text);

struct NarrativeResult {
  std::vector<NarrativeCard> cards;
  NarrativeMode mode_used = NarrativeMode::kTemplate;
  int llm_attempts = 0;
  std::vector<std::string> failures;  // One entry per rejected attempt.
};

// NARRATE_MODE, NARRATE_BASE_URL, NARRATE_API_KEY, NARRATE_MODEL and
// NARRATE_LEXICON from the environment.
struct NarrateConfig {
  NarrativeMode default_mode = NarrativeMode::kTemplate;
  CompletionConfig completion;
  std::string lexicon_path;
};
NarrateConfig NarrateConfigFromEnv();

// Produces cards that always pass ValidateNarrative. LLM output is attempted
// twice; after that, or without a client, grounded template cards are
// returned with mode FALLBACK. Thread-safe: Generate() touches no mutable
// state apart from what the client does per call.
class NarrativeGenerator {
 public:
  // `client` may be null, in which case LLM requests fall back at once.
  NarrativeGenerator(KnowledgeBase kb, std::vector<FewShotExample> few_shots,
                     std::shared_ptr<CompletionClient> client,
                     DirectionLexicon lexicon = DefaultLexicon());

  NarrativeResult Generate(NarrativeMode mode,
                           const explain::ExplanationView& view,
                           const model::PatientRecord& record) const;

  const KnowledgeBase& knowledge_base() const { return kb_; }

  static constexpr int kMaxLlmAttempts = 2;

 private:
  KnowledgeBase kb_;
  std::vector<FewShotExample> few_shots_;
  std::shared_ptr<CompletionClient> client_;
  DirectionLexicon lexicon_;
};

}  // namespace riskx::narrate
