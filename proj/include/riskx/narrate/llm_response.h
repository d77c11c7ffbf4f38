#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "riskx/explain/explanation_view.h"

namespace riskx::narrate {

// JSON schema the completion must follow. Embedded in the system prompt and
// published as docs/schemas/narrative_cards.schema.json.
extern const std::string_view kNarrativeCardsSchema;

// One card as written by the language model, before grounding checks.
struct CandidateCard {
  std::string feature_id;
  explain::Direction direction = explain::Direction::kNeutral;
  double contribution_percent = 0.0;
  std::vector<std::string> sentences;
};

// Removes a surrounding markdown code fence (``` or ```json), if any.
std::string StripCodeFence(std::string_view text);

// Strict parse against kNarrativeCardsSchema: unknown or missing keys, wrong
// types and unknown directions all fail, and nothing is salvaged from a
// partly valid document. Throws kMalformedDocument whose field path names the
// offending element, or "@<byte>" (1-based position of the last byte read)
// for a JSON syntax error.
std::vector<CandidateCard> ParseLlmResponse(std::string_view text);

}  // namespace riskx::narrate
