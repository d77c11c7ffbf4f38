#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include "riskx/explain/explanation_view.h"

namespace riskx::narrate {

// Keyword lists used to read the direction a sentence claims. Single words
// are matched against whole lowercase tokens; neutral entries are phrases
// matched as substrings.
struct DirectionLexicon {
  std::vector<std::string> increase;
  std::vector<std::string> decrease;
  std::vector<std::string> neutral;
};

// Which directions a sentence mentions.
struct DirectionClaims {
  bool increase = false;
  bool decrease = false;
  bool neutral = false;
};

// English and Indonesian defaults; identical to data/direction_lexicon.json.
const DirectionLexicon& DefaultLexicon();

// {"increase": [...], "decrease": [...], "neutral": [...]}. Throws
// kMalformedDocument on any other shape.
DirectionLexicon ParseLexicon(const nlohmann::json& document);
DirectionLexicon LoadLexiconFile(const std::string& path);

DirectionClaims ClaimsIn(std::string_view sentence,
                         const DirectionLexicon& lexicon);

// True when `claims` state `expected` and nothing contradicting it. A neutral
// factor must not be described as increasing or decreasing.
bool ClaimsAgree(const DirectionClaims& claims, explain::Direction expected);

}  // namespace riskx::narrate
