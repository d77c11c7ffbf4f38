#include "riskx/narrate/llm_response.h"

#include <set>

#include <nlohmann/json.hpp>
#include "riskx/common/error.h"

namespace riskx::narrate {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& message, const std::string& path) {
  throw Error(ErrorCode::kMalformedDocument, message, path);
}

void RequireExactKeys(const json& object, const std::set<std::string>& keys,
                      const std::string& path) {
  if (!object.is_object()) Fail("expected an object", path);
  for (const auto& [key, value] : object.items()) {
    if (!keys.count(key)) Fail("unexpected key \"" + key + "\"", path + "/" + key);
  }
  for (const std::string& key : keys) {
    if (!object.contains(key)) Fail("missing key \"" + key + "\"", path + "/" + key);
  }
}

explain::Direction ParseDirection(const json& value, const std::string& path) {
  if (value.is_string()) {
    const std::string name = value.get<std::string>();
    if (name == "INCREASES") return explain::Direction::kIncreases;
    if (name == "DECREASES") return explain::Direction::kDecreases;
    if (name == "NEUTRAL") return explain::Direction::kNeutral;
  }
  Fail("direction must be INCREASES, DECREASES or NEUTRAL", path);
}

CandidateCard ParseCard(const json& object, const std::string& path) {
  RequireExactKeys(object,
                   {"feature_id", "direction", "contribution_percent",
                    "sentences"},
                   path);
  CandidateCard card;
  const json& id = object["feature_id"];
  if (!id.is_string()) Fail("feature_id must be a string", path + "/feature_id");
  card.feature_id = id.get<std::string>();
  card.direction = ParseDirection(object["direction"], path + "/direction");
  const json& percent = object["contribution_percent"];
  if (!percent.is_number()) {
    Fail("contribution_percent must be a number",
         path + "/contribution_percent");
  }
  card.contribution_percent = percent.get<double>();
  const json& sentences = object["sentences"];
  if (!sentences.is_array() || sentences.empty()) {
    Fail("sentences must be a non-empty array", path + "/sentences");
  }
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (!sentences[i].is_string()) {
      Fail("sentences must be strings",
           path + "/sentences/" + std::to_string(i));
    }
    card.sentences.push_back(sentences[i].get<std::string>());
  }
  return card;
}

}  // namespace

const std::string_view kNarrativeCardsSchema = R"({
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "NarrativeCards",
  "type": "object",
  "additionalProperties": false,
  "required": ["cards"],
  "properties": {
    "cards": {
      "type": "array",
      "items": {
        "type": "object",
        "additionalProperties": false,
        "required": ["feature_id", "direction", "contribution_percent", "sentences"],
        "properties": {
          "feature_id": {"type": "string"},
          "direction": {"enum": ["INCREASES", "DECREASES", "NEUTRAL"]},
          "contribution_percent": {"type": "number"},
          "sentences": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "string"}
          }
        }
      }
    }
  }
})";

std::string StripCodeFence(std::string_view text) {
  auto is_space = [](char c) {
    return c == ' ' || c == '\n' || c == '\t' || c == '\r';
  };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (text.substr(0, 3) != "```") return std::string(text);
  const std::size_t newline = text.find('\n');
  if (newline == std::string_view::npos) return std::string(text);
  text.remove_prefix(newline + 1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (text.size() >= 3 && text.substr(text.size() - 3) == "```") {
    text.remove_suffix(3);
  }
  return std::string(text);
}

std::vector<CandidateCard> ParseLlmResponse(std::string_view text) {
  json document;
  try {
    document = json::parse(StripCodeFence(text));
  } catch (const json::parse_error& e) {
    Fail(std::string("invalid JSON: ") + e.what(), "@" + std::to_string(e.byte));
  }
  RequireExactKeys(document, {"cards"}, "");
  const json& cards = document["cards"];
  if (!cards.is_array()) Fail("cards must be an array", "/cards");
  std::vector<CandidateCard> out;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    out.push_back(ParseCard(cards[i], "/cards/" + std::to_string(i)));
  }
  return out;
}

}  // namespace riskx::narrate
