#include "riskx/narrate/lexicon.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "riskx/common/error.h"

namespace riskx::narrate {
namespace {

std::string Lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// Splits on ASCII punctuation and whitespace. Bytes >= 0x80 stay inside
// tokens so UTF-8 letters are never cut.
std::vector<std::string> Tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : Lower(text)) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80 || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
      current += c;
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string> WordList(const nlohmann::json& document,
                                  const char* key) {
  const auto it = document.find(key);
  if (it == document.end() || !it->is_array()) {
    throw Error(ErrorCode::kMalformedDocument,
                std::string("lexicon needs an array \"") + key + "\"",
                std::string("/") + key);
  }
  std::vector<std::string> words;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const nlohmann::json& word = (*it)[i];
    if (!word.is_string() || word.get<std::string>().empty()) {
      throw Error(ErrorCode::kMalformedDocument,
                  "lexicon entries must be non-empty strings",
                  std::string("/") + key + "/" + std::to_string(i));
    }
    words.push_back(Lower(word.get<std::string>()));
  }
  return words;
}

}  // namespace

const DirectionLexicon& DefaultLexicon() {
  static const auto* const kLexicon = new DirectionLexicon{
      {"increase", "increases", "increased", "increasing", "raise", "raises",
       "raised", "raising", "elevate", "elevates", "elevating", "worsen",
       "worsens", "worsening", "meningkatkan", "menaikkan", "menambah",
       "memperbesar", "meningkat", "naik"},
      {"decrease", "decreases", "decreased", "decreasing", "reduce",
       "reduces", "reduced", "reducing", "lowers", "lowering", "menurunkan",
       "mengurangi", "memperkecil", "menurun", "turun"},
      {"no influence", "no effect", "does not affect", "tidak berpengaruh",
       "tidak memengaruhi"},
  };
  return *kLexicon;
}

DirectionLexicon ParseLexicon(const nlohmann::json& document) {
  if (!document.is_object()) {
    throw Error(ErrorCode::kMalformedDocument, "lexicon must be an object");
  }
  for (const auto& [key, value] : document.items()) {
    if (key != "increase" && key != "decrease" && key != "neutral") {
      throw Error(ErrorCode::kMalformedDocument,
                  "unexpected lexicon key \"" + key + "\"", "/" + key);
    }
  }
  return {WordList(document, "increase"), WordList(document, "decrease"),
          WordList(document, "neutral")};
}

DirectionLexicon LoadLexiconFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json document =
      nlohmann::json::parse(buffer.str(), nullptr, /*allow_exceptions=*/false);
  if (document.is_discarded()) {
    throw Error(ErrorCode::kMalformedDocument, path + " is not valid JSON");
  }
  return ParseLexicon(document);
}

DirectionClaims ClaimsIn(std::string_view sentence,
                         const DirectionLexicon& lexicon) {
  DirectionClaims claims;
  const std::vector<std::string> tokens = Tokens(sentence);
  auto any_of = [&](const std::vector<std::string>& words) {
    return std::any_of(tokens.begin(), tokens.end(), [&](const std::string& t) {
      return std::find(words.begin(), words.end(), t) != words.end();
    });
  };
  claims.increase = any_of(lexicon.increase);
  claims.decrease = any_of(lexicon.decrease);
  const std::string lowered = Lower(sentence);
  claims.neutral = std::any_of(
      lexicon.neutral.begin(), lexicon.neutral.end(),
      [&](const std::string& phrase) {
        return lowered.find(phrase) != std::string::npos;
      });
  return claims;
}

bool ClaimsAgree(const DirectionClaims& claims, explain::Direction expected) {
  switch (expected) {
    case explain::Direction::kIncreases:
      return claims.increase && !claims.decrease;
    case explain::Direction::kDecreases:
      return claims.decrease && !claims.increase;
    case explain::Direction::kNeutral:
      return !claims.increase && !claims.decrease;
  }
  return false;
}

}  // namespace riskx::narrate
