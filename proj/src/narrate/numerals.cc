#include "riskx/narrate/numerals.h"

#include <cctype>
#include <charconv>
#include <string>

namespace riskx::narrate {
namespace {

bool IsDigit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::vector<double> ExtractNumerals(std::string_view text) {
  std::vector<double> numerals;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!IsDigit(text[i])) {
      ++i;
      continue;
    }
    std::string token;
    while (i < text.size() && IsDigit(text[i])) token += text[i++];
    if (i + 1 < text.size() && (text[i] == '.' || text[i] == ',') &&
        IsDigit(text[i + 1])) {
      token += '.';
      ++i;
      while (i < text.size() && IsDigit(text[i])) token += text[i++];
    }
    double value = 0.0;
    std::from_chars(token.data(), token.data() + token.size(), value);
    numerals.push_back(value);
  }
  return numerals;
}

}  // namespace riskx::narrate
