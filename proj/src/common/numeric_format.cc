#include "riskx/common/numeric_format.h"

#include <array>
#include <charconv>
#include <cmath>

namespace riskx {

std::string FormatShortest(double value) {
  if (value == 0.0) return "0";  // Also folds -0.0.
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(),
                                 value);
  if (ec != std::errc()) return "nan";
  return std::string(buffer.data(), end);
}

double RoundOneDecimal(double value) {
  // Round the shortest decimal form so that 0.05-style ties written by a
  // user round the way they read, not the way their binary form does.
  const double scaled = std::stod(FormatShortest(value * 10.0));
  double rounded = std::round(scaled) / 10.0;
  if (rounded == 0.0) rounded = 0.0;
  return rounded;
}

std::string FormatOneDecimal(double value) {
  std::array<char, 64> buffer{};
  auto [end, ec] =
      std::to_chars(buffer.data(), buffer.data() + buffer.size(),
                    RoundOneDecimal(value), std::chars_format::fixed, 1);
  if (ec != std::errc()) return "nan";
  return std::string(buffer.data(), end);
}

}  // namespace riskx
