#pragma once

#include <string>

namespace riskx {

// Shortest decimal text that parses back to exactly `value`.
std::string FormatShortest(double value);

// Fixed-point text with one decimal place ("17.0"). Rounds half away from
// zero on the decimal representation of `value`.
std::string FormatOneDecimal(double value);

// The value FormatOneDecimal() displays, as a double.
double RoundOneDecimal(double value);

}  // namespace riskx
