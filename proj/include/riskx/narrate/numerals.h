#pragma once

#include <string_view>
#include <vector>

namespace riskx::narrate {

// Unsigned decimal numerals in `text`, in order. Accepts "." or "," as the
// decimal separator when a digit follows it ("24.7", "24,7").
std::vector<double> ExtractNumerals(std::string_view text);

}  // namespace riskx::narrate
