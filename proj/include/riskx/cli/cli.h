#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace riskx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDataError = 2;

// Runs one subcommand: train, validate-model, explain, simulate or serve.
// `args` excludes the program name. Results go to `out` (or the -o file);
// failures are reported on `err` as one JSON object
// {"error": "<Code>", "message": ..., "field_path": ...}.
// Returns 0 on success, 1 for usage errors and 2 for data or model errors.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace riskx::cli
