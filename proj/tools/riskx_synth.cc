// Writes a labeled synthetic cohort as CSV for demos and tests.
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "riskx/common/error.h"
#include "riskx/model/dataset.h"
#include "riskx/model/synthetic.h"

int main(int argc, char** argv) {
  std::size_t rows = 1000;
  std::uint64_t seed = 0;
  std::string output;
  bool unlabeled = false;
  CLI::App app{"Synthetic diabetes cohort generator", "riskx-synth"};
  app.add_option("-n,--rows", rows)->check(CLI::Range(1, 10000000))
      ->capture_default_str();
  app.add_option("--seed", seed)->required();
  app.add_option("-o,--output", output, "CSV file (default: stdout)");
  app.add_flag("--unlabeled", unlabeled, "Omit the label column");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  riskx::model::Dataset data = riskx::model::MakeSyntheticCohort(rows, seed);
  if (unlabeled) data.labels.clear();
  const std::string csv =
      riskx::model::DatasetToCsv(data, riskx::model::DefaultSchema());
  if (output.empty()) {
    std::cout << csv;
    return 0;
  }
  std::ofstream file(output, std::ios::binary | std::ios::trunc);
  file << csv;
  file.close();
  if (!file) {
    std::cerr << "{\"error\":\"IoError\",\"message\":\"cannot write " << output
              << "\"}\n";
    return 2;
  }
  return 0;
}
