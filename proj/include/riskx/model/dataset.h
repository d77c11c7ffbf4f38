#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "riskx/model/feature_schema.h"

namespace riskx::model {

struct Dataset {
  std::vector<PatientRecord> rows;
  std::vector<int> labels;  // Empty when the source had no label column.

  std::size_t size() const { return rows.size(); }
};

// CSV with a header row naming every schema feature (any order) and an
// optional "label" column. Other columns are rejected. Each row is validated
// against the schema; errors carry "/rows/<line>/<feature>" paths.
Dataset ParseDatasetCsv(std::string_view text, const FeatureSchema& schema,
                        bool require_label);
Dataset LoadDatasetCsv(const std::string& path, const FeatureSchema& schema,
                       bool require_label);

std::string DatasetToCsv(const Dataset& dataset, const FeatureSchema& schema);

}  // namespace riskx::model
