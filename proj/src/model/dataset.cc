#include "riskx/model/dataset.h"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "riskx/common/error.h"
#include "riskx/common/numeric_format.h"

namespace riskx::model {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(Trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> ParseNumber(std::string_view field) {
  double value = 0.0;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

}  // namespace

Dataset ParseDatasetCsv(std::string_view text, const FeatureSchema& schema,
                        bool require_label) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto newline = text.find('\n', start);
    std::string_view line = text.substr(start, newline - start);
    if (!Trim(line).empty()) lines.push_back(line);
    if (newline == std::string_view::npos) break;
    start = newline + 1;
  }
  if (lines.empty()) {
    throw Error(ErrorCode::kMalformedDocument, "CSV has no header row");
  }

  const auto header = SplitFields(lines.front());
  std::vector<int> column_feature(header.size(), -1);
  std::optional<std::size_t> label_column;
  std::vector<bool> present(schema.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "label") {
      label_column = c;
      continue;
    }
    const auto index = schema.IndexOf(header[c]);
    if (!index) {
      throw Error(ErrorCode::kUnknownFeature,
                  "unknown CSV column '" + std::string(header[c]) + "'",
                  "/header/" + std::string(header[c]));
    }
    if (present[*index]) {
      throw Error(ErrorCode::kMalformedDocument,
                  "duplicate CSV column '" + std::string(header[c]) + "'");
    }
    present[*index] = true;
    column_feature[c] = static_cast<int>(*index);
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (!present[i]) {
      throw Error(ErrorCode::kMissingFeature,
                  "CSV lacks column '" + schema[i].id + "'",
                  "/header/" + schema[i].id);
    }
  }
  if (require_label && !label_column) {
    throw Error(ErrorCode::kMissingFeature, "CSV lacks a 'label' column",
                "/header/label");
  }

  Dataset dataset;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::string row_path = "/rows/" + std::to_string(r);
    const auto fields = SplitFields(lines[r]);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kMalformedDocument,
                  "row " + std::to_string(r) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()),
                  row_path);
    }
    PatientRecord record;
    record.values.assign(schema.size(), 0.0);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = ParseNumber(fields[c]);
      const std::string name =
          column_feature[c] >= 0 ? schema[column_feature[c]].id : "label";
      if (!value) {
        throw Error(ErrorCode::kInvalidValue,
                    "non-numeric value '" + std::string(fields[c]) + "'",
                    row_path + "/" + name);
      }
      if (column_feature[c] >= 0) {
        record.values[column_feature[c]] = *value;
      } else if (label_column) {
        if (*value != 0.0 && *value != 1.0) {
          throw Error(ErrorCode::kInvalidValue, "label must be 0 or 1",
                      row_path + "/label");
        }
        dataset.labels.push_back(static_cast<int>(*value));
      }
    }
    try {
      ValidateRecord(schema, record);
    } catch (const Error& e) {
      throw Error(e.code(), e.what(), row_path + e.field_path());
    }
    dataset.rows.push_back(std::move(record));
  }
  return dataset;
}

Dataset LoadDatasetCsv(const std::string& path, const FeatureSchema& schema,
                       bool require_label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::ostringstream contents;
  contents << in.rdbuf();
  return ParseDatasetCsv(contents.str(), schema, require_label);
}

std::string DatasetToCsv(const Dataset& dataset, const FeatureSchema& schema) {
  std::string out;
  for (std::size_t i = 0; i < schema.size(); ++i) {
    out += (i ? "," : "") + schema[i].id;
  }
  const bool labelled = dataset.labels.size() == dataset.rows.size() &&
                        !dataset.rows.empty();
  if (labelled) out += ",label";
  out += '\n';
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    for (std::size_t i = 0; i < schema.size(); ++i) {
      out += (i ? "," : "") + FormatShortest(dataset.rows[r].values[i]);
    }
    if (labelled) out += "," + std::to_string(dataset.labels[r]);
    out += '\n';
  }
  return out;
}

}  // namespace riskx::model
