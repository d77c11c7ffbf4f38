#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace riskx::model {

enum class FeatureKind { kContinuous, kBinary };

std::string_view FeatureKindName(FeatureKind kind);

struct IdealRange {
  double lo = 0.0;
  double hi = 0.0;

  bool Contains(double value) const { return value >= lo && value <= hi; }
  bool operator==(const IdealRange&) const = default;
};

// One risk factor: display metadata, bounds, and whether a person can change
// it through lifestyle.
struct FeatureSpec {
  std::string id;
  std::string label;
  std::string abbreviation;  // At most 4 characters, unique in a schema.
  FeatureKind kind = FeatureKind::kContinuous;
  std::string unit;
  double min = 0.0;
  double max = 1.0;
  bool controllable = false;
  std::optional<IdealRange> ideal_range;
  std::string definition;

  bool InBounds(double value) const;
};

// Ordered feature catalog. The position of a feature is its canonical index
// in models, records and explanation payloads.
class FeatureSchema {
 public:
  // Throws riskx::Error(kInvalidArgument) if any invariant is violated.
  FeatureSchema(std::vector<FeatureSpec> features, std::string version);

  std::size_t size() const { return features_.size(); }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const FeatureSpec& operator[](std::size_t index) const {
    return features_[index];
  }
  const std::string& version() const { return version_; }

  std::optional<std::size_t> IndexOf(std::string_view id) const;

 private:
  std::vector<FeatureSpec> features_;
  std::string version_;
};

// The eight-factor diabetes schema served by default.
const FeatureSchema& DefaultSchema();

// One value per schema feature, in feature units.
struct PatientRecord {
  std::vector<double> values;

  bool operator==(const PatientRecord&) const = default;
};

// Checks size, bounds and binary domains. Throws kSchemaMismatch on size
// mismatch and kOutOfBounds / kInvalidValue with a "/<feature id>" path.
void ValidateRecord(const FeatureSchema& schema, const PatientRecord& record);

// {"<id>": value, ...} keyed by feature id. Missing, unknown or non-numeric
// entries raise kMissingFeature / kUnknownFeature / kInvalidValue; bounds are
// then checked as in ValidateRecord. `path_prefix` is prepended to the
// reported field path.
PatientRecord RecordFromJson(const FeatureSchema& schema,
                             const nlohmann::json& object,
                             std::string_view path_prefix = "");
nlohmann::json RecordToJson(const FeatureSchema& schema,
                            const PatientRecord& record);

nlohmann::json SchemaToJson(const FeatureSchema& schema);

}  // namespace riskx::model
