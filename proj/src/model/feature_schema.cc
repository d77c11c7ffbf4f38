#include "riskx/model/feature_schema.h"

#include <cmath>
#include <limits>
#include <set>

#include "riskx/common/error.h"

namespace riskx::model {

std::string_view FeatureKindName(FeatureKind kind) {
  return kind == FeatureKind::kBinary ? "binary" : "continuous";
}

bool FeatureSpec::InBounds(double value) const {
  if (!std::isfinite(value)) return false;
  if (kind == FeatureKind::kBinary) return value == 0.0 || value == 1.0;
  return value >= min && value <= max;
}

FeatureSchema::FeatureSchema(std::vector<FeatureSpec> features,
                             std::string version)
    : features_(std::move(features)), version_(std::move(version)) {
  std::set<std::string> ids;
  std::set<std::string> abbreviations;
  for (const FeatureSpec& spec : features_) {
    const auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::kInvalidArgument,
                  "feature '" + spec.id + "': " + what, "/" + spec.id);
    };
    if (spec.id.empty()) fail("empty id");
    if (!ids.insert(spec.id).second) fail("duplicate id");
    if (spec.abbreviation.empty() || spec.abbreviation.size() > 4) {
      fail("abbreviation must have 1-4 characters");
    }
    if (!abbreviations.insert(spec.abbreviation).second) {
      fail("duplicate abbreviation");
    }
    if (!(spec.min < spec.max)) fail("min must be below max");
    if (spec.kind == FeatureKind::kBinary &&
        (spec.min != 0.0 || spec.max != 1.0)) {
      fail("binary features have domain {0,1}");
    }
    if (spec.ideal_range) {
      const IdealRange& r = *spec.ideal_range;
      if (!(r.lo <= r.hi) || r.lo < spec.min || r.hi > spec.max) {
        fail("ideal range must lie within [min, max]");
      }
    }
  }
}

std::optional<std::size_t> FeatureSchema::IndexOf(std::string_view id) const {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    if (features_[i].id == id) return i;
  }
  return std::nullopt;
}

const FeatureSchema& DefaultSchema() {
  static const FeatureSchema* const kSchema = [] {
    using K = FeatureKind;
    std::vector<FeatureSpec> features = {
        {"age", "Age", "AGE", K::kContinuous, "years", 18, 100, false,
         std::nullopt,
         "Age in years; the chance of developing type 2 diabetes rises as "
         "people get older."},
        {"sex", "Sex", "SEX", K::kBinary, "", 0, 1, false, std::nullopt,
         "Biological sex, recorded as 1 for male and 0 for female."},
        {"bmi", "Body Mass Index", "BMI", K::kContinuous, "kg/m²", 10, 70,
         true, IdealRange{18.5, 22.9},
         "Body Mass Index compares body weight with height; extra body fat "
         "makes it harder for the body to use insulin."},
        {"fasting_glucose", "Fasting Blood Glucose", "GLU", K::kContinuous,
         "mg/dL", 40, 400, true, IdealRange{70, 99},
         "Fasting blood glucose is the sugar level in the blood after not "
         "eating overnight; high levels are an early sign of diabetes."},
        {"systolic_bp", "Systolic Blood Pressure", "BP", K::kContinuous,
         "mmHg", 70, 250, true, IdealRange{90, 119},
         "Systolic blood pressure is the top number of a blood pressure "
         "reading; high blood pressure often occurs together with diabetes."},
        {"family_history", "Family History of Diabetes", "FAM", K::kBinary,
         "", 0, 1, false, std::nullopt,
         "Family history means a parent or sibling has diabetes, which "
         "points to an inherited tendency."},
        {"physical_activity", "Physical Activity", "ACT", K::kContinuous,
         "min/week", 0, 3000, true, IdealRange{150, 3000},
         "Physical activity is the time spent on moderate exercise each "
         "week; regular activity helps the body use blood sugar."},
        {"smoking", "Smoking", "SMK", K::kBinary, "", 0, 1, true,
         IdealRange{0, 0},
         "Smoking status shows whether you currently smoke; smoking makes "
         "the body respond less well to insulin."},
    };
    return new FeatureSchema(std::move(features), "diabetes-v1");
  }();
  return *kSchema;
}

void ValidateRecord(const FeatureSchema& schema, const PatientRecord& record) {
  if (record.values.size() != schema.size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "record has " + std::to_string(record.values.size()) +
                    " values, schema has " + std::to_string(schema.size()));
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const FeatureSpec& spec = schema[i];
    const double value = record.values[i];
    if (spec.InBounds(value)) continue;
    if (spec.kind == FeatureKind::kBinary) {
      throw Error(ErrorCode::kInvalidValue,
                  spec.id + " must be 0 or 1", "/" + spec.id);
    }
    throw Error(ErrorCode::kOutOfBounds,
                spec.id + " must be within [" + std::to_string(spec.min) +
                    ", " + std::to_string(spec.max) + "]",
                "/" + spec.id);
  }
}

PatientRecord RecordFromJson(const FeatureSchema& schema,
                             const nlohmann::json& object,
                             std::string_view path_prefix) {
  const std::string prefix(path_prefix);
  if (!object.is_object()) {
    throw Error(ErrorCode::kInvalidValue, "record must be a JSON object",
                prefix.empty() ? "/" : prefix);
  }
  for (const auto& [key, value] : object.items()) {
    if (!schema.IndexOf(key)) {
      throw Error(ErrorCode::kUnknownFeature, "unknown feature '" + key + "'",
                  prefix + "/" + key);
    }
  }
  PatientRecord record;
  record.values.reserve(schema.size());
  for (const FeatureSpec& spec : schema.features()) {
    const auto it = object.find(spec.id);
    if (it == object.end()) {
      throw Error(ErrorCode::kMissingFeature,
                  "missing feature '" + spec.id + "'", prefix + "/" + spec.id);
    }
    if (!it->is_number()) {
      throw Error(ErrorCode::kInvalidValue, spec.id + " must be a number",
                  prefix + "/" + spec.id);
    }
    record.values.push_back(it->get<double>());
  }
  try {
    ValidateRecord(schema, record);
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), prefix + e.field_path());
  }
  return record;
}

nlohmann::json RecordToJson(const FeatureSchema& schema,
                            const PatientRecord& record) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t i = 0; i < schema.size() && i < record.values.size(); ++i) {
    out[schema[i].id] = record.values[i];
  }
  return out;
}

nlohmann::json SchemaToJson(const FeatureSchema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const FeatureSpec& spec : schema.features()) {
    nlohmann::json f = {
        {"id", spec.id},
        {"label", spec.label},
        {"abbr", spec.abbreviation},
        {"kind", FeatureKindName(spec.kind)},
        {"unit", spec.unit},
        {"min", spec.min},
        {"max", spec.max},
        {"controllable", spec.controllable},
        {"definition", spec.definition},
    };
    f["ideal_range"] =
        spec.ideal_range
            ? nlohmann::json::array({spec.ideal_range->lo, spec.ideal_range->hi})
            : nlohmann::json(nullptr);
    features.push_back(std::move(f));
  }
  return {{"version", schema.version()}, {"features", std::move(features)}};
}

}  // namespace riskx::model
