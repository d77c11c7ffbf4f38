#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace riskx::testing {

// Validates `instance` against a JSON Schema subset: type, enum, properties,
// required, additionalProperties, items, minItems, maxItems, minimum,
// maximum, pattern, anyOf and local "#/$defs/..." references. Any other
// keyword is reported as an error so a schema cannot silently outgrow the
// validator. Returns one message per violation, empty when valid.
std::vector<std::string> ValidateJsonSchema(const nlohmann::json& root,
                                            const nlohmann::json& schema,
                                            const nlohmann::json& instance);

// Loads docs/schemas/api.schema.json and validates against $defs/<name>.
std::vector<std::string> ValidateApiBody(const std::string& name,
                                         const nlohmann::json& body);

}  // namespace riskx::testing
