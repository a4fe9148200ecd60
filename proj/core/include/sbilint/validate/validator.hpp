#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbilint/openapi/schema.hpp"
#include "sbilint/validate/finding.hpp"

namespace sbilint::validate {

/// Parses a JSON text. Duplicate object keys are a parse error. Returns
/// nullopt and fills `error` (when given) on failure.
std::optional<nlohmann::json> parse_json(std::string_view text, std::string* error = nullptr);

/// True for integers and for floats written with a zero-valued fraction.
bool is_integer_valued(const nlohmann::json& value);

/// Validates `value` against a reference-free schema. Returns an empty list
/// iff the value conforms. Findings are sorted by pointer, then rule.
std::vector<Finding> validate(const nlohmann::json& value, const openapi::Schema& schema,
                              const std::string& pointer = "");

/// The oneOf / anyOf / allOf / not part of a composite node (plus its base
/// keywords). `schema.composite` must be populated.
std::vector<Finding> validate_composite(const nlohmann::json& value, const openapi::Schema& schema,
                                        const std::string& pointer);

}  // namespace sbilint::validate
