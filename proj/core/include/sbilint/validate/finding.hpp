#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sbilint::validate {

enum class Rule {
  SCHEMA_TYPE_MISMATCH,
  PATTERN_MISMATCH,
  RANGE_VIOLATION,
  LENGTH_VIOLATION,
  MIN_ITEMS,
  MAX_ITEMS,
  UNIQUE_ITEMS,
  REQUIRED_MISSING,
  ADDITIONAL_PROPERTY,
  PROPERTY_COUNT,
  ENUM_VIOLATION,
  FORMAT_VIOLATION,
  NULL_NOT_ALLOWED,
  ONEOF_NONE,
  ONEOF_MULTIPLE,
  DISCRIMINATOR_UNKNOWN,
  ANYOF_NONE,
  ALLOF_FAILED,
  NOT_MATCHED,
  BODY_NOT_JSON,
  CONTENT_TYPE_MISMATCH,
  STATUS_NOT_DEFINED,
  UNKNOWN_PATH,
  METHOD_NOT_ALLOWED,
  UNSUPPORTED_API_VERSION,
  HEADERS_INCOMPLETE,
  LOCATION_HEADER_MISSING,
};

inline constexpr int kRuleCount = static_cast<int>(Rule::LOCATION_HEADER_MISSING) + 1;

std::string_view to_string(Rule rule);
std::optional<Rule> parse_rule(std::string_view text);

/// Ordered: a higher value is more severe.
enum class Severity { Info = 0, Warning = 1, Error = 2 };

std::string_view to_string(Severity severity);
std::optional<Severity> parse_severity(std::string_view text);

struct Finding {
  Rule rule = Rule::SCHEMA_TYPE_MISMATCH;
  Severity severity = Severity::Error;
  std::string json_pointer;  // RFC 6901, "" is the root
  std::string message;
  std::uint64_t frame_number = 0;
  std::vector<Finding> detail;  // branch diagnostics for composite rules
};

/// Sorts by (json_pointer, rule, message), recursively through detail.
void sort_findings(std::vector<Finding>& findings);

/// Appends an escaped reference token to a JSON pointer.
std::string pointer_append(std::string_view pointer, std::string_view token);

}  // namespace sbilint::validate
