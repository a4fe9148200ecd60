#include "sbilint/validate/finding.hpp"

#include <algorithm>
#include <array>
#include <tuple>

namespace sbilint::validate {

namespace {

constexpr std::array<std::string_view, kRuleCount> kRuleNames{
    "SCHEMA_TYPE_MISMATCH", "PATTERN_MISMATCH",     "RANGE_VIOLATION",       "LENGTH_VIOLATION",
    "MIN_ITEMS",            "MAX_ITEMS",            "UNIQUE_ITEMS",          "REQUIRED_MISSING",
    "ADDITIONAL_PROPERTY",  "PROPERTY_COUNT",       "ENUM_VIOLATION",        "FORMAT_VIOLATION",
    "NULL_NOT_ALLOWED",     "ONEOF_NONE",           "ONEOF_MULTIPLE",        "DISCRIMINATOR_UNKNOWN",
    "ANYOF_NONE",           "ALLOF_FAILED",         "NOT_MATCHED",           "BODY_NOT_JSON",
    "CONTENT_TYPE_MISMATCH", "STATUS_NOT_DEFINED",  "UNKNOWN_PATH",          "METHOD_NOT_ALLOWED",
    "UNSUPPORTED_API_VERSION", "HEADERS_INCOMPLETE", "LOCATION_HEADER_MISSING",
};

}  // namespace

std::string_view to_string(Rule rule) { return kRuleNames[static_cast<std::size_t>(rule)]; }

std::optional<Rule> parse_rule(std::string_view text) {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == text) return static_cast<Rule>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Severity severity) {
  switch (severity) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "error";
}

std::optional<Severity> parse_severity(std::string_view text) {
  if (text == "info") return Severity::Info;
  if (text == "warning") return Severity::Warning;
  if (text == "error") return Severity::Error;
  return std::nullopt;
}

void sort_findings(std::vector<Finding>& findings) {
  for (auto& f : findings) sort_findings(f.detail);
  std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
    return std::tie(a.json_pointer, a.rule, a.message) < std::tie(b.json_pointer, b.rule, b.message);
  });
}

std::string pointer_append(std::string_view pointer, std::string_view token) {
  std::string out(pointer);
  out += '/';
  for (char c : token) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace sbilint::validate
