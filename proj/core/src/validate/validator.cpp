#include "sbilint/validate/validator.hpp"

#include <cfloat>
#include <cmath>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

namespace sbilint::validate {

using nlohmann::json;
using openapi::Schema;
using openapi::SchemaKind;

namespace {

struct DuplicateKey : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string describe_type(const json& v) {
  switch (v.type()) {
    case json::value_t::null: return "null";
    case json::value_t::boolean: return "boolean";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned: return "integer";
    case json::value_t::number_float: return "number";
    case json::value_t::string: return "string";
    case json::value_t::array: return "array";
    case json::value_t::object: return "object";
    default: return "value";
  }
}

std::string short_dump(const json& v) {
  std::string s = v.dump();
  if (s.size() > 60) s = s.substr(0, 57) + "...";
  return s;
}

std::size_t code_points(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xc0) != 0x80) ++n;
  }
  return n;
}

bool type_matches(SchemaKind kind, const json& v) {
  switch (kind) {
    case SchemaKind::String: return v.is_string();
    case SchemaKind::Number: return v.is_number();
    case SchemaKind::Integer: return v.is_number() && is_integer_valued(v);
    case SchemaKind::Boolean: return v.is_boolean();
    case SchemaKind::Array: return v.is_array();
    case SchemaKind::Object: return v.is_object();
    default: return true;
  }
}

bool is_typed(SchemaKind kind) { return kind != SchemaKind::Any && kind != SchemaKind::Composite; }

bool valid_date_time(const std::string& s) {
  static const std::regex re{R"(^(\d{4})-(\d{2})-(\d{2})[Tt](\d{2}):(\d{2}):(\d{2})(\.\d+)?([Zz]|[+-](\d{2}):(\d{2}))$)"};
  std::smatch m;
  if (!std::regex_match(s, m, re)) return false;
  const int month = std::stoi(m[2]);
  const int day = std::stoi(m[3]);
  const int hour = std::stoi(m[4]);
  const int minute = std::stoi(m[5]);
  const int second = std::stoi(m[6]);
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) return false;
  if (m[9].matched && (std::stoi(m[9]) > 23 || std::stoi(m[10]) > 59)) return false;
  return true;
}

bool valid_uuid(const std::string& s) {
  static const std::regex re{R"(^[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}$)"};
  return std::regex_match(s, re);
}

bool valid_base64(const std::string& s) {
  if (s.size() % 4 != 0) return false;
  std::size_t pad = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '=') {
      ++pad;
      continue;
    }
    if (pad > 0) return false;
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '/')) return false;
  }
  return pad <= 2;
}

std::optional<std::string> check_number_format(const std::string& format, const json& v) {
  if (format == "int32" || format == "int64") {
    if (!is_integer_valued(v)) return "value " + short_dump(v) + " is not an integer (" + format + ")";
    const long double x = v.get<long double>();
    const long double lo = format == "int32" ? std::numeric_limits<std::int32_t>::min()
                                             : static_cast<long double>(std::numeric_limits<std::int64_t>::min());
    const long double hi = format == "int32" ? std::numeric_limits<std::int32_t>::max()
                                             : static_cast<long double>(std::numeric_limits<std::int64_t>::max());
    if (x < lo || x > hi) return "value " + short_dump(v) + " outside " + format + " range";
  } else if (format == "float" || format == "double") {
    const double x = v.get<double>();
    if (!std::isfinite(x) || (format == "float" && std::fabs(x) > FLT_MAX)) {
      return "value " + short_dump(v) + " not representable as a finite " + format;
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_string_format(const std::string& format, const std::string& s) {
  if (format == "date-time" && !valid_date_time(s)) return "'" + s + "' is not an RFC 3339 date-time";
  if (format == "uuid" && !valid_uuid(s)) return "'" + s + "' is not a UUID";
  if (format == "byte" && !valid_base64(s)) return "'" + s + "' is not base64";
  return std::nullopt;
}

class Validator {
 public:
  void node(const json& value, const Schema& schema, const std::string& pointer, std::vector<Finding>& out) {
    if (value.is_null()) {
      if (schema.nullable) return;
      if (is_typed(schema.kind)) {
        add(out, Rule::NULL_NOT_ALLOWED, pointer, "null is not allowed here (expected " +
                                                      std::string(to_string(schema.kind)) + ")");
        return;
      }
    }
    if (schema.kind == SchemaKind::Composite) {
      composite(value, schema, pointer, out);
      return;
    }
    if (!type_matches(schema.kind, value)) {
      add(out, Rule::SCHEMA_TYPE_MISMATCH, pointer,
          "expected " + std::string(to_string(schema.kind)) + ", got " + describe_type(value) + " " + short_dump(value));
      return;
    }

    if (schema.enum_values) {
      bool found = false;
      for (const auto& candidate : *schema.enum_values) {
        if (candidate == value) {
          found = true;
          break;
        }
      }
      if (!found) add(out, Rule::ENUM_VIOLATION, pointer, "value " + short_dump(value) + " is not one of the enumerated values");
    }

    if (value.is_string()) {
      string_checks(value.get_ref<const std::string&>(), schema, pointer, out);
    } else if (value.is_number()) {
      number_checks(value, schema, pointer, out);
    } else if (value.is_array()) {
      array_checks(value, schema, pointer, out);
    } else if (value.is_object()) {
      object_checks(value, schema, pointer, out);
    }
  }

  void composite(const json& value, const Schema& schema, const std::string& pointer, std::vector<Finding>& out) {
    const auto& group = *schema.composite;
    if (group.base) node(value, *group.base, pointer, out);

    if (!group.all_of.empty()) {
      std::vector<Finding> detail;
      std::size_t failed = 0;
      for (const auto* branch : group.all_of) {
        auto branch_findings = run(value, *branch, pointer);
        if (!branch_findings.empty()) {
          ++failed;
          detail.insert(detail.end(), branch_findings.begin(), branch_findings.end());
        }
      }
      if (failed > 0) {
        add(out, Rule::ALLOF_FAILED, pointer,
            "value fails " + std::to_string(failed) + " of " + std::to_string(group.all_of.size()) + " allOf branches",
            std::move(detail));
      }
    }

    if (!group.any_of.empty()) {
      std::optional<std::vector<Finding>> best;
      bool passed = false;
      for (const auto* branch : group.any_of) {
        auto branch_findings = run(value, *branch, pointer);
        if (branch_findings.empty()) {
          passed = true;
          break;
        }
        if (!best || branch_findings.size() < best->size()) best = std::move(branch_findings);
      }
      if (!passed) {
        add(out, Rule::ANYOF_NONE, pointer,
            "value " + short_dump(value) + " matches none of " + std::to_string(group.any_of.size()) +
                " anyOf branches",
            std::move(*best));
      }
    }

    if (!group.one_of.empty()) {
      if (group.discriminator) {
        discriminated(value, group, pointer, out);
      } else {
        std::vector<std::size_t> passing;
        std::optional<std::vector<Finding>> best;
        for (std::size_t i = 0; i < group.one_of.size(); ++i) {
          auto branch_findings = run(value, *group.one_of[i], pointer);
          if (branch_findings.empty()) {
            passing.push_back(i);
          } else if (!best || branch_findings.size() < best->size()) {
            best = std::move(branch_findings);
          }
        }
        if (passing.empty()) {
          add(out, Rule::ONEOF_NONE, pointer,
              "value " + short_dump(value) + " matches none of " + std::to_string(group.one_of.size()) +
                  " oneOf branches",
              std::move(*best));
        } else if (passing.size() > 1) {
          std::string list;
          for (auto i : passing) list += (list.empty() ? "" : ", ") + std::to_string(i);
          add(out, Rule::ONEOF_MULTIPLE, pointer, "value matches more than one oneOf branch (" + list + ")");
        }
      }
    }

    if (group.not_schema != nullptr && run(value, *group.not_schema, pointer).empty()) {
      add(out, Rule::NOT_MATCHED, pointer, "value matches a schema it must not match");
    }
  }

 private:
  std::vector<Finding> run(const json& value, const Schema& schema, const std::string& pointer) {
    std::vector<Finding> findings;
    node(value, schema, pointer, findings);
    return findings;
  }

  static void add(std::vector<Finding>& out, Rule rule, const std::string& pointer, std::string message,
                  std::vector<Finding> detail = {}) {
    Finding f;
    f.rule = rule;
    f.severity = Severity::Error;
    f.json_pointer = pointer;
    f.message = std::move(message);
    f.detail = std::move(detail);
    out.push_back(std::move(f));
  }

  void discriminated(const json& value, const openapi::CompositeGroup& group, const std::string& pointer,
                     std::vector<Finding>& out) {
    const auto& disc = *group.discriminator;
    if (!value.is_object()) {
      add(out, Rule::DISCRIMINATOR_UNKNOWN, pointer,
          "discriminator '" + disc.property_name + "' requires an object, got " + describe_type(value));
      return;
    }
    auto it = value.find(disc.property_name);
    if (it == value.end() || !it->is_string()) {
      add(out, Rule::DISCRIMINATOR_UNKNOWN, pointer, "discriminator property '" + disc.property_name + "' missing");
      return;
    }
    auto target = disc.mapping.find(it->get<std::string>());
    if (target == disc.mapping.end()) {
      add(out, Rule::DISCRIMINATOR_UNKNOWN, pointer_append(pointer, disc.property_name),
          "discriminator value '" + it->get<std::string>() + "' maps to no schema");
      return;
    }
    node(value, *target->second, pointer, out);
  }

  void string_checks(const std::string& s, const Schema& schema, const std::string& pointer, std::vector<Finding>& out) {
    const std::size_t length = code_points(s);
    if ((schema.min_length && length < *schema.min_length) || (schema.max_length && length > *schema.max_length)) {
      std::ostringstream msg;
      msg << "length " << length << " outside [" << (schema.min_length ? std::to_string(*schema.min_length) : "0")
          << ", " << (schema.max_length ? std::to_string(*schema.max_length) : "inf") << "]";
      add(out, Rule::LENGTH_VIOLATION, pointer, msg.str());
    }
    if (schema.pattern) {
      bool matched = false;
      try {
        matched = std::regex_search(s, *schema.pattern->regex);
      } catch (const std::regex_error&) {
        matched = true;  // engine limit; not treated as a violation
      }
      if (!matched) {
        add(out, Rule::PATTERN_MISMATCH, pointer, "'" + s + "' does not match pattern " + schema.pattern->text);
      }
    }
    if (!schema.format.empty()) {
      if (auto problem = check_string_format(schema.format, s)) add(out, Rule::FORMAT_VIOLATION, pointer, *problem);
    }
  }

  void number_checks(const json& v, const Schema& schema, const std::string& pointer, std::vector<Finding>& out) {
    const long double x = v.get<long double>();
    bool low = false;
    bool high = false;
    if (schema.minimum) {
      const long double m = *schema.minimum;
      low = schema.exclusive_minimum ? !(x > m) : !(x >= m);
    }
    if (schema.maximum) {
      const long double m = *schema.maximum;
      high = schema.exclusive_maximum ? !(x < m) : !(x <= m);
    }
    if (low || high) {
      std::ostringstream msg;
      msg << "value " << short_dump(v) << " outside " << (schema.exclusive_minimum ? "(" : "[");
      if (schema.minimum) msg << *schema.minimum; else msg << "-inf";
      msg << ", ";
      if (schema.maximum) msg << *schema.maximum; else msg << "inf";
      msg << (schema.exclusive_maximum ? ")" : "]");
      add(out, Rule::RANGE_VIOLATION, pointer, msg.str());
    }
    if (!schema.format.empty()) {
      if (auto problem = check_number_format(schema.format, v)) add(out, Rule::FORMAT_VIOLATION, pointer, *problem);
    }
  }

  void array_checks(const json& v, const Schema& schema, const std::string& pointer, std::vector<Finding>& out) {
    if (schema.min_items && v.size() < *schema.min_items) {
      add(out, Rule::MIN_ITEMS, pointer,
          "array has " + std::to_string(v.size()) + " item(s), at least " + std::to_string(*schema.min_items) + " required");
    }
    if (schema.max_items && v.size() > *schema.max_items) {
      add(out, Rule::MAX_ITEMS, pointer,
          "array has " + std::to_string(v.size()) + " item(s), at most " + std::to_string(*schema.max_items) + " allowed");
    }
    if (schema.unique_items) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = i + 1; j < v.size(); ++j) {
          if (v[i] == v[j]) {
            add(out, Rule::UNIQUE_ITEMS, pointer_append(pointer, std::to_string(j)),
                "item " + std::to_string(j) + " duplicates item " + std::to_string(i));
          }
        }
      }
    }
    if (schema.array_items) {
      for (std::size_t i = 0; i < v.size(); ++i) node(v[i], *schema.array_items, pointer_append(pointer, std::to_string(i)), out);
    }
  }

  void object_checks(const json& v, const Schema& schema, const std::string& pointer, std::vector<Finding>& out) {
    if (schema.min_properties && v.size() < *schema.min_properties) {
      add(out, Rule::PROPERTY_COUNT, pointer,
          "object has " + std::to_string(v.size()) + " propert(ies), at least " + std::to_string(*schema.min_properties) + " required");
    }
    if (schema.max_properties && v.size() > *schema.max_properties) {
      add(out, Rule::PROPERTY_COUNT, pointer,
          "object has " + std::to_string(v.size()) + " propert(ies), at most " + std::to_string(*schema.max_properties) + " allowed");
    }
    if (!schema.object_fields) return;
    const auto& fields = *schema.object_fields;
    for (const auto& name : fields.required) {
      if (!v.contains(name)) add(out, Rule::REQUIRED_MISSING, pointer, "required property '" + name + "' is missing");
    }
    for (const auto& [key, child] : v.items()) {
      const std::string child_pointer = pointer_append(pointer, key);
      if (auto p = fields.properties.find(key); p != fields.properties.end()) {
        node(child, *p->second, child_pointer, out);
      } else if (!fields.additional.allowed) {
        add(out, Rule::ADDITIONAL_PROPERTY, child_pointer, "property '" + key + "' is not allowed");
      } else if (fields.additional.schema != nullptr) {
        node(child, *fields.additional.schema, child_pointer, out);
      }
    }
  }
};

}  // namespace

std::optional<json> parse_json(std::string_view text, std::string* error) {
  std::vector<std::set<std::string>> keys;
  json::parser_callback_t callback = [&keys](int, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        keys.emplace_back();
        break;
      case json::parse_event_t::key:
        if (!keys.back().insert(parsed.get<std::string>()).second) {
          throw DuplicateKey("duplicate object key '" + parsed.get<std::string>() + "'");
        }
        break;
      case json::parse_event_t::object_end:
        keys.pop_back();
        break;
      default:
        break;
    }
    return true;
  };
  try {
    return json::parse(text.begin(), text.end(), callback);
  } catch (const std::exception& e) {
    if (error) *error = e.what();
    return std::nullopt;
  }
}

bool is_integer_valued(const json& value) {
  if (value.is_number_integer() || value.is_number_unsigned()) return true;
  if (!value.is_number_float()) return false;
  const double x = value.get<double>();
  return std::isfinite(x) && std::floor(x) == x;
}

std::vector<Finding> validate(const json& value, const Schema& schema, const std::string& pointer) {
  std::vector<Finding> out;
  Validator{}.node(value, schema, pointer, out);
  sort_findings(out);
  return out;
}

std::vector<Finding> validate_composite(const json& value, const Schema& schema, const std::string& pointer) {
  std::vector<Finding> out;
  if (schema.composite) Validator{}.composite(value, schema, pointer, out);
  sort_findings(out);
  return out;
}

}  // namespace sbilint::validate
