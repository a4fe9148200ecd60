#include <charconv>
#include <cmath>
#include <limits>
#include <regex>

#include <yaml-cpp/yaml.h>

#include "sbilint/openapi/compiler.hpp"

namespace sbilint::openapi {

namespace {

constexpr int kMaxDepth = 256;

bool is_null_literal(const std::string& s) {
  return s.empty() || s == "~" || s == "null" || s == "Null" || s == "NULL";
}

std::optional<bool> bool_literal(const std::string& s) {
  if (s == "true" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "False" || s == "FALSE") return false;
  return std::nullopt;
}

nlohmann::json resolve_plain_scalar(const std::string& s) {
  if (is_null_literal(s)) return nullptr;
  if (auto b = bool_literal(s)) return *b;

  static const std::regex int_re{R"([-+]?[0-9]+)"};
  static const std::regex hex_re{R"(0x[0-9a-fA-F]+)"};
  static const std::regex oct_re{R"(0o[0-7]+)"};
  static const std::regex float_re{R"([-+]?(\.[0-9]+|[0-9]+(\.[0-9]*)?)([eE][-+]?[0-9]+)?)"};

  if (std::regex_match(s, int_re)) {
    const char* first = s.data() + (s.front() == '+' ? 1 : 0);
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), value);
    if (ec == std::errc{} && ptr == s.data() + s.size()) return value;
    std::uint64_t uvalue = 0;
    auto [uptr, uec] = std::from_chars(first, s.data() + s.size(), uvalue);
    if (uec == std::errc{} && uptr == s.data() + s.size()) return uvalue;
    return std::stod(s);
  }
  if (std::regex_match(s, hex_re)) return static_cast<std::int64_t>(std::stoll(s.substr(2), nullptr, 16));
  if (std::regex_match(s, oct_re)) return static_cast<std::int64_t>(std::stoll(s.substr(2), nullptr, 8));
  if (std::regex_match(s, float_re)) return std::stod(s);
  if (s == ".inf" || s == ".Inf" || s == ".INF" || s == "+.inf") return std::numeric_limits<double>::infinity();
  if (s == "-.inf" || s == "-.Inf" || s == "-.INF") return -std::numeric_limits<double>::infinity();
  return s;
}

nlohmann::json convert(const YAML::Node& node, int depth, std::vector<std::string>& warnings) {
  if (depth > kMaxDepth) {
    throw std::runtime_error("YAML nesting too deep");
  }
  switch (node.Type()) {
    case YAML::NodeType::Undefined:
    case YAML::NodeType::Null:
      return nullptr;
    case YAML::NodeType::Scalar: {
      const std::string& tag = node.Tag();
      if (tag == "?") return resolve_plain_scalar(node.Scalar());
      if (tag == "tag:yaml.org,2002:int" || tag == "tag:yaml.org,2002:float" ||
          tag == "tag:yaml.org,2002:bool" || tag == "tag:yaml.org,2002:null") {
        return resolve_plain_scalar(node.Scalar());
      }
      return node.Scalar();
    }
    case YAML::NodeType::Sequence: {
      auto out = nlohmann::json::array();
      for (const auto& item : node) out.push_back(convert(item, depth + 1, warnings));
      return out;
    }
    case YAML::NodeType::Map: {
      auto out = nlohmann::json::object();
      for (const auto& kv : node) {
        std::string key = kv.first.Scalar();
        if (key == "<<") {
          warnings.push_back("YAML merge key '<<' is not supported and was kept as a plain key");
        }
        out[key] = convert(kv.second, depth + 1, warnings);
      }
      return out;
    }
  }
  return nullptr;
}

}  // namespace

nlohmann::json yaml_to_json(const std::string& text, std::vector<std::string>& warnings) {
  YAML::Node root = YAML::Load(text);
  return convert(root, 0, warnings);
}

}  // namespace sbilint::openapi
