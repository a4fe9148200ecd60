#include <algorithm>

#include "sbilint/openapi/spec_index.hpp"

namespace sbilint::openapi {

namespace {

std::string escape_regex_literal(std::string_view text) {
  static constexpr std::string_view kSpecial = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : text) {
    if (kSpecial.find(c) != std::string_view::npos) out += '\\';
    out += c;
  }
  return out;
}

/// Removes unescaped '^' and '$' outside character classes and turns
/// capturing groups into non-capturing ones, so an anchored parameter pattern
/// can be embedded as one path segment without shifting capture indices.
std::string strip_anchors(std::string_view pattern) {
  std::string out;
  bool in_class = false;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    char c = pattern[i];
    if (c == '\\' && i + 1 < pattern.size()) {
      out += c;
      out += pattern[++i];
      continue;
    }
    if (in_class) {
      if (c == ']') in_class = false;
      out += c;
      continue;
    }
    if (c == '[') {
      in_class = true;
      out += c;
      // A leading '^' negates the class and must be kept.
      if (i + 1 < pattern.size() && pattern[i + 1] == '^') out += pattern[++i];
      if (i + 1 < pattern.size() && pattern[i + 1] == ']') out += pattern[++i];
      continue;
    }
    if (c == '^' || c == '$') continue;
    out += c;
    if (c == '(' && (i + 1 >= pattern.size() || pattern[i + 1] != '?')) out += "?:";
  }
  return out;
}

struct Piece {
  bool is_parameter;
  std::string text;
};

std::vector<Piece> split_segment(std::string_view segment, std::string_view path_template) {
  std::vector<Piece> pieces;
  std::size_t pos = 0;
  while (pos < segment.size()) {
    auto open = segment.find('{', pos);
    auto close = segment.find('}', pos);
    if (close != std::string_view::npos && (open == std::string_view::npos || close < open)) {
      throw SpecError(SpecError::Kind::BadTemplate, "unbalanced '}' in path template '" + std::string(path_template) + "'");
    }
    if (open == std::string_view::npos) {
      pieces.push_back({false, std::string(segment.substr(pos))});
      break;
    }
    if (open > pos) pieces.push_back({false, std::string(segment.substr(pos, open - pos))});
    if (close == std::string_view::npos) {
      throw SpecError(SpecError::Kind::BadTemplate, "unbalanced '{' in path template '" + std::string(path_template) + "'");
    }
    auto name = segment.substr(open + 1, close - open - 1);
    if (name.empty() || name.find('{') != std::string_view::npos) {
      throw SpecError(SpecError::Kind::BadTemplate, "empty or nested parameter name in path template '" +
                                                        std::string(path_template) + "'");
    }
    pieces.push_back({true, std::string(name)});
    pos = close + 1;
  }
  return pieces;
}

bool is_prefix_segmentwise(std::string_view base, std::string_view path) {
  if (path.size() < base.size() || path.compare(0, base.size(), base) != 0) return false;
  return path.size() == base.size() || path[base.size()] == '/';
}

}  // namespace

std::string_view to_string(NoMatchReason reason) {
  switch (reason) {
    case NoMatchReason::UnknownBasePath: return "UnknownBasePath";
    case NoMatchReason::UnknownPath: return "UnknownPath";
    case NoMatchReason::MethodNotAllowed: return "MethodNotAllowed";
    case NoMatchReason::UnsupportedVersion: return "UnsupportedVersion";
  }
  return "UnknownPath";
}

PathMatcher compile_path_template(std::string_view path_template,
                                  const std::map<std::string, const Schema*>& parameters) {
  if (path_template.empty() || path_template.front() != '/') {
    throw SpecError(SpecError::Kind::BadTemplate, "path template '" + std::string(path_template) + "' must begin with '/'");
  }

  std::vector<std::string_view> segments;
  for (std::size_t pos = 1;;) {
    auto next = path_template.find('/', pos);
    segments.push_back(path_template.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }

  PathMatcher matcher;
  matcher.template_text = std::string(path_template);
  // The lookahead pins the segment count, which keeps embedded parameter
  // patterns from spanning a '/'.
  std::string re = "^(?=(?:/[^/]*){" + std::to_string(segments.size()) + "}$)";
  for (auto segment : segments) {
    re += "/";
    auto pieces = split_segment(segment, path_template);
    bool literal = true;
    for (const auto& piece : pieces) {
      if (!piece.is_parameter) {
        re += escape_regex_literal(piece.text);
        continue;
      }
      literal = false;
      matcher.parameter_names.push_back(piece.text);
      auto it = parameters.find(piece.text);
      const Schema* schema = it == parameters.end() ? nullptr : it->second;
      if (schema != nullptr && schema->pattern) {
        re += "((?:" + strip_anchors(schema->pattern->text) + "))";
      } else {
        re += "([^/]+)";
      }
    }
    if (literal) ++matcher.literal_segment_count;
  }
  re += "$";

  try {
    matcher.regex = std::make_shared<const std::regex>(re, std::regex::ECMAScript);
  } catch (const std::regex_error&) {
    // Parameter pattern not expressible in ECMAScript: fall back to plain
    // single-segment wildcards.
    std::map<std::string, const Schema*> plain;
    for (const auto& [name, _] : parameters) plain.emplace(name, nullptr);
    return compile_path_template(path_template, plain);
  }
  matcher.regex_text = std::move(re);
  return matcher;
}

std::optional<std::vector<std::pair<std::string, std::string>>> PathMatcher::match(std::string_view path) const {
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(path.begin(), path.end(), m, *regex)) return std::nullopt;
  std::vector<std::pair<std::string, std::string>> bound;
  for (std::size_t i = 0; i < parameter_names.size(); ++i) {
    bound.emplace_back(parameter_names[i], m[i + 1].str());
  }
  return bound;
}

const ResponseSpec* OperationSpec::response_for(int status) const {
  const std::string code = std::to_string(status);
  if (auto it = responses.find(code); it != responses.end()) return &it->second;
  if (!code.empty()) {
    if (auto it = responses.find(code.substr(0, 1) + "XX"); it != responses.end()) return &it->second;
  }
  if (auto it = responses.find("default"); it != responses.end()) return &it->second;
  return nullptr;
}

LookupResult SpecIndex::lookup(std::string_view method, std::string_view path) const {
  path = path.substr(0, path.find_first_of("?#"));

  const IndexEntry* best = nullptr;
  std::vector<std::pair<std::string, std::string>> best_params;
  bool base_matched = false;
  for (const auto& entry : entries_) {
    if (!is_prefix_segmentwise(entry.base_path, path)) continue;
    base_matched = true;
    std::string_view rest = path.substr(entry.base_path.size());
    if (rest.empty()) rest = "/";
    auto params = entry.matcher.match(rest);
    if (!params) continue;
    if (best == nullptr || entry.matcher.literal_segment_count > best->matcher.literal_segment_count ||
        (entry.matcher.literal_segment_count == best->matcher.literal_segment_count &&
         entry.matcher.template_text < best->matcher.template_text)) {
      best = &entry;
      best_params = std::move(*params);
    }
  }

  if (best != nullptr) {
    auto op = best->operations.find(std::string(method));
    if (op == best->operations.end()) return NoMatch{NoMatchReason::MethodNotAllowed, {}, {}};
    return OperationMatch{op->second.get(), best, std::move(best_params)};
  }
  if (base_matched) return NoMatch{NoMatchReason::UnknownPath, {}, {}};

  // "/<api-name>/<version>/..." where the API is known at another version.
  auto first_end = path.find('/', 1);
  if (path.size() > 1 && first_end != std::string_view::npos) {
    std::string api(path.substr(1, first_end - 1));
    auto second_end = path.find('/', first_end + 1);
    std::string version(path.substr(first_end + 1, second_end == std::string_view::npos
                                                        ? std::string_view::npos
                                                        : second_end - first_end - 1));
    if (auto it = versions_.find(api); it != versions_.end() && it->second != version) {
      return NoMatch{NoMatchReason::UnsupportedVersion, version, it->second};
    }
  }
  return NoMatch{NoMatchReason::UnknownBasePath, {}, {}};
}

}  // namespace sbilint::openapi
