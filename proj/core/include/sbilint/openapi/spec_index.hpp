#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "sbilint/openapi/schema.hpp"

namespace sbilint::openapi {

/// Thrown for corpus-level failures that make the index unusable.
class SpecError : public std::runtime_error {
 public:
  enum class Kind { EmptyCorpus, UnresolvableRef, BadTemplate };

  SpecError(Kind kind, std::string message, std::string location = {})
      : std::runtime_error(std::move(message)), kind_(kind), location_(std::move(location)) {}

  Kind kind() const noexcept { return kind_; }
  /// For UnresolvableRef: the document location holding the reference.
  const std::string& location() const noexcept { return location_; }

 private:
  Kind kind_;
  std::string location_;
};

struct PathMatcher {
  std::string template_text;
  std::string regex_text;
  std::shared_ptr<const std::regex> regex;
  int literal_segment_count = 0;
  std::vector<std::string> parameter_names;

  /// Full match of a path suffix. On success returns parameter bindings in
  /// declaration order.
  std::optional<std::vector<std::pair<std::string, std::string>>> match(std::string_view path) const;
};

/// Builds the matcher for `path_template`. Parameters with a declared string
/// pattern embed it as the segment expression.
PathMatcher compile_path_template(std::string_view path_template,
                                  const std::map<std::string, const Schema*>& parameters);

using ContentMap = std::map<std::string, const Schema*>;  // media type (lower case) -> schema

struct ResponseSpec {
  ContentMap content;
  std::vector<std::string> required_headers;  // lower case
};

struct OperationSpec {
  std::string method;  // upper case
  std::string operation_id;
  std::string api_name;
  std::string api_version;
  std::string path_template;
  std::string document;
  ContentMap request_body;
  std::map<std::string, ResponseSpec> responses;  // "200", "4XX", "default"
  bool callbacks_present = false;
  /// Operations declared under this operation's callbacks, e.g. notifications.
  std::vector<std::shared_ptr<const OperationSpec>> callbacks;

  /// Resolution order: exact code, class pattern ("4XX"), "default".
  const ResponseSpec* response_for(int status) const;
};

struct IndexEntry {
  std::string base_path;
  PathMatcher matcher;
  std::map<std::string, std::shared_ptr<const OperationSpec>> operations;  // method -> op
};

enum class NoMatchReason { UnknownBasePath, UnknownPath, MethodNotAllowed, UnsupportedVersion };

std::string_view to_string(NoMatchReason reason);

struct OperationMatch {
  const OperationSpec* operation = nullptr;
  const IndexEntry* entry = nullptr;
  std::vector<std::pair<std::string, std::string>> path_parameters;
};

struct NoMatch {
  NoMatchReason reason;
  std::string found_version;     // UnsupportedVersion only
  std::string expected_version;  // UnsupportedVersion only
};

using LookupResult = std::variant<OperationMatch, NoMatch>;

/// Immutable compiled form of an OpenAPI corpus.
class SpecIndex {
 public:
  const std::vector<IndexEntry>& entries() const noexcept { return entries_; }
  const std::map<std::string, std::string>& supported_versions() const noexcept { return versions_; }
  /// Load warnings and informational notes collected during compilation.
  const std::vector<std::string>& notes() const noexcept { return notes_; }
  /// Hex SHA-256 over the loaded document bytes, in file-name order.
  const std::string& digest() const noexcept { return digest_; }
  std::size_t schema_count() const noexcept { return arena_ ? arena_->size() : 0; }

  /// `path` is the request :path; any query string is ignored.
  LookupResult lookup(std::string_view method, std::string_view path) const;

 private:
  friend class CorpusCompiler;

  std::vector<IndexEntry> entries_;
  std::map<std::string, std::string> versions_;
  std::vector<std::string> notes_;
  std::string digest_;
  std::shared_ptr<SchemaArena> arena_;
};

inline LookupResult lookup_operation(std::string_view method, std::string_view path, const SpecIndex& index) {
  return index.lookup(method, path);
}

}  // namespace sbilint::openapi
