#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sbilint/openapi/schema.hpp"
#include "sbilint/openapi/spec_index.hpp"

namespace sbilint::openapi {

/// One YAML source file as read from disk (or supplied by a test).
struct SourceFile {
  std::string file_name;
  std::string text;
};

struct SpecDocument {
  std::string file_name;
  std::string api_name;     // "nnrf-nfm"
  std::string api_version;  // "v1"
  std::string base_path;    // "/nnrf-nfm/v1"
  nlohmann::json root;      // YAML converted to JSON values
};

/// Converts YAML text into JSON values, resolving plain scalars per the YAML
/// core schema (null, booleans, integers, floats). Quoted scalars stay strings.
/// Appends a warning to `warnings` for constructs that are not honoured.
nlohmann::json yaml_to_json(const std::string& text, std::vector<std::string>& warnings);

/// Holds the parsed corpus and turns schema locations into reference-free IR.
/// Each distinct location compiles to exactly one node, so compiling a
/// location twice returns the same node.
class CorpusCompiler {
 public:
  /// Parses the files. Files that fail to parse, or lack an "openapi" key,
  /// are skipped with a warning. Throws SpecError(EmptyCorpus) when nothing
  /// usable remains.
  explicit CorpusCompiler(std::vector<SourceFile> files);

  const std::map<std::string, SpecDocument>& documents() const noexcept { return documents_; }
  const std::vector<std::string>& notes() const noexcept { return notes_; }

  /// Resolves a local ("#/components/schemas/X") or cross-file
  /// ("File.yaml#/components/schemas/X") reference seen in `current_doc`.
  const Schema& resolve_ref(std::string_view ref_text, std::string_view current_doc);

  /// Compiles an inline schema node located at `pointer` inside `doc`.
  const Schema& compile_schema(const nlohmann::json& node, std::string_view doc, const std::string& pointer);

  /// Compiles every path item of every document into an index. The compiler
  /// is consumed; its schema arena moves into the index.
  SpecIndex build_index() &&;

 private:
  struct Located {
    const SpecDocument* doc;
    const nlohmann::json* node;
    std::string pointer;
  };

  Located locate(std::string_view ref_text, std::string_view current_doc, std::string_view from) const;
  const Schema* compile_at(const Located& where);
  const Schema* compile_node(const nlohmann::json& node, const SpecDocument& doc, const std::string& pointer);
  void fill(Schema& out, const nlohmann::json& node, const SpecDocument& doc, const std::string& pointer);
  const nlohmann::json& follow_refs(const nlohmann::json& node, const SpecDocument*& doc, std::string& pointer);
  void note(std::string text);

  std::map<std::string, SpecDocument> documents_;
  std::vector<std::string> notes_;
  std::set<std::string> noted_;
  std::shared_ptr<SchemaArena> arena_ = std::make_shared<SchemaArena>();
  std::map<std::string, const Schema*> memo_;  // canonical location -> node
  std::map<std::string, std::shared_ptr<const std::regex>> regex_cache_;
  std::set<std::string> unvalidated_formats_;
  std::string digest_;
};

/// Loads every *.yaml / *.yml file in `directory` and compiles the index.
SpecIndex load_spec_dir(const std::filesystem::path& directory);

/// Same as load_spec_dir for in-memory sources; input order is irrelevant.
SpecIndex compile_corpus(std::vector<SourceFile> files);

}  // namespace sbilint::openapi
