#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sbilint::openapi {

enum class SchemaKind { String, Number, Integer, Boolean, Array, Object, Composite, Any };

std::string_view to_string(SchemaKind kind);

struct Schema;

/// Compiled regular expression plus the text it was built from.
struct Pattern {
  std::string text;
  std::shared_ptr<const std::regex> regex;
};

struct Discriminator {
  std::string property_name;
  /// Discriminator value -> branch schema. Holds explicit mapping entries and
  /// the implicit schema-name entries of every referenced oneOf branch.
  std::map<std::string, const Schema*> mapping;
};

struct AdditionalProperties {
  bool allowed = true;
  const Schema* schema = nullptr;  // set when additionalProperties is a schema
};

struct ObjectFields {
  std::map<std::string, const Schema*> properties;
  std::set<std::string> required;
  AdditionalProperties additional;
};

struct CompositeGroup {
  /// Sibling keywords of a composite node (type, properties, ...) compiled into
  /// a standalone node; its findings are reported directly, not wrapped.
  const Schema* base = nullptr;
  std::vector<const Schema*> one_of;
  std::vector<const Schema*> any_of;
  std::vector<const Schema*> all_of;
  const Schema* not_schema = nullptr;
  std::optional<Discriminator> discriminator;
};

/// Reference-free schema node. Nodes are owned by a SchemaArena and link to
/// each other with plain pointers, so recursive schemas are pointer cycles.
struct Schema {
  SchemaKind kind = SchemaKind::Any;
  bool nullable = false;

  std::optional<Pattern> pattern;
  std::optional<double> minimum;
  std::optional<double> maximum;
  bool exclusive_minimum = false;
  bool exclusive_maximum = false;
  std::optional<std::uint64_t> min_length;
  std::optional<std::uint64_t> max_length;
  std::optional<std::uint64_t> min_items;
  std::optional<std::uint64_t> max_items;
  bool unique_items = false;
  std::optional<std::uint64_t> min_properties;
  std::optional<std::uint64_t> max_properties;
  std::optional<std::vector<nlohmann::json>> enum_values;
  std::string format;

  std::optional<ObjectFields> object_fields;
  const Schema* array_items = nullptr;
  std::optional<CompositeGroup> composite;

  /// Location the node was compiled from, "File.yaml#/json/pointer".
  std::string source;
};

class SchemaArena {
 public:
  Schema* make() {
    nodes_.push_back(std::make_unique<Schema>());
    return nodes_.back().get();
  }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  std::vector<std::unique_ptr<Schema>> nodes_;
};

/// Visits every node reachable from `root` exactly once.
template <typename Fn>
void for_each_reachable(const Schema& root, Fn&& fn) {
  std::set<const Schema*> seen;
  std::vector<const Schema*> pending{&root};
  while (!pending.empty()) {
    const Schema* node = pending.back();
    pending.pop_back();
    if (node == nullptr || !seen.insert(node).second) {
      continue;
    }
    fn(*node);
    if (node->object_fields) {
      for (const auto& [_, child] : node->object_fields->properties) pending.push_back(child);
      pending.push_back(node->object_fields->additional.schema);
    }
    pending.push_back(node->array_items);
    if (node->composite) {
      const auto& c = *node->composite;
      pending.push_back(c.base);
      pending.insert(pending.end(), c.one_of.begin(), c.one_of.end());
      pending.insert(pending.end(), c.any_of.begin(), c.any_of.end());
      pending.insert(pending.end(), c.all_of.begin(), c.all_of.end());
      pending.push_back(c.not_schema);
      if (c.discriminator) {
        for (const auto& [_, target] : c.discriminator->mapping) pending.push_back(target);
      }
    }
  }
}

}  // namespace sbilint::openapi
