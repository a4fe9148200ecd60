#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sbilint::testing {

/// Exhaustive reference semantics for the OpenAPI schema subset. It reads raw
/// schema JSON (resolving "#/components/schemas/X" itself) and computes, for a
/// finite universe of values closed under sub-values, the exact set of values
/// each schema accepts. It shares nothing with the compiler or validator.
class SchemaOracle {
 public:
  /// `components` maps schema names to raw schemas.
  SchemaOracle(std::vector<nlohmann::json> universe, nlohmann::json components);

  const std::vector<nlohmann::json>& universe() const { return universe_; }

  /// Acceptance vector of `schema` over the universe.
  const std::vector<bool>& accepted(const nlohmann::json& schema);

  bool accepts(const nlohmann::json& schema, std::size_t value_index) { return accepted(schema)[value_index]; }

 private:
  std::vector<bool> compute(const nlohmann::json& schema);
  bool check(const nlohmann::json& schema, std::size_t i);
  std::size_t index_of(const nlohmann::json& value) const;

  std::vector<nlohmann::json> universe_;
  nlohmann::json components_;
  std::map<std::string, std::vector<bool>> memo_;  // keyed by the schema's serialization
};

/// Adds every nested array element and object member value until closed.
std::vector<nlohmann::json> close_universe(std::vector<nlohmann::json> values);

/// The value universe used by the oracle property tests.
std::vector<nlohmann::json> default_universe();

/// Random raw schemas of bounded depth over the keywords the validator
/// supports. Named schemas (used by $ref and discriminators) are added to
/// `components`.
class SchemaGenerator {
 public:
  explicit SchemaGenerator(std::uint64_t seed) : rng_(seed) {}

  nlohmann::json generate(int depth, nlohmann::json& components);

 private:
  nlohmann::json scalar(nlohmann::json& components);
  nlohmann::json object(int depth, nlohmann::json& components);
  nlohmann::json array(int depth, nlohmann::json& components);
  nlohmann::json composite(int depth, nlohmann::json& components);
  nlohmann::json discriminated(int depth, nlohmann::json& components);
  bool chance(double p);
  int pick(int n);

  std::mt19937_64 rng_;
  int name_counter_ = 0;
};

}  // namespace sbilint::testing
