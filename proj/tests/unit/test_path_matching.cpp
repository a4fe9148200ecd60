#include <doctest.h>

#include "helpers.hpp"
#include "sbilint/openapi/schema.hpp"

using namespace sbilint;

namespace {

openapi::Schema string_with_pattern(const std::string& text) {
  openapi::Schema s;
  s.kind = openapi::SchemaKind::String;
  s.pattern = openapi::Pattern{text, nullptr};
  return s;
}

}  // namespace

TEST_CASE("unconstrained parameters bind one segment") {
  const auto m = openapi::compile_path_template("/a/{x}/b/{y}", {});
  const auto bound = m.match("/a/1/b/two");
  REQUIRE(bound);
  CHECK((*bound)[0].second == "1");
  CHECK((*bound)[1].second == "two");
  CHECK_FALSE(m.match("/a/1/2/b/two"));
  CHECK_FALSE(m.match("/a//b/two"));
  CHECK(m.literal_segment_count == 2);
}

TEST_CASE("declared patterns constrain the segment") {
  const auto supi = string_with_pattern("^(imsi-[0-9]{5,15}|nai-.+|.+)$");
  const auto sd = string_with_pattern("^([0-9]{5,6}-)?[^-]+$");
  const auto m = openapi::compile_path_template("/{supi}/x/{id}", {{"supi", &supi}, {"id", &sd}});
  const auto bound = m.match("/imsi-001010000000001/x/12345-abc");
  REQUIRE(bound);
  // Groups inside the embedded patterns must not shift the bindings.
  CHECK((*bound)[0].second == "imsi-001010000000001");
  CHECK((*bound)[1].second == "12345-abc");
  CHECK_FALSE(m.match("/imsi-1/x/a-b-c"));
  // '.+' may not swallow a '/'.
  CHECK_FALSE(m.match("/nai-a/b/x/abc"));
}

TEST_CASE("mixed literal and parameter segments") {
  const auto m = openapi::compile_path_template("/files/{name}.json", {});
  const auto bound = m.match("/files/report.json");
  REQUIRE(bound);
  CHECK((*bound)[0].second == "report");
  CHECK_FALSE(m.match("/files/report.yaml"));
  CHECK(m.literal_segment_count == 1);
}

TEST_CASE("regex metacharacters in literals are escaped") {
  const auto m = openapi::compile_path_template("/a.b/(c)", {});
  CHECK(m.match("/a.b/(c)"));
  CHECK_FALSE(m.match("/axb/(c)"));
}

TEST_CASE("invalid patterns fall back to segment wildcards") {
  const auto weird = string_with_pattern("(?<=x)a");  // lookbehind is not ECMAScript
  const auto m = openapi::compile_path_template("/{v}", {{"v", &weird}});
  CHECK(m.match("/anything"));
}

TEST_CASE("malformed templates are rejected") {
  CHECK_THROWS_AS(openapi::compile_path_template("no-slash", {}), openapi::SpecError);
  CHECK_THROWS_AS(openapi::compile_path_template("/a/{b", {}), openapi::SpecError);
  CHECK_THROWS_AS(openapi::compile_path_template("/a/b}", {}), openapi::SpecError);
  CHECK_THROWS_AS(openapi::compile_path_template("/a/{}", {}), openapi::SpecError);
}

TEST_CASE("property: generated paths over every fixture template") {
  const auto r = testing::check_path_properties(25, 11);
  INFO(r.detail);
  CHECK(r.ok);
}

TEST_CASE("property: lookup does not depend on load order") {
  const auto r = testing::check_load_order_invariance(5, 12);
  INFO(r.detail);
  CHECK(r.ok);
}
