// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.
#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "checks.hpp"

namespace {

using sbilint::testing::CheckResult;

CheckResult all_of(std::vector<std::function<CheckResult()>> parts) {
  std::string detail;
  for (auto& part : parts) {
    CheckResult r;
    try {
      r = part();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.ok) return r;
    detail += (detail.empty() ? "" : "; ") + r.detail;
  }
  return {true, detail};
}

}  // namespace

int main() {
  namespace t = sbilint::testing;
  struct Criterion {
    const char* name;
    std::function<CheckResult()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 issue fixtures",
       [] {
         return all_of({[] {
                          double seconds = 0;
                          auto r = t::check_issue_fixtures(&seconds);
                          if (r.ok && seconds >= 10.0) return CheckResult{false, "corpus took " + r.detail};
                          return r;
                        },
                        t::check_hal_schema_selection});
       }},
      {"2 hpack equivalence",
       [] { return all_of({t::check_rfc7541_examples, [] { return t::check_hpack_round_trips(1000, 7541); }}); }},
      {"3 validator oracle", [] { return all_of({[] { return t::check_validator_oracle(10000, 2024); }}); }},
      {"4 path matching",
       [] {
         return all_of({[] { return t::check_path_properties(100, 29501); },
                        [] { return t::check_load_order_invariance(20, 29501); }});
       }},
      {"5 determinism", [] { return all_of({t::check_determinism}); }},
      {"6 mid-stream capture", [] { return all_of({t::check_midstream}); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto r = c.run();
    std::cout << (r.ok ? "PASS" : "FAIL") << "  " << c.name << "  (" << r.detail << ")\n";
    if (!r.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
