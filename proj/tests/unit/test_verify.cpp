#include <doctest.h>

#include <algorithm>

#include <nlohmann/json.hpp>

#include "grinder/error.hpp"
#include "grinder/verify.hpp"

using namespace grinder;

TEST_CASE("suite registry") {
  const auto suites = list_suites();
  for (const char* name : {"theorem1", "geometry", "estimator", "hierarchy", "closeness", "sampling"})
    CHECK(std::find(suites.begin(), suites.end(), name) != suites.end());
  CHECK_THROWS_AS(verify_suite("no-such-suite"), UnknownSuite);
}

TEST_CASE("fast suites pass and serialize") {
  for (const char* name : {"theorem1", "geometry", "oracle"}) {
    const VerifyReport r = verify_suite(name);
    CHECK_MESSAGE(r.passed(), name);
    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["suite"] == name);
    CHECK(j["passed"] == true);
    CHECK(j["checks"].size() == r.checks.size());
    for (const auto& c : j["checks"]) {
      CHECK(c.contains("name"));
      CHECK(c.contains("measured"));
      CHECK(c.contains("tolerance"));
    }
  }
}

TEST_CASE("theorem1 suite reports the four expected losses") {
  const VerifyReport r = verify_suite("theorem1");
  REQUIRE(r.checks.size() == 4);
  CHECK(r.checks[0].expected == 0.20);
  CHECK(r.checks[1].expected == 0.25);
  CHECK(r.checks[2].expected == 0.90);
  CHECK(r.checks[3].expected == 0.05);
}
