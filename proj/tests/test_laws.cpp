#include <set>

#include "doctest.h"
#include "tds/laws.hpp"

using namespace tds;

TEST_CASE("link-product laws hold on 100 random instances each") {
  const std::vector<LawResult> rs = run_link_laws(2024, 100, 1e-10);
  std::set<std::string> names;
  for (const auto& r : rs) {
    INFO(r.law);
    names.insert(r.law);
    CHECK(r.trials == 100);
    CHECK(r.failures == 0);
    CHECK(r.max_residual <= 1e-10);
  }
  CHECK(names == std::set<std::string>{"commutativity", "associativity", "unitary_cancellation_pure",
                                       "unitary_cancellation_mixed", "composition_pure", "composition_mixed"});
}

TEST_CASE("law runs are reproducible from the seed") {
  const auto a = run_link_laws(7, 5), b = run_link_laws(7, 5);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].max_residual == b[k].max_residual);
}

TEST_CASE("an impossible tolerance reports failures") {
  // Floating-point residuals are nonzero for generic random instances.
  int failures = 0;
  for (const auto& r : run_link_laws(11, 5, 0.0)) failures += r.failures;
  CHECK(failures > 0);
}
