#include "doctest.h"
#include "property_suites.hpp"

namespace {

void require(const props::Outcome& o) {
  INFO(o.name << ": " << o.failures << " of " << o.instances << " failed, worst excess " << o.worst);
  CHECK(o.instances >= 1000);
  CHECK(o.ok());
}

}  // namespace

TEST_CASE("pmf is nonnegative and normalized") { require(props::pmf_normalization(1000, 101)); }
TEST_CASE("survival is nonincreasing") { require(props::survival_monotone(2000, 102)); }
TEST_CASE("2x2 closed form equals the recursion") { require(props::closed_2x2(3000, 103)); }
TEST_CASE("multicyclic closed form equals the recursion") { require(props::closed_multicyclic(5000, 104)); }
TEST_CASE("grad_pL equals finite differences") { require(props::gradient_fd(1000, 105)); }
TEST_CASE("grad_pL entries are bounded by one") { require(props::gradient_bounded(10000, 106)); }
TEST_CASE("heuristic never beats the certified column") { require(props::heuristic_below_certified(60, 107)); }
