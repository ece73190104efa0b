#include <catch_amalgamated.hpp>

#include "recdr/oracle.hpp"
#include "support/fixtures.hpp"

using namespace recdr;
using namespace recdr::testing;

TEST_CASE("standalone oracle examples", "[oracle]") {
  const TimeGrid g{2, 1.0};
  const auto arb = oracle::brute_force_standalone(make_entity("E", {1, 0}, {1, 2}, lossless(1, 1, 1)), g, 10);
  CHECK(arb.found);
  CHECK(arb.profit == Catch::Approx(2.0));
  CHECK(arb.gap == 0.0);

  const auto idle = oracle::brute_force_standalone(make_entity("E", {0, 0}, {5, 7}, lossless(3, 1, 1)), g, 4);
  CHECK(idle.profit == 0.0);

  const auto none = oracle::brute_force_standalone(make_entity("E", {2, 3}, {0.5, 0.25}, lossless(0, 1, 1)), g, 4);
  CHECK(none.profit == Catch::Approx(2 * 0.5 + 3 * 0.25));
}

TEST_CASE("standalone oracle size cap", "[oracle]") {
  const auto e = make_entity("E", std::vector<double>(9, 1.0), std::vector<double>(9, 1.0), lossless(1, 1, 1));
  CHECK_THROWS_AS(oracle::brute_force_standalone(e, TimeGrid{9, 1.0}, 1), oracle::SizeCapError);
  const auto big = make_entity("E", {1, 1}, {1, 1}, lossless(1e5, 1e5, 1e5));
  CHECK_THROWS_AS(oracle::brute_force_standalone(big, TimeGrid{2, 1.0}, 100), oracle::SizeCapError);
}

TEST_CASE("community oracle examples", "[oracle]") {
  const auto a = make_entity("A", {1, 2, 0}, {1, 3, 2}, lossless(2, 1, 1));
  const auto b = make_entity("B", {0, 1, 1}, {2, 1, 1}, lossless(1, 1, 1));
  const TimeGrid g{3, 1.0};
  const double j0[] = {oracle::brute_force_standalone(a, g, 1).profit, oracle::brute_force_standalone(b, g, 1).profit};

  const Scenario empty = make_scenario(3, {a, b});
  const auto sep = oracle::brute_force_community(empty, Objective::EntitiesInterest, j0, 1);
  CHECK(sep.found);
  CHECK(sep.objective == Catch::Approx(j0[0] + j0[1]));

  const Scenario one = make_scenario(2, {make_entity("E", {1, 0}, {1, 1}, lossless(1, 1, 1))},
                                     {make_request(1, 2, 0, 1, 10)});
  const double base[] = {1.0};
  const auto r = oracle::brute_force_community(one, Objective::EntitiesInterest, base, 10);
  CHECK(r.found);
  CHECK(r.objective == Catch::Approx(6.0));
  CHECK(r.sum_gamma == Catch::Approx(10.0));
  CHECK(r.candidates > 0);
}

TEST_CASE("vertex oracle on a textbook LP", "[oracle]") {
  lp::LpModel m;
  const int x = m.add_variable(0, 4, 3);
  const int y = m.add_variable(0, 6, 5);
  m.add_row({{x, 1}}, lp::Relation::LessEqual, 4);
  m.add_row({{y, 2}}, lp::Relation::LessEqual, 12);
  m.add_row({{x, 3}, {y, 2}}, lp::Relation::LessEqual, 18);
  const auto v = oracle::enumerate_vertices(m);
  CHECK(v.feasible);
  CHECK(v.objective == Catch::Approx(36.0));
}
