#include <catch_amalgamated.hpp>

#include <random>

#include "recdr/oracle.hpp"
#include "recdr/standalone.hpp"
#include "support/fixtures.hpp"

using namespace recdr;
using namespace recdr::testing;

namespace {

const TimeGrid kHourly{2, 1.0};

EntitySpec arbitrage(double eta, double storage_cost) {
  BessParams b = lossless(1, 1, 1);
  b.eta_c = eta;
  b.eta_d = eta;
  b.storage_op_cost = storage_cost;
  return make_entity("E", {1, 0}, {1, 2}, b);
}

}  // namespace

TEST_CASE("problem 1 has 4T+1 variables and 3T+2 rows", "[standalone]") {
  const auto one = make_entity("E", {1}, {1}, lossless(1, 1, 1));
  const auto m = build_problem1(one, TimeGrid{1, 0.25});
  CHECK(m.num_variables() == 5);
  CHECK(m.num_rows() == 5);
  lp::LpModel named;
  append_entity_block(named, one, TimeGrid{1, 0.25}, 1.0, 1);
  int dyn = 0, bal = 0, nogrid = 0, ends = 0;
  for (const auto& r : named.rows()) {
    dyn += r.name.starts_with("dyn");
    bal += r.name.starts_with("bal");
    nogrid += r.name.starts_with("nogrid");
    ends += r.name.starts_with("soc0") || r.name.starts_with("socT");
  }
  CHECK((dyn == 1 && bal == 1 && nogrid == 1 && ends == 2));

  const auto day = make_entity("E", std::vector<double>(96, 1.0), std::vector<double>(96, 0.1), lossless(10, 2, 2));
  CHECK(build_problem1(day, TimeGrid{96, 0.25}).num_variables() == 385);
}

TEST_CASE("zero capacity pins the state of charge", "[standalone]") {
  const auto e = make_entity("E", {1, 2}, {1, 1}, lossless(0, 1, 1));
  const auto m = build_problem1(e, kHourly);
  EntityBlock block{0, 0, 2};
  for (int t = 0; t <= 2; ++t) {
    CHECK(m.variable(block.soc(t)).lower == 0.0);
    CHECK(m.variable(block.soc(t)).upper == 0.0);
  }
}

TEST_CASE("nothing to sell gives an idle schedule", "[standalone]") {
  const auto e = make_entity("E", {0, 0, 0}, {3, 1, 2}, lossless(2, 1, 1));
  const auto r = solve_standalone(e, TimeGrid{3, 1.0});
  CHECK(r.profit == 0.0);
  for (double v : r.schedule.e_grid) CHECK(v == 0.0);
  for (double v : r.schedule.soc) CHECK(v == 0.0);
}

TEST_CASE("lossless arbitrage shifts the kWh to the dear slot", "[standalone]") {
  const auto r = solve_standalone(arbitrage(1.0, 0.0), kHourly);
  CHECK(r.profit == Catch::Approx(2.0).margin(1e-9));
  CHECK(r.schedule.e_charge[0] == Catch::Approx(1.0));
  CHECK(r.schedule.e_discharge[1] == Catch::Approx(1.0));
  const auto ref = oracle::brute_force_standalone(arbitrage(1.0, 0.0), kHourly, 10);
  CHECK(ref.profit == Catch::Approx(2.0).margin(1e-12));
}

TEST_CASE("lossy arbitrage still stores when it beats selling", "[standalone]") {
  const auto e = arbitrage(0.95, 0.01);
  const auto r = solve_standalone(e, kHourly);
  // 2 * 0.95^2 - 0.01 * (0.95 + 0.95) = 1.786
  CHECK(r.profit == Catch::Approx(1.786).margin(1e-9));
  CHECK(r.schedule.e_charge[0] == Catch::Approx(1.0));
  const auto ref = oracle::brute_force_standalone(e, kHourly, 100);
  REQUIRE(ref.found);
  CHECK(r.profit >= ref.profit - 1e-6);
  CHECK(r.profit <= ref.profit + ref.gap + 1e-6);
}

TEST_CASE("profit equals Psi of the returned schedule", "[standalone]") {
  std::mt19937 rng(5);
  for (int k = 0; k < 30; ++k) {
    const auto e = random_lossy_entity(rng, 12, "E");
    const auto r = solve_standalone(e, TimeGrid{12, 0.25});
    CHECK(r.profit == Catch::Approx(evaluate_psi(r.schedule, e)).margin(1e-6));
    CHECK(schedule_violation(r.schedule, e) <= 1e-9);
  }
}

TEST_CASE("infeasible terminal level names the entity", "[standalone]") {
  BessParams b = lossless(2, 1, 1);
  b.s_final = 2;
  const auto e = make_entity("dry", {0, 0}, {1, 1}, b);
  try {
    solve_standalone(e, kHourly);
    FAIL("expected EntityInfeasibleError");
  } catch (const EntityInfeasibleError& err) {
    CHECK(err.entity() == "dry");
  }
}

TEST_CASE("netting simultaneous flows", "[standalone]") {
  EntitySchedule s = EntitySchedule::zeros(1);

  SECTION("complementary slot is left alone") {
    const auto e = make_entity("E", {0}, {1}, lossless(1, 1, 1));
    s.e_discharge[0] = 0.5;
    s.e_grid[0] = 0.5;
    s.soc = {0.5, 0.0};
    const auto n = net_simultaneous_flows(s, e);
    CHECK(n.e_discharge[0] == 0.5);
    CHECK(n.e_grid[0] == 0.5);
  }

  SECTION("lossless tie nets to zero flows") {
    const auto e = make_entity("E", {1}, {1}, lossless(1, 1, 1));
    s.e_charge[0] = 1;
    s.e_discharge[0] = 1;
    s.e_grid[0] = 1;
    s.soc = {0.0, 0.0};
    const auto n = net_simultaneous_flows(s, e);
    CHECK(n.e_charge[0] == 0.0);
    CHECK(n.e_discharge[0] == 0.0);
    CHECK(n.e_grid[0] == 1.0);
    CHECK(evaluate_psi(n, e) == evaluate_psi(s, e));
  }

  SECTION("lossy slot gains from netting") {
    BessParams b = lossless(2, 1, 1);
    b.eta_c = 0.9;
    b.eta_d = 0.9;
    b.storage_op_cost = 0.01;
    b.s_initial = 1;
    b.s_final = 1.9 - 0.5 / 0.9;
    const auto e = make_entity("E", {1}, {1}, b);
    s.e_charge[0] = 1;
    s.e_discharge[0] = 0.5;
    s.e_grid[0] = 0.5;
    s.soc = {1.0, b.s_final};
    REQUIRE(schedule_violation(s, e) <= 1e-12);
    const auto n = net_simultaneous_flows(s, e);
    CHECK(n.e_charge[0] * n.e_discharge[0] == 0.0);
    CHECK(evaluate_psi(n, e) >= evaluate_psi(s, e));
    CHECK(schedule_violation(n, e) <= 1e-12);
  }
}

TEST_CASE("standalone optimum brackets the grid oracle", "[standalone][property]") {
  std::mt19937 rng(17);
  for (int k = 0; k < 60; ++k) {
    const int T = 2 + k % 5;
    const auto e = random_integer_entity(rng, T, "E");
    const TimeGrid grid{T, 1.0};
    if (!feasible_witness(e, grid)) continue;
    const auto r = solve_standalone(e, grid);
    const auto ref = oracle::brute_force_standalone(e, grid, 1);
    INFO("case " << k);
    REQUIRE(ref.found);
    CHECK(r.profit >= ref.profit - 1e-6);
    CHECK(r.profit <= ref.profit + ref.gap + 1e-6);
    for (int t = 0; t < T; ++t) {
      CHECK(r.schedule.e_charge[t] * r.schedule.e_discharge[t] == 0.0);
      CHECK(r.schedule.e_grid[t] >= 0.0);
    }
  }
}

TEST_CASE("a larger battery never lowers the baseline", "[standalone][property]") {
  std::mt19937 rng(23);
  for (int k = 0; k < 40; ++k) {
    auto e = random_lossy_entity(rng, 8, "E");
    const TimeGrid grid{8, 0.25};
    const double small = solve_standalone(e, grid).profit;
    e.bess.capacity *= 1.5;
    CHECK(solve_standalone(e, grid).profit >= small - 1e-9);
  }
}

TEST_CASE("parallel baselines match sequential ones", "[standalone]") {
  const Scenario s = synthetic_community(6, 24, 3);
  const auto one = solve_all_standalone(s, 1);
  const auto four = solve_all_standalone(s, 4);
  for (std::size_t u = 0; u < one.size(); ++u) {
    CHECK(one[u].profit == four[u].profit);
    CHECK(one[u].schedule.e_grid == four[u].schedule.e_grid);
  }
}
