#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "recdr/lp.hpp"
#include "recdr/oracle.hpp"

using namespace recdr;
using lp::Relation;

namespace {

lp::LpModel random_model(std::mt19937& rng, int n, int m) {
  std::uniform_int_distribution<int> coef(-4, 4);
  std::uniform_int_distribution<int> bound(-3, 3);
  std::uniform_int_distribution<int> rel(0, 2);
  lp::LpModel model;
  for (int j = 0; j < n; ++j) {
    const int a = bound(rng);
    const int b = bound(rng);
    model.add_variable(std::min(a, b), std::max(a, b) + 1, coef(rng));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<lp::Term> terms;
    for (int j = 0; j < n; ++j)
      if (const int c = coef(rng); c != 0) terms.push_back({j, static_cast<double>(c)});
    model.add_row(std::move(terms), static_cast<Relation>(rel(rng)), bound(rng) * 2);
  }
  return model;
}

}  // namespace

TEST_CASE("bound-active optimum without rows", "[lp]") {
  lp::LpModel m;
  m.add_variable(0, 1, 1);
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.x[0] == 1.0);
  CHECK(sol.objective == 1.0);
}

TEST_CASE("degenerate face", "[lp]") {
  lp::LpModel m;
  const int x = m.add_variable(0, 1, 1);
  const int y = m.add_variable(0, 1, 1);
  m.add_row({{x, 1}, {y, 1}}, Relation::LessEqual, 1);
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == Catch::Approx(1.0).margin(1e-12));
  CHECK(lp::check_feasibility(m, sol.x).feasible);
}

TEST_CASE("empty feasible set", "[lp]") {
  lp::LpModel m;
  const int x = m.add_variable(0, 1, 1);
  m.add_row({{x, 1}}, Relation::GreaterEqual, 2);
  CHECK(lp::solve(m).status == lp::Status::Infeasible);
}

TEST_CASE("unbounded ray", "[lp]") {
  lp::LpModel m;
  const int x = m.add_variable(0, lp::kInfinity, 1);
  const int y = m.add_variable(0, lp::kInfinity, 0);
  m.add_row({{x, 1}, {y, -1}}, Relation::LessEqual, 3);
  CHECK(lp::solve(m).status == lp::Status::Unbounded);
}

TEST_CASE("free variables and equality rows", "[lp]") {
  lp::LpModel m;
  const int x = m.add_variable(-lp::kInfinity, lp::kInfinity, -1);
  const int y = m.add_variable(0, 5, 2);
  m.add_row({{x, 1}, {y, -2}}, Relation::Equal, -1);
  m.objective_offset = 10;
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  // objective = -(2y - 1) + 2y + 10 = 11 for every y
  CHECK(sol.objective == Catch::Approx(11.0));
  CHECK(lp::check_feasibility(m, sol.x).feasible);
}

TEST_CASE("row coefficients beyond 1e6 are rejected", "[lp]") {
  lp::LpModel m;
  const int x = m.add_variable(0, 1, 1);
  m.add_row({{x, 2e6}}, Relation::LessEqual, 1);
  CHECK_THROWS_AS(lp::solve(m), lp::ScalingError);
}

TEST_CASE("crossed bounds are a model error", "[lp]") {
  lp::LpModel m;
  m.add_variable(2, 1, 1);
  CHECK_THROWS_AS(lp::solve(m), lp::ModelError);
}

TEST_CASE("random small models agree with vertex enumeration", "[lp][property]") {
  std::mt19937 rng(20240611);
  std::uniform_int_distribution<int> size(1, 6);
  int optimal = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto model = random_model(rng, size(rng), size(rng) - 1);
    const auto sol = lp::solve(model);
    const auto ref = oracle::enumerate_vertices(model);
    INFO("trial " << trial);
    if (!ref.feasible) {
      CHECK(sol.status == lp::Status::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(sol.status == lp::Status::Optimal);
    ++optimal;
    CHECK(lp::check_feasibility(model, sol.x).feasible);
    CHECK(sol.objective == Catch::Approx(ref.objective).margin(1e-7 * std::max(1.0, std::abs(ref.objective))));
  }
  CHECK(optimal > 50);
  CHECK(infeasible > 10);
}

TEST_CASE("warm start from an optimal basis needs no pivots", "[lp]") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto model = random_model(rng, 5, 4);
    const auto cold = lp::solve(model);
    if (cold.status != lp::Status::Optimal) continue;
    lp::SolveOptions opts;
    opts.warm_start = &cold.basis;
    const auto warm = lp::solve(model, opts);
    REQUIRE(warm.status == lp::Status::Optimal);
    CHECK(warm.warm_started);
    CHECK(warm.iterations == 0);
    CHECK(warm.objective == Catch::Approx(cold.objective).margin(1e-9));
  }
}

TEST_CASE("malformed warm start falls back to the slack basis", "[lp]") {
  lp::LpModel m;
  const int x = m.add_variable(0, 4, 1);
  m.add_row({{x, 1}}, Relation::LessEqual, 3);
  lp::Basis bad;
  bad.variables = {lp::BasisStatus::Basic};
  bad.rows = {lp::BasisStatus::Basic};
  lp::SolveOptions opts;
  opts.warm_start = &bad;
  const auto sol = lp::solve(m, opts);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK_FALSE(sol.warm_started);
  CHECK(sol.objective == Catch::Approx(3.0));
}

TEST_CASE("solutions are deterministic", "[lp]") {
  std::mt19937 rng(99);
  const auto model = random_model(rng, 6, 6);
  const auto a = lp::solve(model);
  const auto b = lp::solve(model);
  CHECK(a.status == b.status);
  CHECK(a.x == b.x);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("transportation problem with degenerate vertices", "[lp]") {
  // 3 sources x 3 sinks with equal supplies and demands: highly degenerate.
  lp::LpModel m;
  const double cost[3][3] = {{4, 6, 9}, {5, 3, 8}, {7, 5, 2}};
  int v[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v[i][j] = m.add_variable(0, lp::kInfinity, -cost[i][j]);
  for (int i = 0; i < 3; ++i) m.add_row({{v[i][0], 1}, {v[i][1], 1}, {v[i][2], 1}}, Relation::Equal, 10);
  for (int j = 0; j < 3; ++j) m.add_row({{v[0][j], 1}, {v[1][j], 1}, {v[2][j], 1}}, Relation::Equal, 10);
  const auto sol = lp::solve(m);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == Catch::Approx(-90.0));
}

TEST_CASE("LP writer emits all sections deterministically", "[lp][export]") {
  lp::LpModel m;
  const int x = m.add_variable(0, 4, 1.5, "x");
  const int y = m.add_variable(-lp::kInfinity, lp::kInfinity, -2, "y");
  const int z = m.add_binary("z");
  m.add_variable(3, 3, 0, "w");
  m.add_row({{x, 1}, {y, 1}, {z, -4}}, Relation::LessEqual, 2, "cap");
  std::ostringstream a;
  std::ostringstream b;
  lp::write_lp_format(m, a, "test");
  lp::write_lp_format(m, b, "test");
  CHECK(a.str() == b.str());
  const std::string s = a.str();
  CHECK(s.find("Maximize\n obj: 1.5 x - 2 y\n") != std::string::npos);
  CHECK(s.find(" cap: 1 x + 1 y - 4 z <= 2\n") != std::string::npos);
  CHECK(s.find(" 0 <= x <= 4\n") != std::string::npos);
  CHECK(s.find(" y free\n") != std::string::npos);
  CHECK(s.find(" w = 3\n") != std::string::npos);
  CHECK(s.find("Binary\n z\n") != std::string::npos);
  CHECK(s.substr(s.size() - 4) == "End\n");
}

TEST_CASE("long rows are wrapped", "[lp][export]") {
  lp::LpModel m;
  std::vector<lp::Term> terms;
  for (int j = 0; j < 200; ++j) terms.push_back({m.add_variable(0, 1, 1, "variable_" + std::to_string(j)), 1.0});
  m.add_row(std::move(terms), Relation::LessEqual, 1, "long");
  std::ostringstream out;
  lp::write_lp_format(m, out);
  std::istringstream lines(out.str());
  std::string line;
  while (std::getline(lines, line)) CHECK(line.size() <= 200);
}
