#include <catch_amalgamated.hpp>

#include <random>

#include "recdr/settlement.hpp"

using namespace recdr;

TEST_CASE("two entities share the surplus proportionally", "[settlement]") {
  const double base[] = {100, 50};
  const double psi[] = {90, 55};
  const double gamma[] = {40};  // alpha 0.5 -> xi = 20
  const auto s = settle(base, psi, gamma, 0.5);
  CHECK(s.baseline_total == 150);
  CHECK(s.psi_total == 145);
  CHECK(s.xi_total == 20);
  CHECK(s.rho == Catch::Approx(0.1));
  CHECK(s.entities[0].xi == Catch::Approx(20));
  CHECK(s.entities[1].xi == Catch::Approx(0).margin(1e-12));
  CHECK(s.entities[0].profit == Catch::Approx(110));
  CHECK(s.entities[1].profit == Catch::Approx(55));
  CHECK(s.entities[0].delta == Catch::Approx(10));
  CHECK(s.entities[1].delta == Catch::Approx(5));
}

TEST_CASE("no reward and unchanged profits is a fixed point", "[settlement]") {
  const double base[] = {3, 4, 5};
  const auto s = settle(base, base, std::span<const double>{}, 0.85);
  CHECK(s.rho == 0.0);
  for (std::size_t u = 0; u < 3; ++u) {
    CHECK(s.entities[u].xi == 0.0);
    CHECK(s.entities[u].profit == base[u]);
  }
}

TEST_CASE("a single entity receives the whole share", "[settlement]") {
  const double base[] = {100};
  const double psi[] = {95};
  const double gamma[] = {4, 16};
  const auto s = settle(base, psi, gamma, 0.5);
  CHECK(s.rho == Catch::Approx(0.05));
  CHECK(s.entities[0].xi == Catch::Approx(10));
  CHECK(s.entities[0].profit == Catch::Approx(105));
}

TEST_CASE("negative shares are reported, not clamped", "[settlement]") {
  const double base[] = {100, 100};
  const double psi[] = {130, 80};
  const double gamma[] = {0};
  const auto s = settle(base, psi, gamma, 0.5);
  CHECK(s.rho == Catch::Approx(0.05));
  CHECK(s.entities[0].xi == Catch::Approx(-25));
  CHECK(s.entities[0].negative_xi);
  CHECK_FALSE(s.entities[1].negative_xi);
}

TEST_CASE("undefined ratio and violated floor are rejected", "[settlement]") {
  const double zero[] = {0, 0};
  const double psi[] = {1, 1};
  CHECK_THROWS_AS(settle(zero, psi, std::span<const double>{}, 0.5), SettlementError);
  const double base[] = {10, 10};
  const double low[] = {5, 5};
  CHECK_THROWS_AS(settle(base, low, std::span<const double>{}, 0.5), SettlementError);
}

TEST_CASE("settlement identities on random inputs", "[settlement][property]") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::uniform_real_distribution<double> shift(-20.0, 20.0);
  std::uniform_int_distribution<int> n(1, 8);
  for (int k = 0; k < 500; ++k) {
    const int U = n(rng);
    std::vector<double> base, psi, gamma;
    for (int i = 0; i < U; ++i) {
      base.push_back(u(rng) + 1.0);
      psi.push_back(std::max(0.0, base.back() + shift(rng)));
    }
    const double alpha = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    double j0 = 0.0, ps = 0.0;
    for (int i = 0; i < U; ++i) j0 += base[i], ps += psi[i];
    // enough reward to satisfy the floor
    gamma.push_back(std::max(0.0, (j0 - ps) / alpha) + u(rng));
    const auto s = settle(base, psi, gamma, alpha);
    double xi = 0.0;
    CHECK(s.rho >= -1e-9);
    for (int i = 0; i < U; ++i) {
      const auto& e = s.entities[i];
      xi += e.xi;
      CHECK(e.profit == Catch::Approx((1 + s.rho) * base[i]).epsilon(1e-9));
      CHECK(e.profit == Catch::Approx(psi[i] + e.xi).epsilon(1e-9));
      CHECK(e.delta == Catch::Approx(s.rho * base[i]).epsilon(1e-9).margin(1e-12));
      CHECK(e.profit >= base[i] - 1e-6);
      CHECK(e.delta / base[i] == Catch::Approx(s.rho).margin(1e-9));
    }
    CHECK(xi == Catch::Approx(s.xi_total).epsilon(1e-9).margin(1e-9));
  }
}
