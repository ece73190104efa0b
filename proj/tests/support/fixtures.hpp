#pragma once

// Scenario builders shared by the unit, property and acceptance tests.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "recdr/core.hpp"

namespace recdr::testing {

inline EntitySpec make_entity(std::string id, std::vector<double> gen, std::vector<double> price, BessParams bess) {
  EntitySpec e;
  e.id = std::move(id);
  e.bess = bess;
  e.gen_forecast = Series{std::move(gen), Unit::Kwh};
  e.sell_price = Series{std::move(price), Unit::EurPerKwh};
  return e;
}

inline BessParams lossless(double capacity, double charge, double discharge) {
  BessParams b;
  b.capacity = capacity;
  b.max_charge_per_slot = charge;
  b.max_discharge_per_slot = discharge;
  return b;
}

inline Scenario make_scenario(int slots, std::vector<EntitySpec> entities, std::vector<DrRequest> requests = {},
                              double alpha = 0.5) {
  Scenario s;
  s.date = "test";
  s.grid = TimeGrid{slots, 0.25};
  s.entities = std::move(entities);
  s.non_sched_gen = Series::zeros(slots);
  s.loads = Series::zeros(slots);
  s.program.requests = std::move(requests);
  s.program.alpha = alpha;
  return s;
}

inline DrRequest make_request(int start, int end, double lo, double hi, double gamma_max) {
  return DrRequest{Interval{start, end}, lo, hi, gamma_max};
}

/// Desk-scale entity with integer data and a lossless battery, so that the
/// unit SOC grid of the oracle is exact.
inline EntitySpec random_integer_entity(std::mt19937& rng, int slots, const std::string& id) {
  std::uniform_int_distribution<int> gen(0, 3);
  std::uniform_int_distribution<int> price(0, 6);
  std::uniform_int_distribution<int> cap(0, 4);
  std::uniform_int_distribution<int> rate(1, 3);
  std::vector<double> g;
  std::vector<double> p;
  for (int t = 0; t < slots; ++t) {
    g.push_back(gen(rng));
    p.push_back(price(rng));
  }
  BessParams b = lossless(cap(rng), rate(rng), rate(rng));
  std::uniform_int_distribution<int> cost(0, 1);
  b.storage_op_cost = 0.25 * cost(rng);
  std::uniform_int_distribution<int> level(0, static_cast<int>(b.capacity));
  b.s_initial = level(rng);
  b.s_final = std::min<double>(level(rng), b.s_initial + 1);
  return make_entity(id, std::move(g), std::move(p), b);
}

/// Desk-scale entity with a lossy battery and prices in EUR/kWh.
inline EntitySpec random_lossy_entity(std::mt19937& rng, int slots, const std::string& id) {
  std::uniform_real_distribution<double> gen(0.0, 3.0);
  std::uniform_real_distribution<double> price(0.05, 0.4);
  std::uniform_real_distribution<double> eta(0.85, 0.99);
  std::uniform_int_distribution<int> cap(1, 4);
  std::vector<double> g;
  std::vector<double> p;
  for (int t = 0; t < slots; ++t) {
    g.push_back(std::round(gen(rng) * 4.0) / 4.0);
    p.push_back(price(rng));
  }
  BessParams b = lossless(cap(rng), 1.0, 1.0);
  b.eta_c = eta(rng);
  b.eta_d = eta(rng);
  b.storage_op_cost = 0.01;
  return make_entity(id, std::move(g), std::move(p), b);
}

/// Community day with a midday solar peak, an evening price peak and two
/// requests (08:00-09:00 and 18:00-19:00 for 96 slots of 15 minutes).
inline Scenario synthetic_community(int entities, int slots, unsigned seed, double gamma_scale = 1.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> peak(20.0, 60.0);
  std::uniform_real_distribution<double> size(40.0, 200.0);
  std::uniform_real_distribution<double> noise(0.9, 1.1);
  const double per_hour = slots / 24.0;
  std::vector<double> price(static_cast<std::size_t>(slots));
  for (int t = 0; t < slots; ++t) {
    const double h = t / per_hour;
    price[static_cast<std::size_t>(t)] =
        0.10 + 0.04 * std::sin(2.0 * M_PI * (h - 9.0) / 24.0) + 0.08 * std::exp(-std::pow((h - 19.0) / 2.0, 2));
  }
  std::vector<EntitySpec> list;
  for (int u = 0; u < entities; ++u) {
    const double pk = peak(rng);
    std::vector<double> gen(static_cast<std::size_t>(slots), 0.0);
    for (int t = 0; t < slots; ++t) {
      const double h = t / per_hour;
      if (h > 6.0 && h < 19.0) gen[static_cast<std::size_t>(t)] = pk * std::sin(M_PI * (h - 6.0) / 13.0) * noise(rng) / per_hour;
    }
    BessParams b;
    b.capacity = size(rng);
    b.max_charge_per_slot = b.capacity / (2.0 * per_hour);
    b.max_discharge_per_slot = b.capacity / (2.0 * per_hour);
    b.eta_c = 0.95;
    b.eta_d = 0.95;
    b.storage_op_cost = 0.01;
    std::vector<double> p = price;
    for (auto& x : p) x *= noise(rng);
    list.push_back(make_entity("E" + std::to_string(u + 1), std::move(gen), std::move(p), b));
  }
  const int r1 = static_cast<int>(8 * per_hour);
  const int r2 = static_cast<int>(18 * per_hour);
  const int len = std::max(1, static_cast<int>(per_hour));
  std::vector<DrRequest> req{make_request(r1, r1 + len, 0.0, 8.0 * entities, 65.0 * gamma_scale),
                             make_request(r2, r2 + len, -10.0 * entities, 15.0 * entities, 90.0 * gamma_scale)};
  Scenario s = make_scenario(slots, std::move(list), std::move(req), 0.85);
  s.date = "synthetic";
  s.grid.slot_hours = 24.0 / slots;
  for (int t = 0; t < slots; ++t) s.loads.values[static_cast<std::size_t>(t)] = 2.0 * entities / per_hour;
  return s;
}

}  // namespace recdr::testing
