#include "recdr/dr.hpp"

#include <cmath>
#include <sstream>

#include "recdr/community.hpp"
#include "recdr/standalone.hpp"

namespace recdr {

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Below: return "below";
    case Regime::Linear: return "linear";
    case Regime::Above: return "above";
  }
  return "unknown";
}

double reward(double e_dr, const DrRequest& req) {
  if (e_dr >= req.e_hi) return req.gamma_max;
  if (e_dr <= req.e_lo) return 0.0;
  return req.gamma_max * (e_dr - req.e_lo) / (req.e_hi - req.e_lo);
}

double compute_e_dr(std::span<const double> net_injection, const Interval& interval) {
  double sum = 0.0;
  for (int t = interval.start_slot; t < interval.end_slot; ++t) sum += net_injection[static_cast<std::size_t>(t)];
  return sum;
}

Regime classify(double e_dr, const DrRequest& req) {
  if (e_dr <= req.e_lo) return Regime::Below;
  if (e_dr <= req.e_hi) return Regime::Linear;
  return Regime::Above;
}

double energy_reach(const Scenario& s, const DrRequest& req) {
  double reach = 0.0;
  for (int t = req.interval.start_slot; t < req.interval.end_slot; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    for (const auto& e : s.entities) reach += e.gen_forecast[ut] + e.bess.max_discharge_per_slot;
    reach += s.non_sched_gen[ut] + s.loads[ut];
  }
  return reach;
}

BigM default_big_m(const Scenario& s, const DrRequest& req) {
  const double reach = energy_reach(s, req);
  BigM m;
  m.m_energy = 2.0 * (reach + std::abs(req.e_lo) + std::abs(req.e_hi));
  m.m_reward = 2.0 * req.gamma_max;
  m.m_interp = 2.0 * (req.gamma_max + req.gamma_max * (reach + std::abs(req.e_lo)) / (req.e_hi - req.e_lo));
  return m;
}

std::vector<BigM> default_big_m(const Scenario& s) {
  std::vector<BigM> out;
  out.reserve(s.program.requests.size());
  for (const auto& r : s.program.requests) out.push_back(default_big_m(s, r));
  return out;
}

EncodedRequest encode_bigm(lp::LpModel& model, int e_dr, const DrRequest& req, const BigM& big_m, int number) {
  using lp::Relation;
  const std::string j = std::to_string(number);
  EncodedRequest enc;
  for (int k = 0; k < 3; ++k) enc.z[static_cast<std::size_t>(k)] = model.add_binary("z_" + j + "_" + std::to_string(k + 1));
  enc.gamma = model.add_variable(-lp::kInfinity, lp::kInfinity, 0.0, "gam_" + j);
  const auto [z1, z2, z3] = enc.z;
  const int g = enc.gamma;
  const double me = big_m.m_energy;
  const double mr = big_m.m_reward;
  const double mi = big_m.m_interp;
  const double slope = req.gamma_max / (req.e_hi - req.e_lo);

  auto& rows = enc.rows;
  rows.push_back(model.add_row({{z1, 1.0}, {z2, 1.0}, {z3, 1.0}}, Relation::Equal, 1.0, "zsum_" + j));
  rows.push_back(model.add_row({{e_dr, 1.0}, {z1, me}, {z2, -req.e_lo}, {z3, -req.e_hi}}, Relation::GreaterEqual, 0.0,
                               "elo_" + j));
  rows.push_back(model.add_row({{e_dr, 1.0}, {z1, -req.e_lo}, {z2, -req.e_hi}, {z3, -me}}, Relation::LessEqual, 0.0,
                               "ehi_" + j));
  rows.push_back(model.add_row({{g, 1.0}, {z3, -mr}}, Relation::GreaterEqual, req.gamma_max - mr, "gabove_lo_" + j));
  rows.push_back(model.add_row({{g, 1.0}, {z3, mr}}, Relation::LessEqual, req.gamma_max + mr, "gabove_hi_" + j));
  rows.push_back(model.add_row({{g, 1.0}, {e_dr, -slope}, {z2, -mi}}, Relation::GreaterEqual, -slope * req.e_lo - mi,
                               "glinear_lo_" + j));
  rows.push_back(model.add_row({{g, 1.0}, {e_dr, -slope}, {z2, mi}}, Relation::LessEqual, -slope * req.e_lo + mi,
                               "glinear_hi_" + j));
  rows.push_back(model.add_row({{g, 1.0}, {z1, -mr}}, Relation::GreaterEqual, -mr, "gbelow_lo_" + j));
  rows.push_back(model.add_row({{g, 1.0}, {z1, mr}}, Relation::LessEqual, mr, "gbelow_hi_" + j));
  return enc;
}

std::string export_milp(const Scenario& s, Objective objective, double baseline_total, std::span<const BigM> big_m) {
  const int T = s.grid.slot_count;
  const int R = static_cast<int>(s.program.requests.size());
  const double alpha = s.program.alpha;
  lp::LpModel model;

  const double psi_weight = objective == Objective::EntitiesInterest ? 1.0 : 0.0;
  std::vector<EntityBlock> blocks;
  for (std::size_t u = 0; u < s.entities.size(); ++u)
    blocks.push_back(append_entity_block(model, s.entities[u], s.grid, psi_weight, static_cast<int>(u) + 1));

  std::vector<int> en(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) en[static_cast<std::size_t>(t)] = model.add_variable(-lp::kInfinity, lp::kInfinity, 0.0, "en_" + std::to_string(t));
  for (int t = 0; t < T; ++t) {
    std::vector<lp::Term> terms{{en[static_cast<std::size_t>(t)], 1.0}};
    for (const auto& b : blocks) terms.push_back({b.e_grid(t), -1.0});
    const auto ut = static_cast<std::size_t>(t);
    model.add_row(std::move(terms), lp::Relation::Equal, s.non_sched_gen[ut] - s.loads[ut], "net_" + std::to_string(t));
  }

  std::vector<lp::Term> floor;
  for (std::size_t u = 0; u < blocks.size(); ++u) {
    const auto terms = psi_terms(blocks[u], s.entities[u]);
    floor.insert(floor.end(), terms.begin(), terms.end());
  }

  for (int j = 0; j < R; ++j) {
    const auto& req = s.program.requests[static_cast<std::size_t>(j)];
    const std::string name = std::to_string(j + 1);
    const int edr = model.add_variable(-lp::kInfinity, lp::kInfinity, 0.0, "edr_" + name);
    std::vector<lp::Term> terms{{edr, 1.0}};
    for (int t = req.interval.start_slot; t < req.interval.end_slot; ++t) terms.push_back({en[static_cast<std::size_t>(t)], -1.0});
    model.add_row(std::move(terms), lp::Relation::Equal, 0.0, "edrsum_" + name);

    const BigM m = static_cast<std::size_t>(j) < big_m.size() ? big_m[static_cast<std::size_t>(j)] : default_big_m(s, req);
    const EncodedRequest enc = encode_bigm(model, edr, req, m, j + 1);
    model.set_objective(enc.gamma, objective == Objective::EntitiesInterest ? alpha : 1.0 - alpha);
    floor.push_back({enc.gamma, alpha});
  }
  model.add_row(std::move(floor), lp::Relation::GreaterEqual, baseline_total, "floor");

  std::ostringstream out;
  const std::string comment = "community schedule " + s.date + ", objective " + std::string(to_string(objective));
  lp::write_lp_format(model, out, comment);
  return out.str();
}

}  // namespace recdr
