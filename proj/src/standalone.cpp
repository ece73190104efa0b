#include "recdr/standalone.hpp"

#include <algorithm>

#include "parallel.hpp"

namespace recdr {

namespace {

std::string name(const char* prefix, int tag, int t) {
  if (tag == 0) return {};
  return std::string(prefix) + "_" + std::to_string(tag) + "_" + std::to_string(t);
}

double price_at(const EntitySpec& e, int t) {
#ifdef RECDR_FAULT_INJECTION
  // Negative-control build: prices read one slot late.
  const int T = static_cast<int>(e.sell_price.size());
  return e.sell_price[static_cast<std::size_t>((t + 1) % T)];
#else
  return e.sell_price[static_cast<std::size_t>(t)];
#endif
}

}  // namespace

std::vector<lp::Term> psi_terms(const EntityBlock& block, const EntitySpec& entity, double weight) {
  const auto& b = entity.bess;
  std::vector<lp::Term> terms;
  terms.reserve(static_cast<std::size_t>(3 * block.slots));
  for (int t = 0; t < block.slots; ++t) {
    terms.push_back({block.e_grid(t), weight * price_at(entity, t)});
    if (b.storage_op_cost != 0.0) {
      terms.push_back({block.e_charge(t), -weight * b.storage_op_cost * b.eta_c});
      terms.push_back({block.e_discharge(t), -weight * b.storage_op_cost / b.eta_d});
    }
  }
  return terms;
}

EntityBlock append_entity_block(lp::LpModel& model, const EntitySpec& entity, const TimeGrid& grid,
                                double psi_weight, int tag) {
  const int T = grid.slot_count;
  const auto& b = entity.bess;
  EntityBlock blk{model.num_variables(), model.num_rows(), T};

  for (int t = 0; t < T; ++t) model.add_variable(0.0, lp::kInfinity, 0.0, name("eg", tag, t));
  for (int t = 0; t < T; ++t) model.add_variable(0.0, b.max_charge_per_slot, 0.0, name("ec", tag, t));
  for (int t = 0; t < T; ++t) model.add_variable(0.0, b.max_discharge_per_slot, 0.0, name("ed", tag, t));
  for (int t = 0; t <= T; ++t) model.add_variable(0.0, b.capacity, 0.0, name("soc", tag, t));

  for (const auto& term : psi_terms(blk, entity, psi_weight)) model.add_objective(term.var, term.coef);

  for (int t = 0; t < T; ++t)
    model.add_row({{blk.soc(t + 1), 1.0}, {blk.soc(t), -1.0}, {blk.e_charge(t), -b.eta_c}, {blk.e_discharge(t), 1.0 / b.eta_d}},
                  lp::Relation::Equal, 0.0, name("dyn", tag, t));
  for (int t = 0; t < T; ++t)
    model.add_row({{blk.e_grid(t), 1.0}, {blk.e_charge(t), 1.0}, {blk.e_discharge(t), -1.0}}, lp::Relation::Equal,
                  entity.gen_forecast[static_cast<std::size_t>(t)], name("bal", tag, t));
  for (int t = 0; t < T; ++t)
    model.add_row({{blk.e_charge(t), 1.0}}, lp::Relation::LessEqual, entity.gen_forecast[static_cast<std::size_t>(t)],
                  name("nogrid", tag, t));
  model.add_row({{blk.soc(0), 1.0}}, lp::Relation::Equal, b.s_initial, tag ? "soc0_" + std::to_string(tag) : "");
  model.add_row({{blk.soc(T), 1.0}}, lp::Relation::Equal, b.s_final, tag ? "socT_" + std::to_string(tag) : "");
  return blk;
}

EntitySchedule extract_schedule(const EntityBlock& block, std::span<const double> x) {
  EntitySchedule s = EntitySchedule::zeros(block.slots);
  for (int t = 0; t < block.slots; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    s.e_grid[ut] = x[static_cast<std::size_t>(block.e_grid(t))];
    s.e_charge[ut] = x[static_cast<std::size_t>(block.e_charge(t))];
    s.e_discharge[ut] = x[static_cast<std::size_t>(block.e_discharge(t))];
  }
  for (int t = 0; t <= block.slots; ++t) s.soc[static_cast<std::size_t>(t)] = x[static_cast<std::size_t>(block.soc(t))];
  return s;
}

lp::LpModel build_problem1(const EntitySpec& entity, const TimeGrid& grid) {
  lp::LpModel model;
  append_entity_block(model, entity, grid, 1.0);
  return model;
}

StandaloneResult solve_standalone(const EntitySpec& entity, const TimeGrid& grid) {
  const lp::LpModel model = build_problem1(entity, grid);
  const lp::LpSolution sol = lp::solve(model);
  switch (sol.status) {
    case lp::Status::Optimal: break;
    case lp::Status::Infeasible:
      throw EntityInfeasibleError(entity.id, "entity " + entity.id + ": no feasible schedule (check terminal SOC)");
    default:
      throw SolverError("entity " + entity.id + ": standalone LP ended with status " + std::string(lp::to_string(sol.status)));
  }
  StandaloneResult r;
  const EntityBlock blk{0, 0, grid.slot_count};
  r.schedule = net_simultaneous_flows(extract_schedule(blk, sol.x), entity);
  r.profit = evaluate_psi(r.schedule, entity);
  r.basis = sol.basis;
  return r;
}

std::vector<StandaloneResult> solve_all_standalone(const Scenario& scenario, int workers) {
  std::vector<StandaloneResult> out(scenario.entities.size());
  detail::parallel_for(out.size(), workers,
                       [&](std::size_t u) { out[u] = solve_standalone(scenario.entities[u], scenario.grid); });
  return out;
}

EntitySchedule net_simultaneous_flows(const EntitySchedule& schedule, const EntitySpec& entity) {
  EntitySchedule s = schedule;
  const double round_trip = entity.bess.eta_c * entity.bess.eta_d;
  for (std::size_t t = 0; t < s.e_grid.size(); ++t) {
    double& c = s.e_charge[t];
    double& d = s.e_discharge[t];
    if (c <= 0.0 || d <= 0.0) continue;
    // Removing dc of charge and round_trip * dc of discharge leaves the SOC
    // step unchanged.
    double dc;
    if (c * round_trip <= d) {
      dc = c;
      d -= round_trip * c;
      c = 0.0;
    } else {
      dc = d / round_trip;
      c -= dc;
      d = 0.0;
    }
    s.e_grid[t] += dc * (1.0 - round_trip);
  }
  return s;
}

double evaluate_psi(const EntitySchedule& schedule, const EntitySpec& entity) {
  const auto& b = entity.bess;
  double psi = 0.0;
  for (std::size_t t = 0; t < schedule.e_grid.size(); ++t) {
    psi += entity.sell_price[t] * schedule.e_grid[t] -
           b.storage_op_cost * (b.eta_c * schedule.e_charge[t] + schedule.e_discharge[t] / b.eta_d);
  }
  return psi;
}

}  // namespace recdr
