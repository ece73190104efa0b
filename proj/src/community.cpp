#include "recdr/community.hpp"

#include <cmath>
#include <numeric>

#include "parallel.hpp"

namespace recdr {

std::string_view to_string(Objective o) {
  return o == Objective::EntitiesInterest ? "entities" : "manager";
}

std::optional<Objective> parse_objective(std::string_view name) {
  if (name == "entities") return Objective::EntitiesInterest;
  if (name == "manager") return Objective::ManagerInterest;
  return std::nullopt;
}

double objective_value(Objective objective, double alpha, std::span<const double> psi, std::span<const double> gamma) {
  const double sum_gamma = std::accumulate(gamma.begin(), gamma.end(), 0.0);
  if (objective == Objective::ManagerInterest) return (1.0 - alpha) * sum_gamma;
  return std::accumulate(psi.begin(), psi.end(), 0.0) + alpha * sum_gamma;
}

namespace {

// gamma_j = constant + slope * E_DR_j within a regime.
struct RewardForm {
  double constant = 0.0;
  double slope = 0.0;
};

RewardForm reward_form(const DrRequest& req, Regime r) {
  switch (r) {
    case Regime::Below: return {};
    case Regime::Above: return {req.gamma_max, 0.0};
    case Regime::Linear: {
      const double slope = req.gamma_max / (req.e_hi - req.e_lo);
      return {-slope * req.e_lo, slope};
    }
  }
  return {};
}

std::vector<Regime> tuple_at(std::size_t index, int requests) {
  std::vector<Regime> tuple(static_cast<std::size_t>(requests));
  for (int j = requests - 1; j >= 0; --j) {
    tuple[static_cast<std::size_t>(j)] = static_cast<Regime>(index % 3);
    index /= 3;
  }
  return tuple;
}

lp::Basis warm_basis(const lp::LpModel& model, const RegimeLayout& layout, std::span<const StandaloneResult> baselines) {
  lp::Basis b;
  b.variables.assign(static_cast<std::size_t>(model.num_variables()), lp::BasisStatus::Basic);
  b.rows.assign(static_cast<std::size_t>(model.num_rows()), lp::BasisStatus::Basic);
  for (std::size_t u = 0; u < layout.entities.size(); ++u) {
    const auto& blk = layout.entities[u];
    const auto& sb = baselines[u].basis;
    std::copy(sb.variables.begin(), sb.variables.end(), b.variables.begin() + blk.first_var);
    std::copy(sb.rows.begin(), sb.rows.end(), b.rows.begin() + blk.first_row);
  }
  // E^n and E_DR are basic; their defining rows are tight.
  std::fill(b.rows.begin() + layout.first_net_row, b.rows.begin() + layout.first_extra_row, lp::BasisStatus::AtLower);
  return b;
}

}  // namespace

lp::LpModel build_regime_lp(const Scenario& s, Objective objective, double baseline_total,
                            std::span<const Regime> regimes, RegimeLayout* layout_out) {
  const int T = s.grid.slot_count;
  const int R = static_cast<int>(s.program.requests.size());
  const double alpha = s.program.alpha;
  const bool entities = objective == Objective::EntitiesInterest;
  const double gamma_weight = entities ? alpha : 1.0 - alpha;

  lp::LpModel model;
  RegimeLayout layout;
  for (const auto& e : s.entities) layout.entities.push_back(append_entity_block(model, e, s.grid, entities ? 1.0 : 0.0));

  layout.first_net = model.num_variables();
  for (int t = 0; t < T; ++t) model.add_variable(-lp::kInfinity, lp::kInfinity);
  layout.first_edr = model.num_variables();
  for (int j = 0; j < R; ++j) model.add_variable(-lp::kInfinity, lp::kInfinity);

  layout.first_net_row = model.num_rows();
  for (int t = 0; t < T; ++t) {
    std::vector<lp::Term> terms{{layout.first_net + t, 1.0}};
    for (const auto& b : layout.entities) terms.push_back({b.e_grid(t), -1.0});
    const auto ut = static_cast<std::size_t>(t);
    model.add_row(std::move(terms), lp::Relation::Equal, s.non_sched_gen[ut] - s.loads[ut]);
  }
  layout.first_edr_row = model.num_rows();
  for (int j = 0; j < R; ++j) {
    const auto& iv = s.program.requests[static_cast<std::size_t>(j)].interval;
    std::vector<lp::Term> terms{{layout.first_edr + j, 1.0}};
    for (int t = iv.start_slot; t < iv.end_slot; ++t) terms.push_back({layout.first_net + t, -1.0});
    model.add_row(std::move(terms), lp::Relation::Equal, 0.0);
  }

  layout.first_extra_row = model.num_rows();
  std::vector<lp::Term> floor;
  for (std::size_t u = 0; u < s.entities.size(); ++u) {
    const auto terms = psi_terms(layout.entities[u], s.entities[u]);
    floor.insert(floor.end(), terms.begin(), terms.end());
  }
  double floor_rhs = baseline_total;
  for (int j = 0; j < R; ++j) {
    const auto& req = s.program.requests[static_cast<std::size_t>(j)];
    const Regime r = regimes[static_cast<std::size_t>(j)];
    const int edr = layout.first_edr + j;
    if (r != Regime::Above) model.add_row({{edr, 1.0}}, lp::Relation::LessEqual, r == Regime::Below ? req.e_lo : req.e_hi);
    if (r != Regime::Below) model.add_row({{edr, 1.0}}, lp::Relation::GreaterEqual, r == Regime::Above ? req.e_hi : req.e_lo);

    const RewardForm f = reward_form(req, r);
    model.objective_offset += gamma_weight * f.constant;
    floor_rhs -= alpha * f.constant;
    if (f.slope != 0.0) {
      model.add_objective(edr, gamma_weight * f.slope);
      floor.push_back({edr, alpha * f.slope});
    }
  }
  layout.floor_row = model.add_row(std::move(floor), lp::Relation::GreaterEqual, floor_rhs);

  if (layout_out) *layout_out = std::move(layout);
  return model;
}

namespace {

struct TupleResult {
  lp::Status status = lp::Status::Infeasible;
  double objective = 0.0;
  std::vector<double> x;
  lp::Basis basis;
  std::int64_t iterations = 0;
};

lp::LpSolution solve_with_fallback(const lp::LpModel& model, const lp::Basis* warm) {
  lp::SolveOptions opts;
  opts.warm_start = warm;
  lp::LpSolution sol = lp::solve(model, opts);
  if (warm && sol.status != lp::Status::Optimal && sol.status != lp::Status::Infeasible) {
    const std::int64_t spent = sol.iterations;
    sol = lp::solve(model);
    sol.iterations += spent;
  }
  return sol;
}

CommunitySolution solve_impl(const Scenario& s, Objective objective, std::span<const double> baselines,
                             std::span<const StandaloneResult> warm, const CommunityOptions& options) {
  const int R = static_cast<int>(s.program.requests.size());
  if (R > kMaxRequests)
    throw TooManyRequestsError(std::to_string(R) + " DR requests exceed the enumeration limit of " +
                               std::to_string(kMaxRequests) + "; use export-milp with an external MILP solver");
  if (baselines.size() != s.entities.size()) throw Error("one baseline profit per entity is required");

  const double j0 = std::accumulate(baselines.begin(), baselines.end(), 0.0);
  std::size_t tuples = 1;
  for (int j = 0; j < R; ++j) tuples *= 3;

  std::vector<TupleResult> results(tuples);
  detail::parallel_for(tuples, options.workers, [&](std::size_t k) {
    const auto regimes = tuple_at(k, R);
    RegimeLayout layout;
    const lp::LpModel model = build_regime_lp(s, objective, j0, regimes, &layout);
    lp::Basis basis;
    if (!warm.empty()) basis = warm_basis(model, layout, warm);
    const lp::LpSolution sol = solve_with_fallback(model, warm.empty() ? nullptr : &basis);
    auto& r = results[k];
    r.status = sol.status;
    r.objective = sol.objective;
    r.iterations = sol.iterations;
    if (sol.status == lp::Status::Optimal) {
      r.x = sol.x;
      r.basis = sol.basis;
    }
  });

  CommunitySolution out;
  out.baseline_total = j0;
  out.lps_solved = static_cast<int>(tuples);
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < tuples; ++k) {
    const auto& r = results[k];
    out.simplex_iterations += r.iterations;
    if (r.status == lp::Status::Infeasible) continue;
    if (r.status != lp::Status::Optimal)
      throw SolverError("regime LP " + std::to_string(k) + " ended with status " + std::string(lp::to_string(r.status)));
    if (!best || r.objective > results[*best].objective + 1e-9 * std::max(1.0, std::abs(results[*best].objective)))
      best = k;
  }
  if (!best) throw SolverError("community problem infeasible for every regime tuple");

  out.winning_tuple = tuple_at(*best, R);
  RegimeLayout layout;
  lp::LpModel model = build_regime_lp(s, objective, j0, out.winning_tuple, &layout);
  std::vector<double> x = results[*best].x;

  if (objective == Objective::ManagerInterest) {
    // Among H_M optima, keep the one with the largest total sale profit.
    const double h_star = results[*best].objective;
    std::vector<lp::Term> h_terms;
    for (int j = 0; j < model.num_variables(); ++j) {
      const double c = model.variable(j).objective;
      if (c != 0.0) h_terms.push_back({j, c});
      model.set_objective(j, 0.0);
    }
    const double tol = 1e-9 * std::max(1.0, std::abs(h_star));
    model.add_row(std::move(h_terms), lp::Relation::GreaterEqual, h_star - tol - model.objective_offset);
    model.objective_offset = 0.0;
    for (std::size_t u = 0; u < s.entities.size(); ++u)
      for (const auto& t : psi_terms(layout.entities[u], s.entities[u])) model.add_objective(t.var, t.coef);

    lp::Basis basis = results[*best].basis;
    basis.rows.push_back(lp::BasisStatus::Basic);
    const lp::LpSolution sol = solve_with_fallback(model, &basis);
    out.simplex_iterations += sol.iterations;
    ++out.lps_solved;
    if (sol.status == lp::Status::Optimal) x = sol.x;
  }

  const int T = s.grid.slot_count;
  out.net_injection.assign(static_cast<std::size_t>(T), 0.0);
  for (int t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    out.net_injection[ut] = s.non_sched_gen[ut] - s.loads[ut];
  }
  for (std::size_t u = 0; u < s.entities.size(); ++u) {
    EntitySchedule sch = net_simultaneous_flows(extract_schedule(layout.entities[u], x), s.entities[u]);
    for (int t = 0; t < T; ++t) out.net_injection[static_cast<std::size_t>(t)] += sch.e_grid[static_cast<std::size_t>(t)];
    out.psi.push_back(evaluate_psi(sch, s.entities[u]));
    out.schedules.push_back(std::move(sch));
  }
  for (const auto& req : s.program.requests) {
    const double e = compute_e_dr(out.net_injection, req.interval);
    out.e_dr.push_back(e);
    out.gamma.push_back(reward(e, req));
    out.regime.push_back(classify(e, req));
  }
  out.objective_value = objective_value(objective, s.program.alpha, out.psi, out.gamma);
  return out;
}

}  // namespace

CommunitySolution solve_community(const Scenario& s, Objective objective, std::span<const StandaloneResult> baselines,
                                  const CommunityOptions& options) {
  std::vector<double> profits;
  for (const auto& b : baselines) profits.push_back(b.profit);
  bool usable = baselines.size() == s.entities.size();
  for (const auto& b : baselines) usable = usable && !b.basis.variables.empty();
  return solve_impl(s, objective, profits, usable ? baselines : std::span<const StandaloneResult>{}, options);
}

CommunitySolution solve_community(const Scenario& s, Objective objective, std::span<const double> baselines,
                                  const CommunityOptions& options) {
  return solve_impl(s, objective, baselines, {}, options);
}

}  // namespace recdr
