#pragma once

// Step 1: each entity schedules its battery on its own to maximize the sale
// profit Psi_u. The optimum J_u0 is the baseline that the community must
// guarantee.

#include <span>
#include <string>
#include <vector>

#include "recdr/core.hpp"
#include "recdr/lp.hpp"

namespace recdr {

class SolverError : public Error {
 public:
  using Error::Error;
};

/// Problem 1 has no feasible schedule for this entity.
class EntityInfeasibleError : public SolverError {
 public:
  EntityInfeasibleError(std::string entity, const std::string& what)
      : SolverError(what), entity_(std::move(entity)) {}
  const std::string& entity() const { return entity_; }

 private:
  std::string entity_;
};

/// Column and row positions of one entity's variables inside a larger model.
/// Columns are e_grid[0..T), e_charge[0..T), e_discharge[0..T), soc[0..T];
/// rows are dynamics[0..T), balance[0..T), no-grid-charge[0..T), soc(0), soc(T).
struct EntityBlock {
  int first_var = 0;
  int first_row = 0;
  int slots = 0;

  int e_grid(int t) const { return first_var + t; }
  int e_charge(int t) const { return first_var + slots + t; }
  int e_discharge(int t) const { return first_var + 2 * slots + t; }
  int soc(int t) const { return first_var + 3 * slots + t; }
  int num_vars() const { return 4 * slots + 1; }
  int num_rows() const { return 3 * slots + 2; }
};

/// Appends the variables and rows of Problem 1 for one entity. Psi_u is added
/// to the objective with the given weight. `tag` (1-based entity number) is
/// used in variable names; 0 leaves them unnamed.
EntityBlock append_entity_block(lp::LpModel& model, const EntitySpec& entity, const TimeGrid& grid,
                                double psi_weight, int tag = 0);

/// Linear expression of Psi_u over the block's variables.
std::vector<lp::Term> psi_terms(const EntityBlock& block, const EntitySpec& entity, double weight = 1.0);

EntitySchedule extract_schedule(const EntityBlock& block, std::span<const double> x);

lp::LpModel build_problem1(const EntitySpec& entity, const TimeGrid& grid);

struct StandaloneResult {
  EntitySchedule schedule;
  double profit = 0.0;  ///< J_u0, equal to Psi_u of the schedule
  lp::Basis basis;      ///< optimal basis of Problem 1, reused as a warm start
};

/// Solves Problem 1 and nets simultaneous charge and discharge. Throws
/// EntityInfeasibleError naming the entity when no schedule exists, and
/// SolverError on numerical trouble.
StandaloneResult solve_standalone(const EntitySpec& entity, const TimeGrid& grid);

/// Solves every entity of the scenario, using up to `workers` threads.
std::vector<StandaloneResult> solve_all_standalone(const Scenario& scenario, int workers = 1);

/// Removes simultaneous charging and discharging slot by slot. The state of
/// charge trajectory is unchanged; the freed energy goes to the grid.
EntitySchedule net_simultaneous_flows(const EntitySchedule& schedule, const EntitySpec& entity);

/// Psi_u = sum_t [ price(t) e_grid(t) - storage_cost (eta_c e_charge(t) + e_discharge(t) / eta_d) ].
double evaluate_psi(const EntitySchedule& schedule, const EntitySpec& entity);

}  // namespace recdr
