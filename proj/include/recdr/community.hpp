#pragma once

// Step 2: joint schedule of all entities under the DR program. The reward
// makes the problem a MILP with 3R binaries; it is solved exactly by
// enumerating the 3^R regime tuples, each of which leaves an LP.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "recdr/core.hpp"
#include "recdr/dr.hpp"
#include "recdr/lp.hpp"
#include "recdr/standalone.hpp"

namespace recdr {

enum class Objective {
  EntitiesInterest,  ///< H_E = sum Psi_u + alpha sum gamma_j
  ManagerInterest,   ///< H_M = (1 - alpha) sum gamma_j
};

/// "entities" / "manager"
std::string_view to_string(Objective o);
std::optional<Objective> parse_objective(std::string_view name);

inline constexpr int kMaxRequests = 10;

/// More requests than the enumeration handles; use the MILP export instead.
class TooManyRequestsError : public Error {
 public:
  using Error::Error;
};

struct CommunitySolution {
  std::vector<EntitySchedule> schedules;
  std::vector<double> psi;            ///< EUR per entity
  std::vector<double> gamma;          ///< EUR per request
  std::vector<Regime> regime;         ///< per request, from the final e_dr
  std::vector<double> e_dr;           ///< kWh per request
  std::vector<double> net_injection;  ///< kWh per slot
  double objective_value = 0.0;       ///< H recomputed from the schedules
  double baseline_total = 0.0;        ///< J_0
  std::vector<Regime> winning_tuple;  ///< regime tuple of the selected LP
  int lps_solved = 0;
  std::int64_t simplex_iterations = 0;
};

/// Variable and row positions of a regime LP.
struct RegimeLayout {
  std::vector<EntityBlock> entities;
  int first_net = 0;  ///< E^n(t) columns, one per slot
  int first_edr = 0;  ///< E_DR columns, one per request
  int first_net_row = 0;
  int first_edr_row = 0;
  int first_extra_row = 0;  ///< regime range rows followed by the floor row
  int floor_row = 0;
};

/// LP for a fixed regime tuple: gamma_j is replaced by 0, its affine
/// expression in E_DR, or gamma_max, and E_DR is confined to the regime's
/// range. Includes the profit floor sum Psi + alpha sum gamma >= J_0.
lp::LpModel build_regime_lp(const Scenario& s, Objective objective, double baseline_total,
                            std::span<const Regime> regimes, RegimeLayout* layout = nullptr);

struct CommunityOptions {
  int workers = 1;
};

/// Globally optimal Problem 2 solution. Ties between tuples go to the
/// lexicographically smallest tuple. Under H_M the sum of Psi is maximized
/// as a second objective over the winning tuple.
CommunitySolution solve_community(const Scenario& s, Objective objective,
                                  std::span<const StandaloneResult> baselines, const CommunityOptions& options = {});

/// Same, for callers holding only the baseline profits (no warm starts).
CommunitySolution solve_community(const Scenario& s, Objective objective, std::span<const double> baselines,
                                  const CommunityOptions& options = {});

/// H evaluated from Psi and gamma values.
double objective_value(Objective objective, double alpha, std::span<const double> psi, std::span<const double> gamma);

}  // namespace recdr
