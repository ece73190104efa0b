#pragma once

// Brute-force reference solvers for desk-scale instances. None of this code
// calls the simplex or the community solver; the reward curve and the profit
// are re-implemented here on purpose.

#include <cstdint>
#include <span>
#include <vector>

#include "recdr/community.hpp"
#include "recdr/core.hpp"
#include "recdr/dr.hpp"
#include "recdr/lp.hpp"

namespace recdr::oracle {

/// Instance too large for exhaustive search.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kMaxStandaloneSlots = 8;
inline constexpr std::int64_t kMaxGridNodes = 10'000'000;

struct StandaloneOracle {
  bool found = false;
  double profit = 0.0;  ///< best profit over the SOC grid; a lower bound on J_u0
  double gap = 0.0;     ///< bound on J_u0 - profit (0 when the grid is exact)
  EntitySchedule schedule;
};

/// Dynamic programming over the SOC levels {k / steps_per_unit} plus the two
/// endpoint levels. The grid is exact (gap 0) for lossless batteries whose
/// data all lie on the grid; otherwise the gap is a Lipschitz estimate.
StandaloneOracle brute_force_standalone(const EntitySpec& entity, const TimeGrid& grid, int steps_per_unit);

inline constexpr int kMaxCommunityEntities = 2;
inline constexpr int kMaxCommunitySlots = 6;
inline constexpr int kMaxCommunityRequests = 2;

struct CommunityOracle {
  bool found = false;
  double objective = 0.0;  ///< best H over the discretized schedules
  double sum_gamma = 0.0;
  double psi_total = 0.0;
  double gap = 0.0;        ///< Lipschitz estimate of the discretization loss
  std::int64_t candidates = 0;
};

/// Exhaustive search over products of discretized per-entity schedules with
/// the exact reward curve, subject to the profit floor.
CommunityOracle brute_force_community(const Scenario& s, Objective objective, std::span<const double> baselines,
                                      int steps_per_unit);

struct EncodingCheck {
  bool ok = false;
  double expected = 0.0;   ///< reward curve at e_dr
  double max_gamma = 0.0;  ///< largest gamma admitted by a feasible z
  double deviation = 0.0;
  int feasible_regimes = 0;
};

/// Fixes e_dr and each unit z vector in the big-M rows and intersects the
/// resulting gamma windows. Passes when the best window top matches the
/// reward curve and every feasible window contains it.
EncodingCheck check_encoding(const DrRequest& req, double e_dr, const BigM& big_m, double tol = 1e-6);

struct VertexOracle {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
  std::int64_t bases_tried = 0;
};

/// Maximizes over all basic solutions of a small LP with finite bounds
/// (n <= 6, rows <= 6) by solving every n-subset of active constraints.
VertexOracle enumerate_vertices(const lp::LpModel& model);

/// Independent summation of a series over an interval.
double interval_sum(std::span<const double> series, const Interval& interval);

}  // namespace recdr::oracle
