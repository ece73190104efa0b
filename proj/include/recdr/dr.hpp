#pragma once

// Price-volume demand-response requests: the piecewise-linear reward, its
// three regimes and the big-M binary encoding used for MILP export.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recdr/core.hpp"
#include "recdr/lp.hpp"

namespace recdr {

/// Branch of the reward curve a request's energy falls into.
enum class Regime { Below = 0, Linear = 1, Above = 2 };

std::string_view to_string(Regime r);

/// Big-M constants for one request. m_energy deactivates the energy sandwich
/// rows, m_reward the constant-reward windows and m_interp the interpolation
/// window (whose free term grows with the energy range).
struct BigM {
  double m_energy = 0.0;  ///< kWh
  double m_reward = 0.0;  ///< EUR
  double m_interp = 0.0;  ///< EUR
};

/// gamma_max if e_dr >= e_hi, 0 if e_dr <= e_lo, linear in between.
double reward(double e_dr, const DrRequest& req);

/// Sum of the net injection over the request interval.
double compute_e_dr(std::span<const double> net_injection, const Interval& interval);

/// Regime containing e_dr; the lower regime wins at a breakpoint.
Regime classify(double e_dr, const DrRequest& req);

/// Upper bound on |E_DR| implied by the entity and aggregate bounds.
double energy_reach(const Scenario& s, const DrRequest& req);

BigM default_big_m(const Scenario& s, const DrRequest& req);
std::vector<BigM> default_big_m(const Scenario& s);

/// Variables and rows added by encode_bigm.
struct EncodedRequest {
  std::array<int, 3> z{};  ///< binaries for Below, Linear, Above
  int gamma = -1;
  std::vector<int> rows;   ///< sum row, 2 energy rows, 6 reward rows
};

/// Adds z_1..z_3, gamma and the nine encoding rows tying gamma to the energy
/// variable `e_dr`. `number` is the 1-based request index used in names.
EncodedRequest encode_bigm(lp::LpModel& model, int e_dr, const DrRequest& req, const BigM& big_m, int number);

enum class Objective;

/// Writes the complete community MILP in LP file format. `baseline_total` is
/// the right-hand side of the profit floor. Missing big-M values default to
/// default_big_m.
std::string export_milp(const Scenario& s, Objective objective, double baseline_total,
                        std::span<const BigM> big_m = {});

}  // namespace recdr
