#pragma once

// Step 3: the entities' share of the DR reward, xi = alpha * sum gamma, is
// split so that every entity ends with the same relative gain rho over its
// standalone baseline.

#include <span>
#include <vector>

#include "recdr/core.hpp"

namespace recdr {

/// Sum of baselines is zero or negative, so rho is undefined.
class SettlementError : public Error {
 public:
  using Error::Error;
};

enum class Redistribution { Proportional };

struct EntitySettlement {
  double xi = 0.0;      ///< EUR of reward assigned to the entity
  double profit = 0.0;  ///< J_u = Psi_u + xi_u
  double delta = 0.0;   ///< J_u - J_u0
  bool negative_xi = false;
};

struct Settlement {
  double baseline_total = 0.0;  ///< J_0
  double psi_total = 0.0;       ///< sum Psi_u
  double xi_total = 0.0;        ///< alpha * sum gamma_j
  double rho = 0.0;
  std::vector<EntitySettlement> entities;
};

/// rho = (Psi + xi - J_0) / J_0 and xi_u = (1 + rho) J_u0 - Psi_u. Throws
/// SettlementError when J_0 <= 0 or when the profit floor is violated.
Settlement settle(std::span<const double> baselines, std::span<const double> psi, std::span<const double> gamma,
                  double alpha, Redistribution rule = Redistribution::Proportional);

}  // namespace recdr
