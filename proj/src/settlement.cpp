#include "recdr/settlement.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace recdr {

Settlement settle(std::span<const double> baselines, std::span<const double> psi, std::span<const double> gamma,
                  double alpha, Redistribution rule) {
  if (baselines.size() != psi.size()) throw SettlementError("baseline and profit lists differ in length");
  Settlement s;
  s.baseline_total = std::accumulate(baselines.begin(), baselines.end(), 0.0);
  s.psi_total = std::accumulate(psi.begin(), psi.end(), 0.0);
  s.xi_total = alpha * std::accumulate(gamma.begin(), gamma.end(), 0.0);
  for (double b : baselines)
    if (!std::isfinite(b)) throw SettlementError("baseline profit is not finite");

  if (!(s.baseline_total > 0.0)) {
    std::ostringstream msg;
    msg << "total baseline profit is " << s.baseline_total
        << "; the proportional split needs a positive total (check prices and forecasts)";
    throw SettlementError(msg.str());
  }
  const double surplus = s.psi_total + s.xi_total - s.baseline_total;
  if (surplus < -1e-6 * std::max(1.0, std::abs(s.baseline_total))) {
    std::ostringstream msg;
    msg << "profit floor violated: sum psi + xi falls short of the baselines by " << -surplus;
    throw SettlementError(msg.str());
  }

  switch (rule) {
    case Redistribution::Proportional:
      s.rho = surplus / s.baseline_total;
      for (std::size_t u = 0; u < baselines.size(); ++u) {
        EntitySettlement e;
        e.profit = (1.0 + s.rho) * baselines[u];
        e.xi = e.profit - psi[u];
        e.delta = s.rho * baselines[u];
        e.negative_xi = e.xi < 0.0;
        s.entities.push_back(e);
      }
      break;
  }
  return s;
}

}  // namespace recdr
