#include "recdr/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace recdr {

namespace {

constexpr double kReachTol = 1e-9;

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void add(std::vector<Finding>& out, Severity sev, std::string subject, std::string rule) {
  out.push_back(Finding{sev, std::move(subject), std::move(rule)});
}

}  // namespace

double EntitySpec::charge_limit(int t) const {
  return std::min(bess.max_charge_per_slot, std::max(0.0, gen_forecast[static_cast<std::size_t>(t)]));
}

EntitySchedule EntitySchedule::zeros(int slots) {
  const auto n = static_cast<std::size_t>(slots);
  return EntitySchedule{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                        std::vector<double>(n, 0.0), std::vector<double>(n + 1, 0.0)};
}

std::string Finding::to_string() const {
  return std::string(severity == Severity::Error ? "error" : "warning") + ": " + subject + ": " + rule;
}

bool has_errors(std::span<const Finding> findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::Error; });
}

std::vector<SocBand> reachable_soc(const EntitySpec& e, const TimeGrid& grid) {
  const auto& b = e.bess;
  std::vector<SocBand> bands;
  bands.reserve(static_cast<std::size_t>(grid.slot_count) + 1);
  bands.push_back({b.s_initial, b.s_initial});
  for (int t = 0; t < grid.slot_count; ++t) {
    const SocBand& prev = bands.back();
    SocBand next;
    next.lo = std::max(0.0, prev.lo - b.max_discharge_per_slot / b.eta_d);
    next.hi = std::min(b.capacity, prev.hi + b.eta_c * e.charge_limit(t));
    bands.push_back(next);
  }
  return bands;
}

std::optional<EntitySchedule> feasible_witness(const EntitySpec& e, const TimeGrid& grid) {
  const auto& b = e.bess;
  const int T = grid.slot_count;
  const auto bands = reachable_soc(e, grid);
  const SocBand& last = bands.back();
  if (b.s_final < last.lo - kReachTol || b.s_final > last.hi + kReachTol) return std::nullopt;

  EntitySchedule s = EntitySchedule::zeros(T);
  s.soc[static_cast<std::size_t>(T)] = b.s_final;
  for (int t = T - 1; t >= 0; --t) {
    const auto ut = static_cast<std::size_t>(t);
    const double next = s.soc[ut + 1];
    const double lo = std::max(bands[ut].lo, next - b.eta_c * e.charge_limit(t));
    const double hi = std::min(bands[ut].hi, next + b.max_discharge_per_slot / b.eta_d);
    s.soc[ut] = std::clamp(next, lo, std::max(lo, hi));
  }
  s.soc[0] = b.s_initial;
  for (int t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const double step = s.soc[ut + 1] - s.soc[ut];
    if (step > 0) {
      s.e_charge[ut] = std::min(step / b.eta_c, e.charge_limit(t));
    } else {
      s.e_discharge[ut] = std::min(-step * b.eta_d, b.max_discharge_per_slot);
    }
    s.e_grid[ut] = e.gen_forecast[ut] + s.e_discharge[ut] - s.e_charge[ut];
  }
  return s;
}

std::vector<Finding> validate_entity(const EntitySpec& e, const TimeGrid& grid) {
  std::vector<Finding> out;
  const std::string who = "entity '" + e.id + "'";
  const auto& b = e.bess;
  const auto T = static_cast<std::size_t>(std::max(grid.slot_count, 0));

  if (e.id.empty()) add(out, Severity::Error, "entity", "empty id");
  const double scalars[] = {b.capacity, b.max_charge_per_slot, b.max_discharge_per_slot, b.eta_c,
                            b.eta_d,    b.s_initial,           b.s_final,                b.storage_op_cost};
  if (!std::all_of(std::begin(scalars), std::end(scalars), [](double x) { return std::isfinite(x); })) {
    add(out, Severity::Error, who, "non-finite BESS parameter");
    return out;
  }
  if (b.capacity < 0) add(out, Severity::Error, who + ".capacity", "negative capacity");
  if (b.max_charge_per_slot < 0) add(out, Severity::Error, who + ".max_charge", "negative charge cap");
  if (b.max_discharge_per_slot < 0) add(out, Severity::Error, who + ".max_discharge", "negative discharge cap");
  if (!(b.eta_c > 0 && b.eta_c <= 1)) add(out, Severity::Error, who + ".eta_c", "efficiency outside (0,1]");
  if (!(b.eta_d > 0 && b.eta_d <= 1)) add(out, Severity::Error, who + ".eta_d", "efficiency outside (0,1]");
  if (b.s_initial < 0 || b.s_initial > b.capacity)
    add(out, Severity::Error, who + ".soc_initial", "initial SOC outside [0, capacity]");
  if (b.s_final < 0 || b.s_final > b.capacity)
    add(out, Severity::Error, who + ".soc_final", "terminal SOC outside [0, capacity]");
  if (b.storage_op_cost < 0) add(out, Severity::Error, who + ".storage_cost", "negative storage cost");

  bool series_ok = true;
  if (e.gen_forecast.size() != T) {
    add(out, Severity::Error, who + ".forecast", "series length does not match grid");
    series_ok = false;
  } else if (!all_finite(e.gen_forecast.values)) {
    add(out, Severity::Error, who + ".forecast", "non-finite value");
    series_ok = false;
  } else if (std::any_of(e.gen_forecast.values.begin(), e.gen_forecast.values.end(),
                         [](double v) { return v < 0; })) {
    add(out, Severity::Error, who + ".forecast", "negative generation forecast");
  }
  if (e.sell_price.size() != T) {
    add(out, Severity::Error, who + ".price", "series length does not match grid");
    series_ok = false;
  } else if (!all_finite(e.sell_price.values)) {
    add(out, Severity::Error, who + ".price", "non-finite value");
    series_ok = false;
  } else if (std::any_of(e.sell_price.values.begin(), e.sell_price.values.end(),
                         [](double v) { return v < 0; })) {
    add(out, Severity::Warning, who + ".price",
        "negative sell price (netting simultaneous flows may lower profit)");
  }

  if (series_ok && !has_errors(out) && grid.slot_count >= 1) {
    const SocBand end = reachable_soc(e, grid).back();
    if (b.s_final > end.hi + kReachTol || b.s_final < end.lo - kReachTol)
      add(out, Severity::Error, who + ".soc_final", "terminal SOC unreachable");
  }
  return out;
}

std::vector<Finding> validate_scenario(const Scenario& s) {
  std::vector<Finding> out;
  const auto& g = s.grid;
  if (g.slot_count < 1) add(out, Severity::Error, "grid.slots", "slot count must be >= 1");
  if (!(g.slot_hours > 0) || !std::isfinite(g.slot_hours))
    add(out, Severity::Error, "grid.slot_minutes", "slot duration must be positive");
  if (has_errors(out)) return out;

  std::set<std::string> ids;
  for (const auto& e : s.entities) {
    if (!ids.insert(e.id).second) add(out, Severity::Error, "entity '" + e.id + "'", "duplicate entity id");
    auto f = validate_entity(e, g);
    out.insert(out.end(), f.begin(), f.end());
  }

  const auto T = static_cast<std::size_t>(g.slot_count);
  const std::pair<const Series*, const char*> aggregates[] = {{&s.non_sched_gen, "aggregate.nonsched_gen"},
                                                              {&s.loads, "aggregate.load"}};
  for (const auto& [series, name] : aggregates) {
    if (series->size() != T) {
      add(out, Severity::Error, name, "series length does not match grid");
    } else if (!all_finite(series->values)) {
      add(out, Severity::Error, name, "non-finite value");
    } else if (std::any_of(series->values.begin(), series->values.end(), [](double v) { return v < 0; })) {
      add(out, Severity::Error, name, "negative value");
    }
  }

  const auto& p = s.program;
  if (!(p.alpha > 0 && p.alpha < 1)) add(out, Severity::Error, "dr.alpha", "alpha must lie strictly in (0,1)");
  for (std::size_t j = 0; j < p.requests.size(); ++j) {
    const auto& r = p.requests[j];
    const std::string who = "request " + std::to_string(j + 1);
    if (!(r.interval.start_slot >= 0 && r.interval.start_slot < r.interval.end_slot &&
          r.interval.end_slot <= g.slot_count))
      add(out, Severity::Error, who + ".interval", "interval outside grid or empty");
    if (!std::isfinite(r.e_lo) || !std::isfinite(r.e_hi) || !std::isfinite(r.gamma_max)) {
      add(out, Severity::Error, who, "non-finite request parameter");
      continue;
    }
    if (r.e_lo == r.e_hi) {
      add(out, Severity::Error, who + ".bounds", "degenerate DR bounds");
    } else if (r.e_lo > r.e_hi) {
      add(out, Severity::Error, who + ".bounds", "lower energy bound above upper bound");
    }
    if (!(r.gamma_max > 0)) add(out, Severity::Error, who + ".gamma_max", "maximum reward must be positive");
    for (std::size_t k = 0; k < j; ++k) {
      if (p.requests[k].interval.overlaps(r.interval))
        add(out, Severity::Warning, who + ".interval", "overlaps request " + std::to_string(k + 1));
    }
  }
  return out;
}

int clock_to_slot(const TimeGrid& grid, std::string_view hh_mm) {
  const auto fail = [&](const std::string& why) {
    return ValidationError("time '" + std::string(hh_mm) + "': " + why);
  };
  const auto colon = hh_mm.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 3 != hh_mm.size()) throw fail("expected HH:MM");
  int hours = 0;
  int minutes = 0;
  for (std::size_t i = 0; i < hh_mm.size(); ++i) {
    if (i == colon) continue;
    const char c = hh_mm[i];
    if (c < '0' || c > '9') throw fail("expected HH:MM");
    (i < colon ? hours : minutes) = (i < colon ? hours : minutes) * 10 + (c - '0');
  }
  if (minutes >= 60 || hours > 24 || (hours == 24 && minutes != 0)) throw fail("not a clock time");
  if (!(grid.slot_hours > 0)) throw fail("grid has no slot duration");

  const double total_minutes = hours * 60.0 + minutes;
  const double slots = total_minutes / (grid.slot_hours * 60.0);
  const double rounded = std::round(slots);
  if (std::abs(slots - rounded) > 1e-9) throw fail("not aligned to slot boundary");
  const int slot = static_cast<int>(rounded);
  if (slot > grid.slot_count) throw fail("beyond end of horizon");
  return slot;
}

double schedule_violation(const EntitySchedule& s, const EntitySpec& e) {
  const auto& b = e.bess;
  const auto T = e.gen_forecast.size();
  if (s.e_grid.size() != T || s.e_charge.size() != T || s.e_discharge.size() != T || s.soc.size() != T + 1)
    return std::numeric_limits<double>::infinity();
  double worst = std::max(std::abs(s.soc[0] - b.s_initial), std::abs(s.soc[T] - b.s_final));
  for (std::size_t t = 0; t < T; ++t) {
    const int ti = static_cast<int>(t);
    worst = std::max({worst, -s.e_charge[t], s.e_charge[t] - e.charge_limit(ti), -s.e_discharge[t],
                      s.e_discharge[t] - b.max_discharge_per_slot, -s.e_grid[t]});
    worst = std::max(worst, std::abs(s.soc[t + 1] - s.soc[t] - b.eta_c * s.e_charge[t] +
                                     s.e_discharge[t] / b.eta_d));
    worst = std::max(worst, std::abs(s.e_grid[t] + s.e_charge[t] - e.gen_forecast[t] - s.e_discharge[t]));
  }
  for (double v : s.soc) worst = std::max({worst, -v, v - b.capacity});
  return std::max(worst, 0.0);
}

}  // namespace recdr
