#pragma once

// Domain types shared by every stage of the scheduling pipeline.
//
// Energy quantities are in kWh per slot, prices in EUR/kWh, money in EUR.
// All types are plain values: construct, validate once, then share read-only.

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace recdr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for inputs that break a type invariant or an alignment rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

struct TimeGrid {
  int slot_count = 0;
  double slot_hours = 0.0;

  bool valid_slot(int t) const { return t >= 0 && t < slot_count; }
  bool operator==(const TimeGrid&) const = default;
};

/// Half-open slot range [start_slot, end_slot).
struct Interval {
  int start_slot = 0;
  int end_slot = 0;

  int length() const { return end_slot - start_slot; }
  bool contains(int t) const { return t >= start_slot && t < end_slot; }
  bool overlaps(const Interval& o) const {
    return start_slot < o.end_slot && o.start_slot < end_slot;
  }
  bool operator==(const Interval&) const = default;
};

enum class Unit { Kwh, EurPerKwh };

struct Series {
  std::vector<double> values;
  Unit unit = Unit::Kwh;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t t) const { return values[t]; }
  bool operator==(const Series&) const = default;

  static Series zeros(int slots, Unit unit = Unit::Kwh) {
    return Series{std::vector<double>(static_cast<std::size_t>(slots), 0.0), unit};
  }
};

struct BessParams {
  double capacity = 0.0;                ///< kWh
  double max_charge_per_slot = 0.0;     ///< kWh
  double max_discharge_per_slot = 0.0;  ///< kWh
  double eta_c = 1.0;
  double eta_d = 1.0;
  double s_initial = 0.0;               ///< kWh
  double s_final = 0.0;                 ///< kWh
  double storage_op_cost = 0.0;         ///< EUR/kWh

  bool operator==(const BessParams&) const = default;
};

struct EntitySpec {
  std::string id;
  BessParams bess;
  Series gen_forecast;  ///< kWh
  Series sell_price;    ///< EUR/kWh

  /// Upper bound on charging in slot t: the per-slot cap or the forecast,
  /// whichever is smaller (the battery is never charged from the grid).
  double charge_limit(int t) const;

  bool operator==(const EntitySpec&) const = default;
};

struct DrRequest {
  Interval interval;
  double e_lo = 0.0;       ///< kWh
  double e_hi = 0.0;       ///< kWh
  double gamma_max = 0.0;  ///< EUR

  bool operator==(const DrRequest&) const = default;
};

struct DrProgram {
  std::vector<DrRequest> requests;
  double alpha = 0.5;  ///< fraction of the reward passed on to the entities

  bool operator==(const DrProgram&) const = default;
};

struct Scenario {
  std::string date;
  TimeGrid grid;
  std::vector<EntitySpec> entities;
  Series non_sched_gen;  ///< kWh, aggregate of producers without storage
  Series loads;          ///< kWh, aggregate community load
  DrProgram program;

  bool operator==(const Scenario&) const = default;
};

/// Per-slot decision trajectories for one entity. soc holds T + 1 values,
/// soc[t] being the level at the beginning of slot t.
struct EntitySchedule {
  std::vector<double> e_grid;
  std::vector<double> e_charge;
  std::vector<double> e_discharge;
  std::vector<double> soc;

  int slots() const { return static_cast<int>(e_grid.size()); }
  static EntitySchedule zeros(int slots);
};

enum class Severity { Error, Warning };

struct Finding {
  Severity severity = Severity::Error;
  std::string subject;  ///< entity/field or request the finding refers to
  std::string rule;     ///< short name of the violated rule

  std::string to_string() const;
};

std::vector<Finding> validate_scenario(const Scenario& s);
std::vector<Finding> validate_entity(const EntitySpec& e, const TimeGrid& grid);
bool has_errors(std::span<const Finding> findings);

/// Reachable state-of-charge interval at the end of the horizon, computed by
/// propagating the attainable [lo, hi] band forward slot by slot.
struct SocBand {
  double lo = 0.0;
  double hi = 0.0;
};
std::vector<SocBand> reachable_soc(const EntitySpec& e, const TimeGrid& grid);

/// A schedule meeting every entity constraint, built by a backward pass over
/// the reachable bands; nullopt when the terminal level is unreachable.
std::optional<EntitySchedule> feasible_witness(const EntitySpec& e, const TimeGrid& grid);

/// Converts "HH:MM" to a slot index. Throws ValidationError when the time is
/// malformed or not on a slot boundary. "24:00" maps to the end of the day.
int clock_to_slot(const TimeGrid& grid, std::string_view hh_mm);

/// Largest violation of the bound, dynamics, balance and endpoint rules of a
/// schedule (0 for a perfectly feasible schedule).
double schedule_violation(const EntitySchedule& s, const EntitySpec& e);

}  // namespace recdr
