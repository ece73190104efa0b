#pragma once

// Scenario files (JSON plus optional CSV series) and result reports.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recdr/community.hpp"
#include "recdr/core.hpp"
#include "recdr/settlement.hpp"
#include "recdr/standalone.hpp"

namespace recdr::io {

/// Malformed file; the message carries the path and line or field.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Scenario parsed but breaks at least one invariant.
class ScenarioInvalid : public ValidationError {
 public:
  ScenarioInvalid(const std::string& what, std::vector<Finding> findings)
      : ValidationError(what), findings_(std::move(findings)) {}
  const std::vector<Finding>& findings() const { return findings_; }

 private:
  std::vector<Finding> findings_;
};

/// Reads and validates a scenario. Relative CSV paths are resolved against
/// the scenario's directory; the date defaults to the file stem. Warnings are
/// appended to `warnings` when given.
Scenario load_scenario(const std::filesystem::path& path, std::vector<Finding>* warnings = nullptr);

/// Parses scenario JSON without validating it.
Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir, const std::string& default_date);

/// Two-column CSV series with header `slot,value_kwh` or `slot,value_eur_per_kwh`.
Series load_series_csv(const std::filesystem::path& path, int slots, Unit unit);

/// Writes the scenario as self-contained JSON (all series inline).
std::string scenario_to_json(const Scenario& s);
void write_scenario(const Scenario& s, const std::filesystem::path& path);

struct EntityRecord {
  std::string id;
  double j_u0 = 0.0;
  double psi = 0.0;
  double xi = 0.0;
  double j_u = 0.0;
  double delta = 0.0;
  bool negative_xi = false;
};

struct RequestRecord {
  int number = 0;  ///< 1-based
  double e_dr = 0.0;
  double gamma = 0.0;
  Regime regime = Regime::Below;
};

/// One day of results, mirroring the daily totals and per-entity tables.
struct DayReport {
  std::string date;
  std::string objective;  ///< "entities", "manager" or "standalone"
  double objective_value = 0.0;
  double j0 = 0.0;
  double sum_delta = 0.0;
  double sum_gamma = 0.0;
  double xi_total = 0.0;
  double rho = 0.0;
  std::vector<EntityRecord> entities;
  std::vector<RequestRecord> requests;
  std::vector<EntitySchedule> schedules;  ///< parallel to entities
  std::vector<double> net_injection;
};

DayReport make_day_report(const Scenario& s, Objective objective, std::span<const StandaloneResult> baselines,
                          const CommunitySolution& solution, const Settlement& settlement);

/// Baseline-only report: psi = J_u = J_u0, no reward. `only` restricts the
/// entities (empty = all).
DayReport make_baseline_report(const Scenario& s, std::span<const StandaloneResult> baselines,
                               std::span<const std::size_t> only = {});

enum class Format { Csv, Json };

/// Writes summary/entities/requests tables for all days. With CSV and
/// `trajectories`, a single day also gets trajectories.csv in `dir`.
void write_report(std::span<const DayReport> days, const std::filesystem::path& dir, Format format, bool trajectories);

/// Per-slot trajectories of one day (trajectories.csv or trajectories.json).
void write_trajectories(const DayReport& day, const std::filesystem::path& dir, Format format);

/// Wall-clock timings are kept apart from the deterministic report files.
void write_timing(const std::filesystem::path& dir, std::span<const std::pair<std::string, double>> seconds);

/// Money with 4 decimals; negative zero prints as 0.0000.
std::string format_fixed(double value, int decimals);

}  // namespace recdr::io
