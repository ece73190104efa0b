#include "recdr/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace recdr::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot write file");
  out << text;
  if (!out) throw Error(path.string() + ": write failed");
}

std::string line_context(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

const json& field(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = field(obj, key, where);
  if (!v.is_number()) throw ParseError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<int>();
}

std::vector<double> inline_series(const json& v, const std::string& where) {
  if (!v.is_array()) throw ParseError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ParseError(where + "[" + std::to_string(i) + "]: expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

// Reads `<stem>_csv` or `<stem>_inline`; exactly one must be present unless
// the series is optional, in which case zeros are returned.
Series series_field(const json& obj, const std::string& stem, const std::string& where, const fs::path& base, int slots,
                    Unit unit, bool optional) {
  const bool has_csv = obj.is_object() && obj.contains(stem + "_csv");
  const bool has_inline = obj.is_object() && obj.contains(stem + "_inline");
  if (has_csv && has_inline) throw ParseError(where + ": give either " + stem + "_csv or " + stem + "_inline, not both");
  if (has_inline) {
    Series s{inline_series(obj.at(stem + "_inline"), where + "." + stem + "_inline"), unit};
    return s;
  }
  if (has_csv) {
    const json& p = obj.at(stem + "_csv");
    if (!p.is_string()) throw ParseError(where + "." + stem + "_csv: expected a path string");
    fs::path path = p.get<std::string>();
    if (path.is_relative()) path = base / path;
    return load_series_csv(path, slots, unit);
  }
  if (optional) return Series::zeros(slots, unit);
  throw ParseError(where + ": missing " + stem + "_csv or " + stem + "_inline");
}

int slot_field(const json& v, const TimeGrid& grid, const std::string& where) {
  if (v.is_string()) {
    try {
      return clock_to_slot(grid, v.get<std::string>());
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return integer(v, where);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

double parse_double(std::string_view s, const std::string& where) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(where + ": '" + std::string(s) + "' is not a number");
  return v;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s = buf;
  // "-0.0000" -> "0.0000"
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

Series load_series_csv(const fs::path& path, int slots, Unit unit) {
  const std::string text = read_file(path);
  const std::string expected = unit == Unit::Kwh ? "slot,value_kwh" : "slot,value_eur_per_kwh";
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool header = false;
  Series s{{}, unit};
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view l = trim(line);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (!header) {
      if (l != expected) throw ParseError(where + ": expected header '" + expected + "'");
      header = true;
      continue;
    }
    if (l.empty()) continue;
    const auto comma = l.find(',');
    if (comma == std::string_view::npos || l.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(where + ": expected two columns");
    const double slot = parse_double(l.substr(0, comma), where);
    if (slot != static_cast<double>(s.values.size()))
      throw ParseError(where + ": expected slot " + std::to_string(s.values.size()));
    s.values.push_back(parse_double(l.substr(comma + 1), where));
  }
  if (!header) throw ParseError(path.string() + ": empty file, expected header '" + expected + "'");
  if (static_cast<int>(s.values.size()) != slots)
    throw ParseError(path.string() + ": " + std::to_string(s.values.size()) + " data rows, expected " + std::to_string(slots));
  return s;
}

Scenario parse_scenario(std::string_view text, const fs::path& base, const std::string& default_date) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("invalid JSON at " + line_context(text, e.byte == 0 ? 0 : e.byte - 1) + ": " + e.what());
  }
  if (!doc.is_object()) throw ParseError("scenario: expected a JSON object");

  Scenario s;
  s.date = default_date;
  if (doc.contains("date")) {
    if (!doc["date"].is_string()) throw ParseError("date: expected a string");
    s.date = doc["date"].get<std::string>();
  }

  const json& g = field(doc, "grid", "scenario");
  s.grid.slot_count = integer(field(g, "slots", "grid"), "grid.slots");
  s.grid.slot_hours = number(g, "slot_minutes", "grid") / 60.0;
  if (s.grid.slot_count < 1 || s.grid.slot_count > 100000) throw ParseError("grid.slots: must be between 1 and 100000");
  const int T = s.grid.slot_count;

  const json& ents = field(doc, "entities", "scenario");
  if (!ents.is_array()) throw ParseError("entities: expected an array");
  for (std::size_t u = 0; u < ents.size(); ++u) {
    const json& e = ents[u];
    const std::string where = "entities[" + std::to_string(u) + "]";
    if (!e.is_object()) throw ParseError(where + ": expected an object");
    EntitySpec spec;
    const json& id = field(e, "id", where);
    if (!id.is_string()) throw ParseError(where + ".id: expected a string");
    spec.id = id.get<std::string>();
    auto& b = spec.bess;
    b.capacity = number(e, "capacity_kwh", where);
    b.max_charge_per_slot = number(e, "max_charge_kwh", where);
    b.max_discharge_per_slot = number(e, "max_discharge_kwh", where);
    b.eta_c = number(e, "eta_c", where);
    b.eta_d = number(e, "eta_d", where);
    b.s_initial = number(e, "soc_initial_kwh", where);
    b.s_final = number(e, "soc_final_kwh", where);
    b.storage_op_cost = number(e, "storage_cost_eur_per_kwh", where);
    spec.sell_price = series_field(e, "price", where, base, T, Unit::EurPerKwh, false);
    spec.gen_forecast = series_field(e, "forecast", where, base, T, Unit::Kwh, false);
    s.entities.push_back(std::move(spec));
  }

  const json agg = doc.contains("aggregate") ? doc["aggregate"] : json::object();
  if (!agg.is_object()) throw ParseError("aggregate: expected an object");
  s.non_sched_gen = series_field(agg, "nonsched_gen", "aggregate", base, T, Unit::Kwh, true);
  s.loads = series_field(agg, "load", "aggregate", base, T, Unit::Kwh, true);

  if (doc.contains("dr")) {
    const json& dr = doc["dr"];
    if (!dr.is_object()) throw ParseError("dr: expected an object");
    s.program.alpha = number(dr, "alpha", "dr");
    const json reqs = dr.contains("requests") ? dr["requests"] : json::array();
    if (!reqs.is_array()) throw ParseError("dr.requests: expected an array");
    for (std::size_t j = 0; j < reqs.size(); ++j) {
      const std::string where = "dr.requests[" + std::to_string(j) + "]";
      const json& r = reqs[j];
      if (!r.is_object()) throw ParseError(where + ": expected an object");
      DrRequest req;
      req.interval.start_slot = slot_field(field(r, "start", where), s.grid, where + ".start");
      req.interval.end_slot = slot_field(field(r, "end", where), s.grid, where + ".end");
      req.e_lo = number(r, "e_lo_kwh", where);
      req.e_hi = number(r, "e_hi_kwh", where);
      req.gamma_max = number(r, "gamma_max_eur", where);
      s.program.requests.push_back(req);
    }
  }
  return s;
}

Scenario load_scenario(const fs::path& path, std::vector<Finding>* warnings) {
  const std::string text = read_file(path);
  Scenario s;
  try {
    s = parse_scenario(text, path.parent_path(), path.stem().string());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  auto findings = validate_scenario(s);
  if (has_errors(findings)) {
    std::string msg = path.string() + ": invalid scenario";
    for (const auto& f : findings)
      if (f.severity == Severity::Error) msg += "\n  " + f.to_string();
    throw ScenarioInvalid(msg, std::move(findings));
  }
  if (warnings)
    for (auto& f : findings) warnings->push_back(std::move(f));
  return s;
}

std::string scenario_to_json(const Scenario& s) {
  json doc;
  doc["date"] = s.date;
  doc["grid"] = {{"slots", s.grid.slot_count}, {"slot_minutes", s.grid.slot_hours * 60.0}};
  json ents = json::array();
  for (const auto& e : s.entities) {
    const auto& b = e.bess;
    ents.push_back({{"id", e.id},
                    {"capacity_kwh", b.capacity},
                    {"max_charge_kwh", b.max_charge_per_slot},
                    {"max_discharge_kwh", b.max_discharge_per_slot},
                    {"eta_c", b.eta_c},
                    {"eta_d", b.eta_d},
                    {"soc_initial_kwh", b.s_initial},
                    {"soc_final_kwh", b.s_final},
                    {"storage_cost_eur_per_kwh", b.storage_op_cost},
                    {"price_inline", e.sell_price.values},
                    {"forecast_inline", e.gen_forecast.values}});
  }
  doc["entities"] = std::move(ents);
  doc["aggregate"] = {{"nonsched_gen_inline", s.non_sched_gen.values}, {"load_inline", s.loads.values}};
  json reqs = json::array();
  for (const auto& r : s.program.requests)
    reqs.push_back({{"start", r.interval.start_slot},
                    {"end", r.interval.end_slot},
                    {"e_lo_kwh", r.e_lo},
                    {"e_hi_kwh", r.e_hi},
                    {"gamma_max_eur", r.gamma_max}});
  doc["dr"] = {{"alpha", s.program.alpha}, {"requests", std::move(reqs)}};
  return doc.dump(2) + "\n";
}

void write_scenario(const Scenario& s, const fs::path& path) { write_file(path, scenario_to_json(s)); }

DayReport make_day_report(const Scenario& s, Objective objective, std::span<const StandaloneResult> baselines,
                          const CommunitySolution& solution, const Settlement& settlement) {
  DayReport d;
  d.date = s.date;
  d.objective = std::string(to_string(objective));
  d.objective_value = solution.objective_value;
  d.j0 = settlement.baseline_total;
  d.xi_total = settlement.xi_total;
  d.rho = settlement.rho;
  for (std::size_t u = 0; u < s.entities.size(); ++u) {
    const auto& es = settlement.entities[u];
    d.entities.push_back({s.entities[u].id, baselines[u].profit, solution.psi[u], es.xi, es.profit, es.delta, es.negative_xi});
    d.sum_delta += es.delta;
  }
  for (std::size_t j = 0; j < solution.gamma.size(); ++j) {
    d.requests.push_back({static_cast<int>(j) + 1, solution.e_dr[j], solution.gamma[j], solution.regime[j]});
    d.sum_gamma += solution.gamma[j];
  }
  d.schedules = solution.schedules;
  d.net_injection = solution.net_injection;
  return d;
}

DayReport make_baseline_report(const Scenario& s, std::span<const StandaloneResult> baselines,
                               std::span<const std::size_t> only) {
  DayReport d;
  d.date = s.date;
  d.objective = "standalone";
  std::vector<std::size_t> pick(only.begin(), only.end());
  if (pick.empty())
    for (std::size_t u = 0; u < s.entities.size(); ++u) pick.push_back(u);
  for (std::size_t u : pick) {
    const double j = baselines[u].profit;
    d.entities.push_back({s.entities[u].id, j, j, 0.0, j, 0.0, false});
    d.schedules.push_back(baselines[u].schedule);
    d.j0 += j;
  }
  d.objective_value = d.j0;
  const int T = s.grid.slot_count;
  d.net_injection.assign(static_cast<std::size_t>(T), 0.0);
  for (int t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    d.net_injection[ut] = s.non_sched_gen[ut] - s.loads[ut];
    for (const auto& b : baselines) d.net_injection[ut] += b.schedule.e_grid[ut];
  }
  return d;
}

namespace {

json day_json(const DayReport& d, bool trajectories) {
  json j;
  j["date"] = d.date;
  j["objective"] = d.objective;
  j["objective_value"] = d.objective_value;
  j["J0"] = d.j0;
  j["sum_delta"] = d.sum_delta;
  j["sum_gamma"] = d.sum_gamma;
  j["xi_total"] = d.xi_total;
  j["rho"] = d.rho;
  json ents = json::array();
  for (const auto& e : d.entities)
    ents.push_back({{"entity", e.id},
                    {"J_u0", e.j_u0},
                    {"psi", e.psi},
                    {"xi", e.xi},
                    {"J_u", e.j_u},
                    {"delta", e.delta},
                    {"negative_xi", e.negative_xi}});
  j["entities"] = std::move(ents);
  json reqs = json::array();
  for (const auto& r : d.requests)
    reqs.push_back({{"request", r.number}, {"e_dr", r.e_dr}, {"gamma", r.gamma}, {"regime", std::string(to_string(r.regime))}});
  j["requests"] = std::move(reqs);
  if (trajectories) {
    json traj = json::array();
    for (std::size_t u = 0; u < d.schedules.size(); ++u) {
      const auto& s = d.schedules[u];
      traj.push_back({{"entity", d.entities[u].id},
                      {"e_grid", s.e_grid},
                      {"e_charge", s.e_charge},
                      {"e_discharge", s.e_discharge},
                      {"soc", s.soc}});
    }
    j["trajectories"] = std::move(traj);
    j["net_injection"] = d.net_injection;
  }
  return j;
}

}  // namespace

void write_report(std::span<const DayReport> days, const fs::path& dir, Format format, bool trajectories) {
  fs::create_directories(dir);
  if (format == Format::Json) {
    json doc;
    doc["days"] = json::array();
    for (const auto& d : days) doc["days"].push_back(day_json(d, trajectories && days.size() == 1));
    write_file(dir / "report.json", doc.dump(2) + "\n");
    return;
  }
  std::string summary = "date,objective,J0,sum_delta,sum_gamma,rho\n";
  std::string entities = "date,entity,J_u0,psi,xi,J_u,delta\n";
  std::string requests = "date,request,e_dr,gamma,regime\n";
  for (const auto& d : days) {
    summary += d.date + "," + d.objective + "," + format_fixed(d.j0, 4) + "," + format_fixed(d.sum_delta, 4) + "," +
               format_fixed(d.sum_gamma, 4) + "," + format_fixed(d.rho, 8) + "\n";
    for (const auto& e : d.entities)
      entities += d.date + "," + e.id + "," + format_fixed(e.j_u0, 4) + "," + format_fixed(e.psi, 4) + "," +
                  format_fixed(e.xi, 4) + "," + format_fixed(e.j_u, 4) + "," + format_fixed(e.delta, 4) + "\n";
    for (const auto& r : d.requests)
      requests += d.date + "," + std::to_string(r.number) + "," + format_fixed(r.e_dr, 6) + "," + format_fixed(r.gamma, 4) +
                  "," + std::string(to_string(r.regime)) + "\n";
  }
  write_file(dir / "summary.csv", summary);
  write_file(dir / "entities.csv", entities);
  write_file(dir / "requests.csv", requests);
  if (trajectories && days.size() == 1) write_trajectories(days.front(), dir, Format::Csv);
}

void write_trajectories(const DayReport& day, const fs::path& dir, Format format) {
  fs::create_directories(dir);
  if (format == Format::Json) {
    write_file(dir / "trajectories.json", day_json(day, true).dump(2) + "\n");
    return;
  }
  std::string out = "slot,entity,e_grid,e_charge,e_discharge,soc,net_injection\n";
  const std::size_t T = day.net_injection.size();
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t u = 0; u < day.schedules.size(); ++u) {
      const auto& s = day.schedules[u];
      out += std::to_string(t) + "," + day.entities[u].id + "," + format_fixed(s.e_grid[t], 6) + "," +
             format_fixed(s.e_charge[t], 6) + "," + format_fixed(s.e_discharge[t], 6) + "," + format_fixed(s.soc[t], 6) +
             "," + format_fixed(day.net_injection[t], 6) + "\n";
    }
  }
  write_file(dir / "trajectories.csv", out);
}

void write_timing(const fs::path& dir, std::span<const std::pair<std::string, double>> seconds) {
  fs::create_directories(dir);
  json doc = json::object();
  for (const auto& [name, value] : seconds) doc[name] = value;
  write_file(dir / "timing.json", doc.dump(2) + "\n");
}

}  // namespace recdr::io
