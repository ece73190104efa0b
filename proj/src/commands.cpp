#include "recdr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "recdr/community.hpp"
#include "recdr/io.hpp"
#include "recdr/oracle.hpp"
#include "recdr/settlement.hpp"
#include "recdr/standalone.hpp"

namespace recdr::cli {

namespace fs = std::filesystem;

int default_workers() {
  if (const char* env = std::getenv("REC_DR_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Exception carrying a ready-made exit code.
struct Exit {
  int code;
  std::string message;
};

struct Options {
  std::string scenario;
  std::string scenario_dir;
  std::string out;
  std::string entity;
  std::string objective = "entities";
  std::string format = "csv";
  int workers = 0;
  int steps = 4;
};

io::Format format_of(const Options& o) { return o.format == "json" ? io::Format::Json : io::Format::Csv; }

int workers_of(const Options& o) { return o.workers > 0 ? o.workers : default_workers(); }

Objective objective_of(const Options& o) {
  const auto obj = parse_objective(o.objective);
  if (!obj) throw Exit{kValidation, "unknown objective '" + o.objective + "' (use entities or manager)"};
  return *obj;
}

// A scenario whose only defects are unreachable terminal SOC levels is a
// solver-level infeasibility of the named entities.
Exit classify_invalid(const io::ScenarioInvalid& e) {
  std::vector<std::string> unreachable;
  bool other = false;
  for (const auto& f : e.findings()) {
    if (f.severity != Severity::Error) continue;
    if (f.rule == "terminal SOC unreachable") unreachable.push_back(f.subject);
    else other = true;
  }
  if (!other && !unreachable.empty()) {
    std::string msg = "no feasible schedule:";
    for (const auto& s : unreachable) msg += "\n  " + s + ": terminal SOC unreachable";
    return {kSolver, msg};
  }
  return {kValidation, e.what()};
}

Exit classify(const std::exception& e) {
  if (const auto* x = dynamic_cast<const io::ScenarioInvalid*>(&e)) return classify_invalid(*x);
  if (dynamic_cast<const io::ParseError*>(&e) || dynamic_cast<const ValidationError*>(&e)) return {kValidation, e.what()};
  if (dynamic_cast<const TooManyRequestsError*>(&e)) return {kTooManyRequests, e.what()};
  return {kSolver, e.what()};
}

Scenario load(const std::string& path, std::ostream& err) {
  std::vector<Finding> warnings;
  Scenario s = io::load_scenario(path, &warnings);
  for (const auto& w : warnings) err << w.to_string() << '\n';
  return s;
}

struct DayResult {
  io::DayReport report;
  double standalone_seconds = 0.0;
  double community_seconds = 0.0;
  double total_seconds = 0.0;
};

DayResult run_day(const Scenario& s, Objective objective, int workers) {
  if (static_cast<int>(s.program.requests.size()) > kMaxRequests)
    throw TooManyRequestsError(std::to_string(s.program.requests.size()) + " DR requests exceed the limit of " +
                               std::to_string(kMaxRequests) + "; export the MILP with `recdr export-milp` instead");
  DayResult r;
  const auto t0 = Clock::now();
  const auto baselines = solve_all_standalone(s, workers);
  r.standalone_seconds = seconds_since(t0);
  const auto t1 = Clock::now();
  const auto solution = solve_community(s, objective, baselines, CommunityOptions{workers});
  r.community_seconds = seconds_since(t1);
  std::vector<double> j0;
  for (const auto& b : baselines) j0.push_back(b.profit);
  const Settlement st = settle(j0, solution.psi, solution.gamma, s.program.alpha);
  r.report = io::make_day_report(s, objective, baselines, solution, st);
  r.total_seconds = seconds_since(t0);
  return r;
}

int cmd_standalone(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario s = load(o.scenario, err);
  std::vector<std::size_t> only;
  if (!o.entity.empty()) {
    const auto it = std::find_if(s.entities.begin(), s.entities.end(), [&](const EntitySpec& e) { return e.id == o.entity; });
    if (it == s.entities.end()) throw Exit{kValidation, "unknown entity '" + o.entity + "'"};
    only.push_back(static_cast<std::size_t>(it - s.entities.begin()));
  }
  const auto t0 = Clock::now();
  std::vector<StandaloneResult> results(s.entities.size());
  if (only.empty()) {
    results = solve_all_standalone(s, workers_of(o));
  } else {
    results[only.front()] = solve_standalone(s.entities[only.front()], s.grid);
  }
  // Entities outside the selection keep empty schedules; give them zeros so
  // the net injection stays well defined.
  for (auto& r : results)
    if (r.schedule.e_grid.empty()) r.schedule = EntitySchedule::zeros(s.grid.slot_count);
  const double secs = seconds_since(t0);
  const io::DayReport day = io::make_baseline_report(s, results, only);
  io::write_report(std::span(&day, 1), o.out, format_of(o), true);
  const std::pair<std::string, double> timing[] = {{"standalone_seconds", secs}};
  io::write_timing(o.out, timing);
  for (const auto& e : day.entities) out << e.id << ": J_u0 = " << io::format_fixed(e.j_u0, 4) << " EUR\n";
  return kOk;
}

int cmd_community(const Options& o, std::ostream& out, std::ostream& err) {
  const Objective objective = objective_of(o);
  const Scenario s = load(o.scenario, err);
  const DayResult r = run_day(s, objective, workers_of(o));
  io::write_report(std::span(&r.report, 1), o.out, format_of(o), true);
  const std::pair<std::string, double> timing[] = {{"standalone_seconds", r.standalone_seconds},
                                                   {"community_seconds", r.community_seconds},
                                                   {"total_seconds", r.total_seconds}};
  io::write_timing(o.out, timing);
  const auto& d = r.report;
  out << "objective " << d.objective << " = " << io::format_fixed(d.objective_value, 4) << " EUR, J0 = "
      << io::format_fixed(d.j0, 4) << " EUR, sum gamma = " << io::format_fixed(d.sum_gamma, 4)
      << " EUR, rho = " << io::format_fixed(d.rho, 8) << '\n';
  for (const auto& e : d.entities)
    if (e.negative_xi) err << "note: entity " << e.id << " receives negative xi " << io::format_fixed(e.xi, 4) << '\n';
  return kOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const Objective objective = objective_of(o);
  if (!fs::is_directory(o.scenario_dir)) throw Exit{kValidation, o.scenario_dir + ": not a directory"};
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.scenario_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Exit{kValidation, o.scenario_dir + ": no scenario files (*.json)"};

  std::vector<io::DayReport> days;
  std::vector<std::pair<std::string, std::string>> failures;
  std::vector<std::pair<std::string, double>> timing;
  const int workers = workers_of(o);
  for (const auto& f : files) {
    try {
      const Scenario s = load(f.string(), err);
      DayResult r = run_day(s, objective, workers);
      io::write_trajectories(r.report, fs::path(o.out) / "days" / r.report.date, format_of(o));
      timing.emplace_back(r.report.date, r.total_seconds);
      days.push_back(std::move(r.report));
    } catch (const std::exception& e) {
      const Exit x = classify(e);
      failures.emplace_back(f.filename().string(), x.message);
      err << f.filename().string() << ": " << x.message << '\n';
    }
  }
  io::write_report(days, o.out, format_of(o), false);
  io::write_timing(o.out, timing);
  if (!failures.empty()) {
    std::string text = "file,error\n";
    for (const auto& [file, msg] : failures) {
      std::string one = msg;
      std::replace(one.begin(), one.end(), '\n', ' ');
      std::replace(one.begin(), one.end(), '"', '\'');
      text += file + ",\"" + one + "\"\n";
    }
    std::ofstream(fs::path(o.out) / "failures.csv", std::ios::binary) << text;
  }
  out << days.size() << " day(s) solved, " << failures.size() << " failed\n";
  return failures.empty() ? kOk : kPartialFailure;
}

int cmd_export(const Options& o, std::ostream& out, std::ostream& err) {
  const Objective objective = objective_of(o);
  const Scenario s = load(o.scenario, err);
  const auto baselines = solve_all_standalone(s, workers_of(o));
  double j0 = 0.0;
  for (const auto& b : baselines) j0 += b.profit;
  const std::string text = export_milp(s, objective, j0);
  if (const fs::path parent = fs::path(o.out).parent_path(); !parent.empty()) fs::create_directories(parent);
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw Exit{kSolver, o.out + ": cannot write file"};
  file << text;
  out << "wrote " << o.out << " (" << 3 * s.program.requests.size() << " binaries)\n";
  return kOk;
}

// Verification ---------------------------------------------------------------

class Checks {
 public:
  explicit Checks(std::ostream& out) : out_(out) {}

  void pass(const std::string& name, const std::string& detail = {}) { line("PASS", name, detail); }
  void fail(const std::string& name, const std::string& detail) {
    ++failed_;
    line("FAIL", name, detail);
  }
  void skip(const std::string& name, const std::string& why) { line("SKIP", name, why); }
  void expect(bool ok, const std::string& name, const std::string& detail) { ok ? pass(name, detail) : fail(name, detail); }
  int failed() const { return failed_; }

 private:
  void line(const char* tag, const std::string& name, const std::string& detail) {
    out_ << tag << ' ' << name;
    if (!detail.empty()) out_ << " (" << detail << ')';
    out_ << '\n';
  }
  std::ostream& out_;
  int failed_ = 0;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

// Finest oracle grid that fits the size cap, or nullopt.
template <class F>
auto with_finest_grid(int steps, F&& f) -> std::optional<decltype(f(1))> {
  for (int k = steps; k >= 1; k = k / 2) {
    try {
      return f(k);
    } catch (const oracle::SizeCapError&) {
      if (k == 1) break;
    }
  }
  return std::nullopt;
}

bool complementary(const EntitySchedule& s) {
  for (std::size_t t = 0; t < s.e_charge.size(); ++t)
    if (s.e_charge[t] * s.e_discharge[t] != 0.0) return false;
  return true;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario s = load(o.scenario, err);
  Checks checks(out);
  const int workers = workers_of(o);
  const auto baselines = solve_all_standalone(s, workers);
  std::vector<double> j0;
  for (const auto& b : baselines) j0.push_back(b.profit);

  for (std::size_t u = 0; u < s.entities.size(); ++u) {
    const auto& e = s.entities[u];
    const auto& b = baselines[u];
    const std::string tag = " [" + e.id + "]";
    checks.expect(std::abs(b.profit - evaluate_psi(b.schedule, e)) <= 1e-6 && schedule_violation(b.schedule, e) <= 1e-6,
                  "standalone schedule feasible and priced" + tag, "J_u0 " + num(b.profit));
    checks.expect(complementary(b.schedule), "standalone complementarity" + tag, "");
    if (s.grid.slot_count > oracle::kMaxStandaloneSlots) {
      checks.skip("standalone optimality" + tag, "horizon above " + std::to_string(oracle::kMaxStandaloneSlots) + " slots");
      continue;
    }
    const auto ref = with_finest_grid(o.steps, [&](int k) { return oracle::brute_force_standalone(e, s.grid, k); });
    if (!ref) {
      checks.skip("standalone optimality" + tag, "oracle grid too large");
    } else if (!ref->found) {
      checks.fail("standalone optimality" + tag, "oracle found no feasible schedule");
    } else {
      const bool ok = b.profit >= ref->profit - 1e-6 && b.profit <= ref->profit + ref->gap + 1e-6;
      checks.expect(ok, "standalone optimality" + tag,
                    "solver " + num(b.profit) + ", oracle " + num(ref->profit) + ", gap " + num(ref->gap));
    }
  }

  const int R = static_cast<int>(s.program.requests.size());
  for (int j = 0; j < R; ++j) {
    const auto& req = s.program.requests[static_cast<std::size_t>(j)];
    const BigM m = default_big_m(s, req);
    const double width = req.e_hi - req.e_lo;
    bool ok = true;
    double worst = 0.0;
    for (double e : {req.e_lo - width, req.e_lo, req.e_lo + 0.5 * width, req.e_hi, req.e_hi + width, req.e_lo - 0.5 * m.m_energy,
                     req.e_hi + 0.5 * m.m_energy}) {
      const auto c = oracle::check_encoding(req, e, m);
      ok = ok && c.ok;
      worst = std::max(worst, c.deviation);
    }
    checks.expect(ok, "big-M encoding [request " + std::to_string(j + 1) + "]", "max deviation " + num(worst));
  }
  if (R > kMaxRequests) {
    checks.skip("community checks", "more than " + std::to_string(kMaxRequests) + " requests");
    return checks.failed() ? kVerifyFailed : kOk;
  }

  double gamma_e = 0.0;
  double gamma_m = 0.0;
  for (const Objective obj : {Objective::EntitiesInterest, Objective::ManagerInterest}) {
    const std::string tag = " [" + std::string(to_string(obj)) + "]";
    const auto sol = solve_community(s, obj, baselines, CommunityOptions{workers});
    double sum_gamma = 0.0;
    bool rewards = true;
    for (int j = 0; j < R; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      sum_gamma += sol.gamma[uj];
      const double e = oracle::interval_sum(sol.net_injection, s.program.requests[uj].interval);
      const auto& req = s.program.requests[uj];
      const double expect = req.gamma_max * std::clamp((e - req.e_lo) / (req.e_hi - req.e_lo), 0.0, 1.0);
      rewards = rewards && std::abs(sol.gamma[uj] - expect) <= 1e-6 && std::abs(sol.e_dr[uj] - e) <= 1e-6;
    }
    (obj == Objective::EntitiesInterest ? gamma_e : gamma_m) = sum_gamma;
    checks.expect(rewards, "rewards match the reward curve" + tag, "");

    bool feasible = true;
    bool compl_ok = true;
    for (std::size_t u = 0; u < s.entities.size(); ++u) {
      feasible = feasible && schedule_violation(sol.schedules[u], s.entities[u]) <= 1e-6;
      compl_ok = compl_ok && complementary(sol.schedules[u]);
    }
    checks.expect(feasible, "community schedules feasible" + tag, "");
    checks.expect(compl_ok, "community complementarity" + tag, "");

    const double psi = std::accumulate(sol.psi.begin(), sol.psi.end(), 0.0);
    const double floor_gap = psi + s.program.alpha * sum_gamma - sol.baseline_total;
    checks.expect(floor_gap >= -1e-6, "profit floor" + tag, "margin " + num(floor_gap));

    try {
      const Settlement st = settle(j0, sol.psi, sol.gamma, s.program.alpha);
      double xi_sum = 0.0;
      bool ok = st.rho >= -1e-9;
      for (std::size_t u = 0; u < j0.size(); ++u) {
        const auto& e = st.entities[u];
        xi_sum += e.xi;
        ok = ok && std::abs(e.profit - (1.0 + st.rho) * j0[u]) <= 1e-9 * std::max(1.0, std::abs(e.profit));
        ok = ok && e.profit >= j0[u] - 1e-6;
      }
      ok = ok && std::abs(xi_sum - st.xi_total) <= 1e-9 * std::max(1.0, std::abs(st.xi_total));
      checks.expect(ok, "settlement identities" + tag, "rho " + num(st.rho));
    } catch (const SettlementError& e) {
      checks.skip("settlement identities" + tag, e.what());
    }

    if (static_cast<int>(s.entities.size()) > oracle::kMaxCommunityEntities || s.grid.slot_count > oracle::kMaxCommunitySlots ||
        R > oracle::kMaxCommunityRequests) {
      checks.skip("community optimality" + tag, "instance above oracle size limits");
      continue;
    }
    const auto ref = with_finest_grid(o.steps, [&](int k) { return oracle::brute_force_community(s, obj, j0, k); });
    if (!ref) {
      checks.skip("community optimality" + tag, "oracle grid too large");
    } else if (!ref->found) {
      checks.fail("community optimality" + tag, "oracle found no candidate");
    } else {
      const bool ok = sol.objective_value >= ref->objective - 1e-6 && sol.objective_value <= ref->objective + ref->gap + 1e-6;
      checks.expect(ok, "community optimality" + tag,
                    "solver " + num(sol.objective_value) + ", oracle " + num(ref->objective) + ", gap " + num(ref->gap));
    }
  }
  checks.expect(gamma_m >= gamma_e - 1e-6, "reward ordering", "manager " + num(gamma_m) + ", entities " + num(gamma_e));
  return checks.failed() ? kVerifyFailed : kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Battery scheduling for renewable energy communities under demand-response programs"};
  app.name("recdr");
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--workers", o.workers, "Concurrent LP solves (default: REC_DR_WORKERS or CPU count)")
        ->check(CLI::PositiveNumber);
    c->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_objective = [&](CLI::App* c) {
    c->add_option("--objective", o.objective, "entities or manager")->check(CLI::IsMember({"entities", "manager"}));
  };

  auto* standalone = app.add_subcommand("standalone", "Solve each entity on its own (baseline profits)");
  standalone->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  standalone->add_option("--entity", o.entity, "Only this entity id");
  standalone->add_option("--out", o.out, "Output directory")->required();
  add_common(standalone);

  auto* community = app.add_subcommand("community", "Baselines, community schedule and reward split for one day");
  community->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  add_objective(community);
  community->add_option("--out", o.out, "Output directory")->required();
  add_common(community);

  auto* simulate = app.add_subcommand("simulate", "Run `community` for every scenario file in a directory");
  simulate->add_option("--scenario-dir", o.scenario_dir, "Directory of day scenarios")->required();
  add_objective(simulate);
  simulate->add_option("--out", o.out, "Output directory")->required();
  add_common(simulate);

  auto* exporter = app.add_subcommand("export-milp", "Write the community MILP in LP file format");
  exporter->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  add_objective(exporter);
  exporter->add_option("--out", o.out, "Output .lp file")->required();
  add_common(exporter);

  auto* verify = app.add_subcommand("verify", "Cross-check the solvers against brute-force oracles");
  verify->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  verify->add_option("--steps", o.steps, "Oracle grid steps per kWh")->check(CLI::PositiveNumber);
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << e.what() << '\n';
    return kValidation;
  }

  try {
    if (standalone->parsed()) return cmd_standalone(o, out, err);
    if (community->parsed()) return cmd_community(o, out, err);
    if (simulate->parsed()) return cmd_simulate(o, out, err);
    if (exporter->parsed()) return cmd_export(o, out, err);
    if (verify->parsed()) return cmd_verify(o, out, err);
  } catch (const Exit& x) {
    err << "error: " << x.message << '\n';
    return x.code;
  } catch (const std::exception& e) {
    const Exit x = classify(e);
    err << "error: " << x.message << '\n';
    return x.code;
  }
  return kValidation;
}

}  // namespace recdr::cli
