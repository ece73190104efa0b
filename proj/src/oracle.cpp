#include "recdr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

namespace recdr::oracle {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double curve(double e, const DrRequest& r) {
  const double frac = std::clamp((e - r.e_lo) / (r.e_hi - r.e_lo), 0.0, 1.0);
  return frac * r.gamma_max;
}

bool on_grid(double v, double step) {
  const double k = v / step;
  return std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, std::abs(k));
}

struct Levels {
  std::vector<double> value;
  int start = 0;
  int end = 0;
};

Levels soc_levels(const BessParams& b, double step, std::int64_t max_levels) {
  const double count = std::floor(b.capacity / step + 1e-9) + 1.0;
  if (count > static_cast<double>(max_levels)) throw SizeCapError("state-of-charge grid too fine for exhaustive search");
  std::vector<double> v;
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(count); ++k) v.push_back(std::min(b.capacity, static_cast<double>(k) * step));
  v.push_back(b.s_initial);
  v.push_back(b.s_final);
  std::sort(v.begin(), v.end());
  std::vector<double> merged;
  const double eps = 1e-12 * std::max(1.0, b.capacity);
  for (double x : v) {
    if (!merged.empty() && x - merged.back() <= eps) {
      // Keep endpoint values exactly.
      if (x == b.s_initial || x == b.s_final) merged.back() = x;
      continue;
    }
    merged.push_back(x);
  }
  Levels L;
  L.value = std::move(merged);
  auto nearest = [&](double x) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(L.value.size()); ++i)
      if (std::abs(L.value[static_cast<std::size_t>(i)] - x) < std::abs(L.value[static_cast<std::size_t>(best)] - x)) best = i;
    return best;
  };
  L.start = nearest(b.s_initial);
  L.end = nearest(b.s_final);
  return L;
}

// Flows realizing a SOC step h in slot t without simultaneous charge and
// discharge; nullopt when a limit is exceeded.
struct Step {
  double grid = 0.0;
  double charge = 0.0;
  double discharge = 0.0;
  double profit = 0.0;
};

std::optional<Step> soc_step(const EntitySpec& e, int t, double h) {
  const auto& b = e.bess;
  const auto ut = static_cast<std::size_t>(t);
  const double gen = e.gen_forecast.values[ut];
  Step s;
  if (h > 0) {
    s.charge = h / b.eta_c;
    const double limit = std::min(b.max_charge_per_slot, gen);
    if (s.charge > limit + 1e-9 * std::max(1.0, limit)) return std::nullopt;
    s.charge = std::min(s.charge, std::max(limit, 0.0));
  } else if (h < 0) {
    s.discharge = -h * b.eta_d;
    if (s.discharge > b.max_discharge_per_slot + 1e-9 * std::max(1.0, b.max_discharge_per_slot)) return std::nullopt;
  }
  s.grid = gen - s.charge + s.discharge;
  s.profit = e.sell_price.values[ut] * s.grid - b.storage_op_cost * std::abs(h);
  return s;
}

bool exact_grid(const EntitySpec& e, double step) {
  const auto& b = e.bess;
  if (b.eta_c != 1.0 || b.eta_d != 1.0 || b.storage_op_cost < 0.0) return false;
  for (double v : {b.capacity, b.max_charge_per_slot, b.max_discharge_per_slot, b.s_initial, b.s_final})
    if (!on_grid(v, step)) return false;
  for (double v : e.gen_forecast.values)
    if (!on_grid(v, step)) return false;
  return true;
}

// Largest change of e_grid in slot t when a SOC path is moved onto the grid.
double grid_shift(const EntitySpec& e, int t, double step) {
  return (2.0 * t + 1.0) * step / e.bess.eta_c;
}

double lipschitz_gap(const EntitySpec& e, int slots, double step) {
  if (exact_grid(e, step)) return 0.0;
  double gap = 0.0;
  for (int t = 0; t < slots; ++t)
    gap += (std::abs(e.sell_price.values[static_cast<std::size_t>(t)]) + e.bess.storage_op_cost * e.bess.eta_c) *
           grid_shift(e, t, step);
  return gap;
}

}  // namespace

double interval_sum(std::span<const double> series, const Interval& interval) {
  double total = 0.0;
  for (std::size_t t = 0; t < series.size(); ++t)
    if (interval.contains(static_cast<int>(t))) total += series[t];
  return total;
}

StandaloneOracle brute_force_standalone(const EntitySpec& entity, const TimeGrid& grid, int steps_per_unit) {
  const int T = grid.slot_count;
  if (T > kMaxStandaloneSlots) throw SizeCapError("standalone oracle limited to " + std::to_string(kMaxStandaloneSlots) + " slots");
  if (steps_per_unit < 1) throw SizeCapError("grid resolution must be at least one step per kWh");
  const double step = 1.0 / steps_per_unit;
  const Levels L = soc_levels(entity.bess, step, 100'000);
  const auto n = static_cast<std::int64_t>(L.value.size());
  if (static_cast<std::int64_t>(T) * n * n > kMaxGridNodes) throw SizeCapError("standalone oracle grid exceeds 1e7 transitions");

  const auto N = static_cast<std::size_t>(n);
  std::vector<double> value(N, kNegInf);
  std::vector<std::vector<int>> parent(static_cast<std::size_t>(T), std::vector<int>(N, -1));
  value[static_cast<std::size_t>(L.start)] = 0.0;
  for (int t = 0; t < T; ++t) {
    std::vector<double> next(N, kNegInf);
    for (std::size_t i = 0; i < N; ++i) {
      if (value[i] == kNegInf) continue;
      for (std::size_t k = 0; k < N; ++k) {
        const auto s = soc_step(entity, t, L.value[k] - L.value[i]);
        if (!s) continue;
        const double v = value[i] + s->profit;
        if (v > next[k]) {
          next[k] = v;
          parent[static_cast<std::size_t>(t)][k] = static_cast<int>(i);
        }
      }
    }
    value = std::move(next);
  }

  StandaloneOracle out;
  const double best = value[static_cast<std::size_t>(L.end)];
  if (best == kNegInf) return out;
  out.found = true;
  out.profit = best;
  out.gap = lipschitz_gap(entity, T, step);

  std::vector<int> path(static_cast<std::size_t>(T) + 1);
  path[static_cast<std::size_t>(T)] = L.end;
  for (int t = T; t > 0; --t)
    path[static_cast<std::size_t>(t) - 1] = parent[static_cast<std::size_t>(t) - 1][static_cast<std::size_t>(path[static_cast<std::size_t>(t)])];
  out.schedule = EntitySchedule::zeros(T);
  for (int t = 0; t <= T; ++t) out.schedule.soc[static_cast<std::size_t>(t)] = L.value[static_cast<std::size_t>(path[static_cast<std::size_t>(t)])];
  for (int t = 0; t < T; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    const auto s = soc_step(entity, t, out.schedule.soc[ut + 1] - out.schedule.soc[ut]);
    out.schedule.e_grid[ut] = s->grid;
    out.schedule.e_charge[ut] = s->charge;
    out.schedule.e_discharge[ut] = s->discharge;
  }
  return out;
}

namespace {

// Profit and per-request interval energy of one discretized schedule.
struct PathPoint {
  double psi = 0.0;
  std::vector<double> energy;
};

std::vector<PathPoint> enumerate_paths(const EntitySpec& e, const Scenario& s, double step) {
  const int T = s.grid.slot_count;
  const Levels L = soc_levels(e.bess, step, 10'000);
  const auto N = L.value.size();
  const auto R = s.program.requests.size();

  // reach[t][i]: level i at time t can still end at the terminal level.
  std::vector<std::vector<char>> reach(static_cast<std::size_t>(T) + 1, std::vector<char>(N, 0));
  reach[static_cast<std::size_t>(T)][static_cast<std::size_t>(L.end)] = 1;
  for (int t = T - 1; t >= 0; --t)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N && !reach[static_cast<std::size_t>(t)][i]; ++k)
        if (reach[static_cast<std::size_t>(t) + 1][k] && soc_step(e, t, L.value[k] - L.value[i])) reach[static_cast<std::size_t>(t)][i] = 1;

  std::map<std::vector<long long>, PathPoint> best;
  std::int64_t paths = 0;
  std::vector<double> energy(R, 0.0);
  auto key_of = [](const std::vector<double>& v) {
    std::vector<long long> k;
    for (double x : v) k.push_back(std::llround(x * 1e9));
    return k;
  };
  auto dfs = [&](auto&& self, int t, std::size_t level, double psi) -> void {
    if (t == T) {
      if (++paths > 2'000'000) throw SizeCapError("community oracle: too many schedules per entity");
      auto key = key_of(energy);
      auto it = best.find(key);
      if (it == best.end()) best.emplace(std::move(key), PathPoint{psi, energy});
      else if (psi > it->second.psi) it->second.psi = psi;
      return;
    }
    for (std::size_t k = 0; k < N; ++k) {
      if (!reach[static_cast<std::size_t>(t) + 1][k]) continue;
      const auto st = soc_step(e, t, L.value[k] - L.value[level]);
      if (!st) continue;
      for (std::size_t j = 0; j < R; ++j)
        if (s.program.requests[j].interval.contains(t)) energy[j] += st->grid;
      self(self, t + 1, k, psi + st->profit);
      for (std::size_t j = 0; j < R; ++j)
        if (s.program.requests[j].interval.contains(t)) energy[j] -= st->grid;
    }
  };
  if (reach[0][static_cast<std::size_t>(L.start)]) dfs(dfs, 0, static_cast<std::size_t>(L.start), 0.0);

  // The objective and the floor both grow with psi and with every interval
  // energy, so dominated points can be dropped.
  std::vector<PathPoint> pts;
  for (auto& [k, p] : best) pts.push_back(std::move(p));
  std::sort(pts.begin(), pts.end(), [](const PathPoint& a, const PathPoint& b) { return a.psi > b.psi; });
  std::vector<PathPoint> front;
  for (auto& p : pts) {
    bool dominated = false;
    for (const auto& q : front) {
      bool all = true;
      for (std::size_t j = 0; j < R && all; ++j) all = q.energy[j] >= p.energy[j];
      if (all) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(std::move(p));
  }
  return front;
}

}  // namespace

CommunityOracle brute_force_community(const Scenario& s, Objective objective, std::span<const double> baselines,
                                      int steps_per_unit) {
  const int U = static_cast<int>(s.entities.size());
  const int R = static_cast<int>(s.program.requests.size());
  if (U < 1 || U > kMaxCommunityEntities || s.grid.slot_count > kMaxCommunitySlots || R > kMaxCommunityRequests)
    throw SizeCapError("community oracle limited to 2 entities, 6 slots and 2 requests");
  if (steps_per_unit < 1) throw SizeCapError("grid resolution must be at least one step per kWh");
  const double step = 1.0 / steps_per_unit;
  const double alpha = s.program.alpha;

  double j0 = 0.0;
  for (double b : baselines) j0 += b;
  std::vector<double> fixed(static_cast<std::size_t>(R));
  std::vector<double> aggregate(static_cast<std::size_t>(s.grid.slot_count));
  for (std::size_t t = 0; t < aggregate.size(); ++t) aggregate[t] = s.non_sched_gen.values[t] - s.loads.values[t];
  for (int j = 0; j < R; ++j) fixed[static_cast<std::size_t>(j)] = interval_sum(aggregate, s.program.requests[static_cast<std::size_t>(j)].interval);

  std::vector<std::vector<PathPoint>> fronts;
  for (const auto& e : s.entities) fronts.push_back(enumerate_paths(e, s, step));

  CommunityOracle out;
  const double floor_tol = 1e-9 * std::max(1.0, std::abs(j0));
  auto consider = [&](double psi, const std::vector<double>& energy) {
    ++out.candidates;
    double sum_gamma = 0.0;
    for (int j = 0; j < R; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      sum_gamma += curve(energy[uj] + fixed[uj], s.program.requests[uj]);
    }
    if (psi + alpha * sum_gamma < j0 - floor_tol) return;
    const double h = objective == Objective::EntitiesInterest ? psi + alpha * sum_gamma : (1.0 - alpha) * sum_gamma;
    if (!out.found || h > out.objective || (h == out.objective && psi > out.psi_total)) {
      out.found = true;
      out.objective = h;
      out.sum_gamma = sum_gamma;
      out.psi_total = psi;
    }
  };
  if (U == 1) {
    for (const auto& p : fronts[0]) consider(p.psi, p.energy);
  } else {
    std::vector<double> energy(static_cast<std::size_t>(R));
    for (const auto& a : fronts[0]) {
      for (const auto& b : fronts[1]) {
        for (std::size_t j = 0; j < energy.size(); ++j) energy[j] = a.energy[j] + b.energy[j];
        consider(a.psi + b.psi, energy);
      }
    }
  }

  const double weight = objective == Objective::EntitiesInterest ? alpha : 1.0 - alpha;
  for (const auto& e : s.entities) {
    if (objective == Objective::EntitiesInterest) out.gap += lipschitz_gap(e, s.grid.slot_count, step);
    for (const auto& req : s.program.requests) {
      const double slope = req.gamma_max / (req.e_hi - req.e_lo);
      for (int t = req.interval.start_slot; t < req.interval.end_slot; ++t) out.gap += weight * slope * grid_shift(e, t, step);
    }
  }
  return out;
}

EncodingCheck check_encoding(const DrRequest& req, double e_dr, const BigM& big_m, double tol) {
  lp::LpModel m;
  const int e = m.add_variable(e_dr, e_dr);
  const EncodedRequest enc = encode_bigm(m, e, req, big_m, 1);

  EncodingCheck out;
  out.expected = curve(e_dr, req);
  out.max_gamma = kNegInf;
  bool contains = true;
  for (int k = 0; k < 3; ++k) {
    std::vector<double> x(static_cast<std::size_t>(m.num_variables()), 0.0);
    x[static_cast<std::size_t>(e)] = e_dr;
    x[static_cast<std::size_t>(enc.z[static_cast<std::size_t>(k)])] = 1.0;

    double lo = kNegInf;
    double hi = std::numeric_limits<double>::infinity();
    bool feasible = true;
    for (int i : enc.rows) {
      const auto& row = m.row(i);
      double rest = 0.0;
      double scale = std::abs(row.rhs);
      double a = 0.0;
      for (const auto& t : row.terms) {
        if (t.var == enc.gamma) {
          a += t.coef;
          continue;
        }
        rest += t.coef * x[static_cast<std::size_t>(t.var)];
        scale += std::abs(t.coef * x[static_cast<std::size_t>(t.var)]);
      }
      const double slack = row.rhs - rest;  // a * gamma (rel) slack
      if (a == 0.0) {
        const double margin = 1e-9 * std::max(1.0, scale);
        if ((row.relation == lp::Relation::LessEqual && slack < -margin) ||
            (row.relation == lp::Relation::GreaterEqual && slack > margin) ||
            (row.relation == lp::Relation::Equal && std::abs(slack) > margin))
          feasible = false;
        continue;
      }
      const double bound = slack / a;
      const bool upper = (row.relation == lp::Relation::LessEqual) == (a > 0);
      if (row.relation == lp::Relation::Equal) {
        lo = std::max(lo, bound);
        hi = std::min(hi, bound);
      } else if (upper) {
        hi = std::min(hi, bound);
      } else {
        lo = std::max(lo, bound);
      }
    }
    if (!feasible || lo > hi + tol) continue;
    ++out.feasible_regimes;
    out.max_gamma = std::max(out.max_gamma, hi);
    if (out.expected < lo - tol || out.expected > hi + tol) contains = false;
  }
  if (out.feasible_regimes == 0) {
    out.deviation = std::numeric_limits<double>::infinity();
    return out;
  }
  out.deviation = std::abs(out.max_gamma - out.expected);
  out.ok = contains && out.deviation <= tol;
  return out;
}

VertexOracle enumerate_vertices(const lp::LpModel& model) {
  const int n = model.num_variables();
  const int m = model.num_rows();
  if (n > 6 || m > 6) throw SizeCapError("vertex enumeration limited to 6 variables and 6 rows");

  // Candidate active constraints: every row and every finite bound.
  struct Plane {
    std::vector<double> a;
    double b;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < m; ++i) {
    Plane p{std::vector<double>(static_cast<std::size_t>(n), 0.0), model.row(i).rhs};
    for (const auto& t : model.row(i).terms) p.a[static_cast<std::size_t>(t.var)] += t.coef;
    planes.push_back(std::move(p));
  }
  for (int j = 0; j < n; ++j) {
    const auto& v = model.variable(j);
    if (!std::isfinite(v.lower) || !std::isfinite(v.upper)) throw SizeCapError("vertex enumeration needs finite bounds");
    for (double bound : {v.lower, v.upper}) {
      Plane p{std::vector<double>(static_cast<std::size_t>(n), 0.0), bound};
      p.a[static_cast<std::size_t>(j)] = 1.0;
      planes.push_back(std::move(p));
    }
  }

  VertexOracle out;
  const int P = static_cast<int>(planes.size());
  std::vector<int> pick(static_cast<std::size_t>(n));
  auto evaluate = [&] {
    ++out.bases_tried;
    // Gaussian elimination with partial pivoting on the chosen planes.
    std::vector<std::vector<double>> A(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n) + 1));
    for (int r = 0; r < n; ++r) {
      const auto& p = planes[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
      std::copy(p.a.begin(), p.a.end(), A[static_cast<std::size_t>(r)].begin());
      A[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)] = p.b;
    }
    for (int c = 0; c < n; ++c) {
      int piv = c;
      for (int r = c + 1; r < n; ++r)
        if (std::abs(A[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) > std::abs(A[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)])) piv = r;
      if (std::abs(A[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)]) < 1e-10) return;
      std::swap(A[static_cast<std::size_t>(c)], A[static_cast<std::size_t>(piv)]);
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] / A[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        if (f == 0.0) continue;
        for (int k = c; k <= n; ++k) A[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -= f * A[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
      }
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
      x[static_cast<std::size_t>(j)] = A[static_cast<std::size_t>(j)][static_cast<std::size_t>(n)] / A[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)];

    for (int j = 0; j < n; ++j) {
      const auto& v = model.variable(j);
      const double xj = x[static_cast<std::size_t>(j)];
      if (xj < v.lower - 1e-7 || xj > v.upper + 1e-7) return;
    }
    double z = model.objective_offset;
    for (int i = 0; i < m; ++i) {
      const auto& row = model.row(i);
      double act = 0.0;
      for (const auto& t : row.terms) act += t.coef * x[static_cast<std::size_t>(t.var)];
      const double tol = 1e-7 * std::max(1.0, std::abs(row.rhs));
      if (row.relation == lp::Relation::LessEqual && act > row.rhs + tol) return;
      if (row.relation == lp::Relation::GreaterEqual && act < row.rhs - tol) return;
      if (row.relation == lp::Relation::Equal && std::abs(act - row.rhs) > tol) return;
    }
    for (int j = 0; j < n; ++j) z += model.variable(j).objective * x[static_cast<std::size_t>(j)];
    if (!out.feasible || z > out.objective) {
      out.feasible = true;
      out.objective = z;
      out.x = x;
    }
  };

  if (n == 0) {
    bool ok = true;
    for (int i = 0; i < m; ++i) {
      const auto& row = model.row(i);
      if ((row.relation == lp::Relation::LessEqual && row.rhs < 0) || (row.relation == lp::Relation::GreaterEqual && row.rhs > 0) ||
          (row.relation == lp::Relation::Equal && row.rhs != 0))
        ok = false;
    }
    out.feasible = ok;
    out.objective = model.objective_offset;
    return out;
  }
  auto choose = [&](auto&& self, int depth, int from) -> void {
    if (depth == n) {
      evaluate();
      return;
    }
    for (int p = from; p <= P - (n - depth); ++p) {
      pick[static_cast<std::size_t>(depth)] = p;
      self(self, depth + 1, p + 1);
    }
  };
  choose(choose, 0, 0);
  return out;
}

}  // namespace recdr::oracle
