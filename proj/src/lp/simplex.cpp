#include <algorithm>
#include <cmath>

#include "basis_factor.hpp"
#include "recdr/lp.hpp"

namespace recdr::lp {

namespace {

using detail::BasisFactor;
using detail::SparseColumn;

constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kTinyPivot = 1e-11;
constexpr int kRefactorInterval = 100;
constexpr int kMaxRepairs = 5;

class Simplex {
 public:
  Simplex(const LpModel& model, const SolveOptions& options);
  LpSolution run();

 private:
  enum class Outcome { Continue, Optimal, Infeasible, Unbounded, Failure };

  void load_model();
  void slack_basis();
  bool warm_basis(const Basis& basis);
  void place_nonbasic(int j, BasisStatus hint);
  bool refactor();
  void compute_basic_values();
  void repair_basis();

  double tolerance(double bound) const { return kFeasibilityTol * std::max(1.0, std::abs(bound)); }
  double infeasibility(int j) const;
  bool any_infeasible() const;

  Outcome iterate(bool phase1);
  int price(bool phase1, const std::vector<double>& y, double& dq) const;
  double reduced_cost(int j, double cj, const std::vector<double>& y) const;
  void column(int j, std::vector<double>& dense) const;

  const LpModel& model_;
  const SolveOptions& options_;

  int n_ = 0;
  int m_ = 0;
  int total_ = 0;
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> rhs_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> cost_;

  std::vector<int> head_;
  std::vector<int> pos_;
  std::vector<BasisStatus> status_;
  std::vector<double> x_;
  BasisFactor factor_;

  std::int64_t iterations_ = 0;
  std::int64_t degenerate_run_ = 0;
  bool bland_ = false;
  int repairs_ = 0;
  bool warm_started_ = false;

  std::vector<double> y_;
  std::vector<double> alpha_;
};

Simplex::Simplex(const LpModel& model, const SolveOptions& options) : model_(model), options_(options) {
  load_model();
}

void Simplex::load_model() {
  n_ = model_.num_variables();
  m_ = model_.num_rows();
  total_ = n_ + m_;

  std::vector<double> row_scale(static_cast<std::size_t>(m_), 1.0);
  std::vector<int> counts(static_cast<std::size_t>(n_) + 1, 0);
  for (int i = 0; i < m_; ++i) {
    double biggest = 0.0;
    for (const auto& t : model_.row(i).terms) {
      biggest = std::max(biggest, std::abs(t.coef));
      if (t.coef != 0.0) ++counts[static_cast<std::size_t>(t.var) + 1];
    }
    if (biggest > kMaxRowCoefficient)
      throw ScalingError("row " + std::to_string(i) + (model_.row(i).name.empty() ? "" : " (" + model_.row(i).name + ")") +
                         ": coefficient magnitude exceeds 1e6; rescale the model");
    if (biggest > 0.0) row_scale[static_cast<std::size_t>(i)] = 1.0 / biggest;
  }

  col_start_.assign(static_cast<std::size_t>(n_) + 1, 0);
  for (int j = 0; j < n_; ++j)
    col_start_[static_cast<std::size_t>(j) + 1] = col_start_[static_cast<std::size_t>(j)] + counts[static_cast<std::size_t>(j) + 1];
  col_row_.assign(static_cast<std::size_t>(col_start_.back()), 0);
  col_val_.assign(static_cast<std::size_t>(col_start_.back()), 0.0);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (const auto& t : model_.row(i).terms) {
      if (t.coef == 0.0) continue;
      const auto k = static_cast<std::size_t>(fill[static_cast<std::size_t>(t.var)]++);
      col_row_[k] = i;
      col_val_[k] = t.coef * row_scale[static_cast<std::size_t>(i)];
    }
  }
  // Duplicate entries for the same (row, column) pair are merged.
  for (int j = 0; j < n_; ++j) {
    const auto b = static_cast<std::size_t>(col_start_[static_cast<std::size_t>(j)]);
    const auto e = static_cast<std::size_t>(col_start_[static_cast<std::size_t>(j) + 1]);
    for (std::size_t k = b + 1; k < e; ++k) {
      if (col_row_[k] == col_row_[k - 1]) {
        col_val_[k] += col_val_[k - 1];
        col_val_[k - 1] = 0.0;
      }
    }
  }

  rhs_.resize(static_cast<std::size_t>(m_));
  lower_.resize(static_cast<std::size_t>(total_));
  upper_.resize(static_cast<std::size_t>(total_));
  cost_.assign(static_cast<std::size_t>(total_), 0.0);
  for (int j = 0; j < n_; ++j) {
    const auto& v = model_.variable(j);
    lower_[static_cast<std::size_t>(j)] = v.lower;
    upper_[static_cast<std::size_t>(j)] = v.upper;
    cost_[static_cast<std::size_t>(j)] = -v.objective;  // internal form minimizes
  }
  for (int i = 0; i < m_; ++i) {
    const auto& r = model_.row(i);
    const auto li = static_cast<std::size_t>(n_ + i);
    rhs_[static_cast<std::size_t>(i)] = r.rhs * row_scale[static_cast<std::size_t>(i)];
    // Logical s_i with a_i'x + s_i = b_i.
    switch (r.relation) {
      case Relation::LessEqual: lower_[li] = 0.0; upper_[li] = kInfinity; break;
      case Relation::GreaterEqual: lower_[li] = -kInfinity; upper_[li] = 0.0; break;
      case Relation::Equal: lower_[li] = 0.0; upper_[li] = 0.0; break;
    }
  }

  head_.assign(static_cast<std::size_t>(m_), -1);
  pos_.assign(static_cast<std::size_t>(total_), -1);
  status_.assign(static_cast<std::size_t>(total_), BasisStatus::AtLower);
  x_.assign(static_cast<std::size_t>(total_), 0.0);
  y_.resize(static_cast<std::size_t>(m_));
  alpha_.resize(static_cast<std::size_t>(m_));
}

void Simplex::place_nonbasic(int j, BasisStatus hint) {
  const auto uj = static_cast<std::size_t>(j);
  const bool has_lo = std::isfinite(lower_[uj]);
  const bool has_hi = std::isfinite(upper_[uj]);
  BasisStatus s = hint;
  if (s == BasisStatus::Basic || s == BasisStatus::Zero) s = BasisStatus::AtLower;
  if (s == BasisStatus::AtLower && !has_lo) s = has_hi ? BasisStatus::AtUpper : BasisStatus::Zero;
  if (s == BasisStatus::AtUpper && !has_hi) s = has_lo ? BasisStatus::AtLower : BasisStatus::Zero;
  status_[uj] = s;
  pos_[uj] = -1;
  x_[uj] = s == BasisStatus::AtLower ? lower_[uj] : s == BasisStatus::AtUpper ? upper_[uj] : 0.0;
}

void Simplex::slack_basis() {
  for (int j = 0; j < n_; ++j) place_nonbasic(j, BasisStatus::AtLower);
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    head_[static_cast<std::size_t>(i)] = j;
    pos_[static_cast<std::size_t>(j)] = i;
    status_[static_cast<std::size_t>(j)] = BasisStatus::Basic;
  }
}

bool Simplex::warm_basis(const Basis& basis) {
  if (basis.variables.size() != static_cast<std::size_t>(n_) || basis.rows.size() != static_cast<std::size_t>(m_))
    return false;
  int basic = 0;
  for (auto s : basis.variables) basic += s == BasisStatus::Basic;
  for (auto s : basis.rows) basic += s == BasisStatus::Basic;
  if (basic != m_) return false;

  int r = 0;
  for (int j = 0; j < total_; ++j) {
    const BasisStatus s = j < n_ ? basis.variables[static_cast<std::size_t>(j)] : basis.rows[static_cast<std::size_t>(j - n_)];
    if (s == BasisStatus::Basic) {
      head_[static_cast<std::size_t>(r)] = j;
      pos_[static_cast<std::size_t>(j)] = r;
      status_[static_cast<std::size_t>(j)] = BasisStatus::Basic;
      ++r;
    } else {
      place_nonbasic(j, s);
    }
  }
  return refactor();
}

bool Simplex::refactor() {
  std::vector<SparseColumn> cols(static_cast<std::size_t>(m_));
  for (int r = 0; r < m_; ++r) {
    const int j = head_[static_cast<std::size_t>(r)];
    auto& c = cols[static_cast<std::size_t>(r)];
    if (j < n_) {
      for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k) {
        c.index.push_back(col_row_[static_cast<std::size_t>(k)]);
        c.value.push_back(col_val_[static_cast<std::size_t>(k)]);
      }
    } else {
      c.index.push_back(j - n_);
      c.value.push_back(1.0);
    }
  }
  return factor_.factorize(m_, cols);
}

void Simplex::compute_basic_values() {
  std::vector<double> r = rhs_;
  for (int j = 0; j < total_; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (status_[uj] == BasisStatus::Basic || x_[uj] == 0.0) continue;
    if (j < n_) {
      for (int k = col_start_[uj]; k < col_start_[uj + 1]; ++k)
        r[static_cast<std::size_t>(col_row_[static_cast<std::size_t>(k)])] -= col_val_[static_cast<std::size_t>(k)] * x_[uj];
    } else {
      r[static_cast<std::size_t>(j - n_)] -= x_[uj];
    }
  }
  factor_.ftran(r);
  for (int i = 0; i < m_; ++i) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] = r[static_cast<std::size_t>(i)];
}

void Simplex::repair_basis() {
  ++repairs_;
  for (int j = 0; j < n_; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    if (status_[uj] != BasisStatus::Basic) continue;
    const double to_lo = std::abs(x_[uj] - lower_[uj]);
    const double to_hi = std::abs(upper_[uj] - x_[uj]);
    place_nonbasic(j, to_hi < to_lo ? BasisStatus::AtUpper : BasisStatus::AtLower);
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    head_[static_cast<std::size_t>(i)] = j;
    pos_[static_cast<std::size_t>(j)] = i;
    status_[static_cast<std::size_t>(j)] = BasisStatus::Basic;
  }
  refactor();
  compute_basic_values();
}

double Simplex::infeasibility(int j) const {
  const auto uj = static_cast<std::size_t>(j);
  const double x = x_[uj];
  if (x < lower_[uj] - tolerance(lower_[uj])) return lower_[uj] - x;
  if (x > upper_[uj] + tolerance(upper_[uj])) return x - upper_[uj];
  return 0.0;
}

bool Simplex::any_infeasible() const {
  for (int i = 0; i < m_; ++i)
    if (infeasibility(head_[static_cast<std::size_t>(i)]) > 0.0) return true;
  return false;
}

double Simplex::reduced_cost(int j, double cj, const std::vector<double>& y) const {
  if (j >= n_) return cj - y[static_cast<std::size_t>(j - n_)];
  double d = cj;
  for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
    d -= y[static_cast<std::size_t>(col_row_[static_cast<std::size_t>(k)])] * col_val_[static_cast<std::size_t>(k)];
  return d;
}

int Simplex::price(bool phase1, const std::vector<double>& y, double& dq) const {
  int best = -1;
  double best_score = 0.0;
  for (int j = 0; j < total_; ++j) {
    const auto uj = static_cast<std::size_t>(j);
    const BasisStatus s = status_[uj];
    if (s == BasisStatus::Basic || lower_[uj] == upper_[uj]) continue;
    const double d = reduced_cost(j, phase1 ? 0.0 : cost_[uj], y);
    const bool eligible = (s == BasisStatus::AtLower && d < -kDualTol) || (s == BasisStatus::AtUpper && d > kDualTol) ||
                          (s == BasisStatus::Zero && std::abs(d) > kDualTol);
    if (!eligible) continue;
    if (bland_) {
      dq = d;
      return j;
    }
    if (std::abs(d) > best_score) {
      best_score = std::abs(d);
      best = j;
      dq = d;
    }
  }
  return best;
}

void Simplex::column(int j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  if (j < n_) {
    for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
      dense[static_cast<std::size_t>(col_row_[static_cast<std::size_t>(k)])] += col_val_[static_cast<std::size_t>(k)];
  } else {
    dense[static_cast<std::size_t>(j - n_)] = 1.0;
  }
}

Simplex::Outcome Simplex::iterate(bool phase1) {
  // Dual prices for the current phase.
  for (int i = 0; i < m_; ++i) {
    const int j = head_[static_cast<std::size_t>(i)];
    const auto uj = static_cast<std::size_t>(j);
    double c = cost_[uj];
    if (phase1) {
      c = 0.0;
      if (x_[uj] < lower_[uj] - tolerance(lower_[uj])) c = -1.0;
      else if (x_[uj] > upper_[uj] + tolerance(upper_[uj])) c = 1.0;
    }
    y_[static_cast<std::size_t>(i)] = c;
  }
  factor_.btran(y_);

  double dq = 0.0;
  const int q = price(phase1, y_, dq);
  if (q < 0) return phase1 ? Outcome::Infeasible : Outcome::Optimal;

  column(q, alpha_);
  factor_.ftran(alpha_);
  const auto uq = static_cast<std::size_t>(q);
  const double dir = dq < 0 ? 1.0 : -1.0;

  // Ratio test (Harris two-pass; pure minimum ratio under Bland's rule).
  double theta_max = kInfinity;
  for (int i = 0; i < m_; ++i) {
    const double a = alpha_[static_cast<std::size_t>(i)];
    if (std::abs(a) <= kPivotTol) continue;
    const int j = head_[static_cast<std::size_t>(i)];
    const auto uj = static_cast<std::size_t>(j);
    const double rate = -dir * a;
    const double xj = x_[uj];
    double target;
    if (rate < 0) {
      if (phase1 && xj > upper_[uj] + tolerance(upper_[uj])) target = upper_[uj];
      else if (std::isfinite(lower_[uj]) && xj >= lower_[uj] - tolerance(lower_[uj])) target = lower_[uj];
      else continue;
      theta_max = std::min(theta_max, (xj - target + tolerance(target)) / -rate);
    } else {
      if (phase1 && xj < lower_[uj] - tolerance(lower_[uj])) target = lower_[uj];
      else if (std::isfinite(upper_[uj]) && xj <= upper_[uj] + tolerance(upper_[uj])) target = upper_[uj];
      else continue;
      theta_max = std::min(theta_max, (target - xj + tolerance(target)) / rate);
    }
  }

  int leave = -1;
  double leave_target = 0.0;
  double theta = kInfinity;
  double best_pivot = 0.0;
  for (int i = 0; i < m_; ++i) {
    const double a = alpha_[static_cast<std::size_t>(i)];
    if (std::abs(a) <= kPivotTol) continue;
    const int j = head_[static_cast<std::size_t>(i)];
    const auto uj = static_cast<std::size_t>(j);
    const double rate = -dir * a;
    const double xj = x_[uj];
    double target;
    if (rate < 0) {
      if (phase1 && xj > upper_[uj] + tolerance(upper_[uj])) target = upper_[uj];
      else if (std::isfinite(lower_[uj]) && xj >= lower_[uj] - tolerance(lower_[uj])) target = lower_[uj];
      else continue;
    } else {
      if (phase1 && xj < lower_[uj] - tolerance(lower_[uj])) target = lower_[uj];
      else if (std::isfinite(upper_[uj]) && xj <= upper_[uj] + tolerance(upper_[uj])) target = upper_[uj];
      else continue;
    }
    const double ratio = std::max(0.0, (target - xj) / rate);
    bool take;
    if (bland_) {
      take = leave < 0 || ratio < theta || (ratio == theta && j < head_[static_cast<std::size_t>(leave)]);
    } else {
      if (ratio > theta_max) continue;
      take = leave < 0 || std::abs(a) > best_pivot ||
             (std::abs(a) == best_pivot && j < head_[static_cast<std::size_t>(leave)]);
    }
    if (take) {
      leave = i;
      leave_target = target;
      theta = ratio;
      best_pivot = std::abs(a);
    }
  }

  const double range = upper_[uq] - lower_[uq];
  const bool flip = status_[uq] != BasisStatus::Zero && std::isfinite(range) && (leave < 0 || range <= theta);
  if (leave < 0 && !flip) return phase1 ? Outcome::Failure : Outcome::Unbounded;
  if (flip) theta = range;

  // Move.
  x_[uq] += dir * theta;
  if (theta != 0.0) {
    for (int i = 0; i < m_; ++i) {
      const double a = alpha_[static_cast<std::size_t>(i)];
      if (a != 0.0) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(i)])] -= dir * theta * a;
    }
  }

  if (theta * std::abs(dq) <= 1e-12) {
    if (++degenerate_run_ > 2LL * total_) bland_ = true;
  } else {
    degenerate_run_ = 0;
    bland_ = false;
  }

  if (flip) {
    const bool to_upper = status_[uq] == BasisStatus::AtLower;
    status_[uq] = to_upper ? BasisStatus::AtUpper : BasisStatus::AtLower;
    x_[uq] = to_upper ? upper_[uq] : lower_[uq];
    return Outcome::Continue;
  }

  const int out = head_[static_cast<std::size_t>(leave)];
  const auto uo = static_cast<std::size_t>(out);
  x_[uo] = leave_target;
  status_[uo] = leave_target == lower_[uo] ? BasisStatus::AtLower : BasisStatus::AtUpper;
  pos_[uo] = -1;
  head_[static_cast<std::size_t>(leave)] = q;
  pos_[uq] = leave;
  status_[uq] = BasisStatus::Basic;

  if (std::abs(alpha_[static_cast<std::size_t>(leave)]) < kTinyPivot || factor_.num_updates() >= kRefactorInterval ||
      factor_.eta_nonzeros() > 20L * std::max(m_, 1)) {
    if (!refactor()) repair_basis();
    else compute_basic_values();
  } else {
    factor_.update(leave, alpha_);
  }
  return Outcome::Continue;
}

LpSolution Simplex::run() {
  LpSolution sol;
  if (options_.warm_start != nullptr && warm_basis(*options_.warm_start)) {
    warm_started_ = true;
  } else {
    std::fill(head_.begin(), head_.end(), -1);
    slack_basis();
    refactor();
  }
  compute_basic_values();

  const std::int64_t limit =
      options_.iteration_limit > 0 ? options_.iteration_limit : 20LL * total_ + 10000;
  Status status = Status::IterationLimit;
  int confirmations = 0;
  while (iterations_ < limit) {
    const bool phase1 = any_infeasible();
    const Outcome o = iterate(phase1);
    if (o == Outcome::Continue) {
      ++iterations_;
      continue;
    }
    if (o == Outcome::Unbounded) {
      status = Status::Unbounded;
      break;
    }
    if (o == Outcome::Failure) {
      if (repairs_ >= kMaxRepairs) {
        status = Status::NumericalFailure;
        break;
      }
      repair_basis();
      continue;
    }
    // Confirm the verdict on a fresh factorization before returning it.
    if (!refactor()) {
      if (repairs_ >= kMaxRepairs) {
        status = Status::NumericalFailure;
        break;
      }
      repair_basis();
      continue;
    }
    compute_basic_values();
    const bool still_infeasible = any_infeasible();
    if (o == Outcome::Optimal && still_infeasible && ++confirmations < 20) continue;
    if (o == Outcome::Infeasible && !still_infeasible && ++confirmations < 20) continue;
    status = o == Outcome::Optimal ? Status::Optimal : Status::Infeasible;
    if (o == Outcome::Optimal && still_infeasible) status = Status::NumericalFailure;
    break;
  }

  sol.status = status;
  sol.iterations = iterations_;
  sol.warm_started = warm_started_;
  sol.x.assign(x_.begin(), x_.begin() + n_);
  if (status == Status::Optimal) {
    // Snap values that sit within tolerance of a bound.
    for (int j = 0; j < n_; ++j) {
      auto& v = sol.x[static_cast<std::size_t>(j)];
      const auto uj = static_cast<std::size_t>(j);
      if (v < lower_[uj]) v = lower_[uj];
      if (v > upper_[uj]) v = upper_[uj];
    }
  }
  sol.objective = model_.objective_value(sol.x);
  sol.basis.variables.assign(status_.begin(), status_.begin() + n_);
  sol.basis.rows.assign(status_.begin() + n_, status_.end());
  return sol;
}

}  // namespace

LpSolution solve(const LpModel& model, const SolveOptions& options) {
  model.validate();
  Simplex simplex(model, options);
  return simplex.run();
}

}  // namespace recdr::lp
