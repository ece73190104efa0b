#include <algorithm>
#include <cmath>

#include "recdr/lp.hpp"

namespace recdr::lp {

int LpModel::add_variable(double lower, double upper, double objective, std::string name) {
  vars_.push_back(Variable{lower, upper, objective, false, std::move(name)});
  return num_variables() - 1;
}

int LpModel::add_binary(std::string name) {
  vars_.push_back(Variable{0.0, 1.0, 0.0, true, std::move(name)});
  return num_variables() - 1;
}

int LpModel::add_row(std::vector<Term> terms, Relation relation, double rhs, std::string name) {
  rows_.push_back(Row{std::move(terms), relation, rhs, std::move(name)});
  return num_rows() - 1;
}

void LpModel::set_bounds(int var, double lower, double upper) {
  auto& v = vars_.at(static_cast<std::size_t>(var));
  v.lower = lower;
  v.upper = upper;
}

void LpModel::validate() const {
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const auto& v = vars_[j];
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower == kInfinity || v.upper == -kInfinity)
      throw ModelError("variable " + std::to_string(j) + ": invalid bound");
    if (v.lower > v.upper) throw ModelError("variable " + std::to_string(j) + ": lower bound above upper bound");
    if (!std::isfinite(v.objective)) throw ModelError("variable " + std::to_string(j) + ": non-finite objective");
  }
  if (!std::isfinite(objective_offset)) throw ModelError("non-finite objective offset");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const auto& r = rows_[i];
    if (!std::isfinite(r.rhs)) throw ModelError("row " + std::to_string(i) + ": non-finite rhs");
    for (const auto& t : r.terms) {
      if (t.var < 0 || t.var >= num_variables())
        throw ModelError("row " + std::to_string(i) + ": variable index out of range");
      if (!std::isfinite(t.coef)) throw ModelError("row " + std::to_string(i) + ": non-finite coefficient");
    }
  }
}

double LpModel::objective_value(std::span<const double> x) const {
  double z = objective_offset;
  for (std::size_t j = 0; j < vars_.size(); ++j) z += vars_[j].objective * x[j];
  return z;
}

double LpModel::row_activity(int i, std::span<const double> x) const {
  double a = 0.0;
  for (const auto& t : row(i).terms) a += t.coef * x[static_cast<std::size_t>(t.var)];
  return a;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration limit";
    case Status::NumericalFailure: return "numerical failure";
  }
  return "unknown";
}

FeasibilityReport check_feasibility(const LpModel& model, std::span<const double> x, double tol) {
  FeasibilityReport rep;
  if (x.size() != static_cast<std::size_t>(model.num_variables())) {
    rep.feasible = false;
    rep.max_bound_violation = kInfinity;
    return rep;
  }
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    const double xj = x[static_cast<std::size_t>(j)];
    const double viol = std::max({v.lower - xj, xj - v.upper, 0.0});
    rep.max_bound_violation = std::max(rep.max_bound_violation, viol);
    if (!std::isfinite(xj) || viol > tol * std::max(1.0, std::abs(xj))) rep.feasible = false;
  }
  for (int i = 0; i < model.num_rows(); ++i) {
    const auto& r = model.row(i);
    double activity = 0.0;
    double magnitude = std::abs(r.rhs);
    for (const auto& t : r.terms) {
      const double v = t.coef * x[static_cast<std::size_t>(t.var)];
      activity += v;
      magnitude += std::abs(v);
    }
    double viol = 0.0;
    switch (r.relation) {
      case Relation::LessEqual: viol = std::max(0.0, activity - r.rhs); break;
      case Relation::GreaterEqual: viol = std::max(0.0, r.rhs - activity); break;
      case Relation::Equal: viol = std::abs(activity - r.rhs); break;
    }
    if (viol > rep.max_row_violation) {
      rep.max_row_violation = viol;
      rep.worst_row = i;
    }
    if (viol > tol * std::max(1.0, magnitude)) rep.feasible = false;
  }
  return rep;
}

}  // namespace recdr::lp
