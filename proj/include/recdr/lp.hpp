#pragma once

// Linear programs with per-variable bounds, solved by a bounded-variable
// revised primal simplex.
//
//   maximize    c'x + offset
//   subject to  a_i'x  (<=, =, >=)  b_i      for every row i
//               lo_j <= x_j <= hi_j           for every variable j
//
// The basis is kept as a sparse LU factorization plus product-form updates,
// refreshed periodically. Pricing is Dantzig's rule with lowest-index ties;
// after 2(n + m) consecutive degenerate pivots the solver switches to Bland's
// rule until the objective moves again. Feasibility is reached by a
// composite phase 1 that minimizes the sum of bound violations of the basic
// variables, which lets a caller start from any nonsingular basis.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recdr/core.hpp"

namespace recdr::lp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Primal feasibility tolerance on row-equilibrated data.
inline constexpr double kFeasibilityTol = 1e-9;
/// Relative objective tolerance: no feasible point beats the reported optimum
/// by more than kOptimalityTol * max(1, |objective|).
inline constexpr double kOptimalityTol = 1e-7;
/// Rows whose largest coefficient magnitude exceeds this are rejected.
inline constexpr double kMaxRowCoefficient = 1e6;

class ModelError : public Error {
 public:
  using Error::Error;
};

class ScalingError : public ModelError {
 public:
  using ModelError::ModelError;
};

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct Variable {
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
  bool binary = false;  ///< only meaningful for export; solve() relaxes it
  std::string name;
};

struct Row {
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
  std::string name;
};

class LpModel {
 public:
  int add_variable(double lower, double upper, double objective = 0.0, std::string name = {});
  int add_binary(std::string name);
  int add_row(std::vector<Term> terms, Relation relation, double rhs, std::string name = {});

  void set_objective(int var, double coef) { vars_.at(static_cast<std::size_t>(var)).objective = coef; }
  void add_objective(int var, double coef) { vars_.at(static_cast<std::size_t>(var)).objective += coef; }
  void set_bounds(int var, double lower, double upper);

  double objective_offset = 0.0;

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_rows() const { return static_cast<int>(rows_.size()); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Variable& variable(int j) const { return vars_.at(static_cast<std::size_t>(j)); }
  const Row& row(int i) const { return rows_.at(static_cast<std::size_t>(i)); }
  Row& row(int i) { return rows_.at(static_cast<std::size_t>(i)); }

  /// Throws ModelError on crossed bounds, bad indices or non-finite data.
  void validate() const;

  double objective_value(std::span<const double> x) const;
  double row_activity(int i, std::span<const double> x) const;

 private:
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

std::string_view to_string(Status s);

enum class BasisStatus : std::uint8_t { Basic, AtLower, AtUpper, Zero };

/// Simplex basis: one status per variable and one per row (the row's slack).
struct Basis {
  std::vector<BasisStatus> variables;
  std::vector<BasisStatus> rows;
};

struct SolveOptions {
  /// Starting basis; ignored (slack basis used) if it is malformed or singular.
  const Basis* warm_start = nullptr;
  /// 0 selects a limit proportional to the model size.
  std::int64_t iteration_limit = 0;
};

struct LpSolution {
  Status status = Status::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  Basis basis;
  std::int64_t iterations = 0;
  bool warm_started = false;
};

LpSolution solve(const LpModel& model, const SolveOptions& options = {});

struct FeasibilityReport {
  double max_row_violation = 0.0;
  double max_bound_violation = 0.0;
  int worst_row = -1;
  bool feasible = true;
};

/// Independent feasibility check using plain dot products. A row counts as
/// satisfied when its violation is within tol * max(1, |b_i| + sum_j |a_ij x_j|).
FeasibilityReport check_feasibility(const LpModel& model, std::span<const double> x,
                                    double tol = kFeasibilityTol);

/// Writes the model in LP file format (Maximize / Subject To / Bounds /
/// Binary / End). Output depends only on the model, so identical models give
/// identical bytes. Unnamed variables and rows get x<j> / r<i> names.
void write_lp_format(const LpModel& model, std::ostream& out, std::string_view comment = {});

}  // namespace recdr::lp
