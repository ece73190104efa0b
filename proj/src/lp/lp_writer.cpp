#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "recdr/lp.hpp"

namespace recdr::lp {

namespace {

constexpr std::size_t kLineWidth = 200;

std::string number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

std::string var_name(const LpModel& m, int j) {
  const auto& n = m.variable(j).name;
  return n.empty() ? "x" + std::to_string(j) : n;
}

std::string row_name(const LpModel& m, int i) {
  const auto& n = m.row(i).name;
  return n.empty() ? "r" + std::to_string(i) : n;
}

// Accumulates " + 3 x" style tokens and breaks lines before kLineWidth.
class LineWriter {
 public:
  explicit LineWriter(std::ostream& out) : out_(out) {}

  void token(const std::string& t) {
    if (column_ > 0 && column_ + t.size() + 1 > kLineWidth) {
      out_ << '\n';
      column_ = 0;
    }
    out_ << ' ' << t;
    column_ += t.size() + 1;
  }

  void term(double coef, const std::string& name, bool first) {
    if (coef < 0) token(first ? "-" + number(-coef) + " " + name : "- " + number(-coef) + " " + name);
    else token(first ? number(coef) + " " + name : "+ " + number(coef) + " " + name);
  }

  void end_line() {
    out_ << '\n';
    column_ = 0;
  }

 private:
  std::ostream& out_;
  std::size_t column_ = 0;
};

}  // namespace

void write_lp_format(const LpModel& model, std::ostream& out, std::string_view comment) {
  if (!comment.empty()) out << "\\ " << comment << '\n';
  LineWriter w(out);

  out << "Maximize\n";
  w.token("obj:");
  bool first = true;
  for (int j = 0; j < model.num_variables(); ++j) {
    const double c = model.variable(j).objective;
    if (c == 0.0) continue;
    w.term(c, var_name(model, j), first);
    first = false;
  }
  if (model.objective_offset != 0.0 || first) {
    const double k = model.objective_offset;
    w.token(first ? number(k) : (k < 0 ? "- " + number(-k) : "+ " + number(k)));
  }
  w.end_line();

  out << "Subject To\n";
  for (int i = 0; i < model.num_rows(); ++i) {
    const auto& r = model.row(i);
    w.token(row_name(model, i) + ":");
    first = true;
    for (const auto& t : r.terms) {
      if (t.coef == 0.0) continue;
      w.term(t.coef, var_name(model, t.var), first);
      first = false;
    }
    if (first) w.token("0 " + var_name(model, r.terms.empty() ? 0 : r.terms.front().var));
    const char* rel = r.relation == Relation::LessEqual ? "<=" : r.relation == Relation::Equal ? "=" : ">=";
    w.token(std::string(rel) + " " + number(r.rhs));
    w.end_line();
  }

  out << "Bounds\n";
  for (int j = 0; j < model.num_variables(); ++j) {
    const auto& v = model.variable(j);
    if (v.binary) continue;
    const std::string name = var_name(model, j);
    const bool lo_inf = std::isinf(v.lower);
    const bool hi_inf = std::isinf(v.upper);
    if (lo_inf && hi_inf) out << ' ' << name << " free\n";
    else if (!lo_inf && !hi_inf && v.lower == v.upper) out << ' ' << name << " = " << number(v.lower) << '\n';
    else if (lo_inf) out << " -inf <= " << name << " <= " << number(v.upper) << '\n';
    else if (hi_inf) out << ' ' << name << " >= " << number(v.lower) << '\n';
    else out << ' ' << number(v.lower) << " <= " << name << " <= " << number(v.upper) << '\n';
  }

  bool any_binary = false;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (!model.variable(j).binary) continue;
    if (!any_binary) out << "Binary\n";
    any_binary = true;
    out << ' ' << var_name(model, j) << '\n';
  }
  out << "End\n";
}

}  // namespace recdr::lp
