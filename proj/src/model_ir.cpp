#include "resplan/model_ir.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace resplan {

namespace {

// Locale-independent shortest round-trip representation.
std::string num(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace

int ModelIR::add_variable(std::string var_name, double lb, double ub, double cost,
                          bool is_integer) {
  const int id = static_cast<int>(vars_.size());
  auto [it, inserted] = var_index_.emplace(var_name, id);
  (void)it;
  if (!inserted) {
    throw std::logic_error("duplicate variable name: " + var_name);
  }
  vars_.push_back({std::move(var_name), lb, ub, cost, is_integer});
  return id;
}

int ModelIR::add_constraint(std::string con_name, std::vector<LinTerm> terms, Relation rel,
                            double rhs) {
  for (const LinTerm& t : terms) {
    if (t.var < 0 || t.var >= num_variables()) {
      throw std::logic_error("constraint " + con_name + " references undeclared variable");
    }
  }
  std::sort(terms.begin(), terms.end(),
            [](const LinTerm& a, const LinTerm& b) { return a.var < b.var; });
  std::vector<LinTerm> merged;
  merged.reserve(terms.size());
  for (const LinTerm& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const LinTerm& t) { return t.coef == 0.0; });
  const int id = static_cast<int>(cons_.size());
  cons_.push_back({std::move(con_name), std::move(merged), rel, rhs});
  return id;
}

int ModelIR::variable_id(const std::string& var_name) const {
  auto it = var_index_.find(var_name);
  if (it == var_index_.end()) {
    throw std::out_of_range("unknown variable: " + var_name);
  }
  return it->second;
}

bool ModelIR::has_variable(const std::string& var_name) const {
  return var_index_.contains(var_name);
}

double ModelIR::objective_value(const std::vector<double>& x) const {
  double v = 0.0;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    v += vars_[j].cost * x[j];
  }
  return v;
}

double ModelIR::constraint_activity(int c, const std::vector<double>& x) const {
  const LinearConstraint& con = cons_[c];
  double a = 0.0;
  for (const LinTerm& t : con.terms) {
    a += t.coef * x[t.var];
  }
  return a - con.rhs;
}

double ModelIR::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int c = 0; c < num_constraints(); ++c) {
    const LinearConstraint& con = cons_[c];
    double a = 0.0;
    double scale = 1.0 + std::abs(con.rhs);
    for (const LinTerm& t : con.terms) {
      a += t.coef * x[t.var];
      scale = std::max(scale, std::abs(t.coef * x[t.var]));
    }
    const double r = a - con.rhs;
    double viol = 0.0;
    if (con.rel == Relation::LE) viol = r;
    else if (con.rel == Relation::GE) viol = -r;
    else viol = std::abs(r);
    worst = std::max(worst, viol / scale);
  }
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const Variable& v = vars_[j];
    const double scale = 1.0 + std::max(std::abs(v.lb), std::abs(v.ub) == kInf ? 0.0 : std::abs(v.ub));
    if (v.lb != -kInf) worst = std::max(worst, (v.lb - x[j]) / scale);
    if (v.ub != kInf) worst = std::max(worst, (x[j] - v.ub) / scale);
  }
  return worst;
}

std::string ModelIR::to_lp_format() const {
  std::ostringstream out;
  out << "\\ " << (name.empty() ? "model" : name) << "\n";
  out << "Minimize\n obj:";
  bool first = true;
  for (std::size_t j = 0; j < vars_.size(); ++j) {
    const double c = vars_[j].cost;
    if (c == 0.0) continue;
    if (first && c >= 0.0) out << " " << num(c);
    else out << (c >= 0.0 ? " + " : " - ") << num(std::abs(c));
    out << " " << vars_[j].name;
    first = false;
  }
  if (first) out << " 0 " << (vars_.empty() ? "x" : vars_[0].name);
  out << "\nSubject To\n";
  for (const LinearConstraint& con : cons_) {
    out << " " << con.name << ":";
    bool f = true;
    for (const LinTerm& t : con.terms) {
      if (f && t.coef >= 0.0) out << " " << num(t.coef);
      else out << (t.coef >= 0.0 ? " + " : " - ") << num(std::abs(t.coef));
      out << " " << vars_[t.var].name;
      f = false;
    }
    if (f) out << " 0 " << vars_[0].name;
    const char* rel = con.rel == Relation::LE ? "<=" : con.rel == Relation::EQ ? "=" : ">=";
    out << " " << rel << " " << num(con.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const Variable& v : vars_) {
    if (v.lb == 0.0 && v.ub == kInf) continue;  // LP-format default
    if (v.lb == -kInf && v.ub == kInf) {
      out << " " << v.name << " free\n";
    } else if (v.lb == v.ub) {
      out << " " << v.name << " = " << num(v.lb) << "\n";
    } else if (v.lb == -kInf) {
      out << " " << v.name << " <= " << num(v.ub) << "\n";
    } else if (v.ub == kInf) {
      out << " " << v.name << " >= " << num(v.lb) << "\n";
    } else {
      out << " " << num(v.lb) << " <= " << v.name << " <= " << num(v.ub) << "\n";
    }
  }
  bool any_bin = false;
  for (const Variable& v : vars_) {
    if (v.is_integer) {
      if (!any_bin) out << "Binaries\n";
      any_bin = true;
      out << " " << v.name << "\n";
    }
  }
  out << "End\n";
  return out.str();
}

}  // namespace resplan
