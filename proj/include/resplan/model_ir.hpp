#pragma once
// Solver-agnostic mixed-integer linear model. The objective sense is always
// minimize. Variable names form a bijection onto column indices; builders use
// them as the semantic handle back to model indices.

#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace resplan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LE, EQ, GE };

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = kInf;
  double cost = 0.0;       // objective coefficient
  bool is_integer = false; // binaries only in this toolkit

  bool operator==(const Variable&) const = default;
};

struct LinTerm {
  int var;
  double coef;

  bool operator==(const LinTerm&) const = default;
};

struct LinearConstraint {
  std::string name;
  std::vector<LinTerm> terms;  // unique variables, ascending index
  Relation rel = Relation::LE;
  double rhs = 0.0;

  bool operator==(const LinearConstraint&) const = default;
};

class ModelIR {
 public:
  std::string name;

  // Throws std::logic_error on duplicate variable names.
  int add_variable(std::string var_name, double lb, double ub, double cost,
                   bool is_integer = false);
  // Terms are sorted by variable index; duplicate variables are merged and
  // zero coefficients dropped. Out-of-range indices throw std::logic_error.
  int add_constraint(std::string con_name, std::vector<LinTerm> terms, Relation rel, double rhs);

  int num_variables() const { return static_cast<int>(vars_.size()); }
  int num_constraints() const { return static_cast<int>(cons_.size()); }
  const std::vector<Variable>& variables() const { return vars_; }
  const std::vector<LinearConstraint>& constraints() const { return cons_; }
  Variable& variable(int id) { return vars_[id]; }
  const Variable& variable(int id) const { return vars_[id]; }
  LinearConstraint& constraint(int id) { return cons_[id]; }
  const LinearConstraint& constraint(int id) const { return cons_[id]; }

  // Throws std::out_of_range for unknown names.
  int variable_id(const std::string& var_name) const;
  bool has_variable(const std::string& var_name) const;

  double objective_value(const std::vector<double>& x) const;
  // Signed residual of constraint c at x: positive means violated for LE,
  // negative means violated for GE, any nonzero violates EQ.
  double constraint_activity(int c, const std::vector<double>& x) const;
  // Largest scaled violation over all constraints and variable bounds.
  double max_violation(const std::vector<double>& x) const;

  // Industry LP text format (Minimize / Subject To / Bounds / Binaries / End),
  // variables and constraints in declaration order.
  std::string to_lp_format() const;

 private:
  std::vector<Variable> vars_;
  std::vector<LinearConstraint> cons_;
  std::unordered_map<std::string, int> var_index_;
};

}  // namespace resplan
