#pragma once
// Revised simplex for ModelIR linear programs (integrality flags ignored).
//
// Algorithm notes that are part of the contract:
//  - bounded-variable primal simplex, two phases; phase 1 minimizes the sum
//    of bound violations of basic variables;
//  - Dantzig pricing with a Bland's-rule fallback that engages after
//    `stall_limit` iterations without objective progress (anti-cycling);
//  - basis factorization refreshed periodically, product-form updates between
//    refreshes; fixed variables are held nonbasic and empty rows keep their
//    logical variable basic (the only presolve applied);
//  - deterministic: identical models yield identical iteration sequences.
//
// Dual convention: y_i is the objective change per unit increase of the
// right-hand side of constraint i. At optimality this means y_i <= 0 for
// binding <= rows and y_i >= 0 for binding >= rows of a minimization.

#include <memory>
#include <vector>

#include "resplan/model_ir.hpp"

namespace resplan {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

const char* to_string(LpStatus s);

struct LpOptions {
  double feas_tol = 1e-8;        // per-variable, scaled by 1 + |bound|
  double opt_tol = 1e-9;         // reduced-cost threshold, scaled by 1 + |cost|
  double pivot_tol = 1e-9;       // minimum pivot magnitude
  int stall_limit = 100;         // degenerate iterations before Bland's rule
  double iteration_factor = 50;  // iteration cap = factor * (rows + cols)
  bool scale = true;             // geometric-mean equilibration
};

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;             // per variable
  std::vector<double> y;             // per constraint, see dual convention
  std::vector<double> reduced_cost;  // per variable
  long iterations = 0;
  double primal_residual = 0.0;      // max scaled constraint/bound violation
  double dual_gap = 0.0;             // |primal obj - dual obj| / (1 + |primal obj|)
};

// Reusable solver state: build once, then adjust bounds or right-hand sides
// and re-solve, optionally keeping the current basis (warm start). Used by
// branch-and-bound (bound fixing) and repeated second-stage evaluation
// (right-hand-side swaps).
class LpEngine {
 public:
  explicit LpEngine(const ModelIR& model, LpOptions options = {});
  ~LpEngine();
  LpEngine(const LpEngine&) = delete;
  LpEngine& operator=(const LpEngine&) = delete;

  int num_rows() const;
  int num_cols() const;  // structural variables only

  void set_bounds(int var, double lb, double ub);
  void set_rhs(int row, double rhs);

  LpSolution solve();    // cold start from the all-logical basis
  LpSolution resolve();  // warm start from the current basis

  // Basis snapshot per column (structurals then logicals); opaque encoding.
  std::vector<unsigned char> basis() const;
  void load_basis(const std::vector<unsigned char>& snapshot);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LpSolution solve_lp(const ModelIR& model, const LpOptions& options = {});

}  // namespace resplan
