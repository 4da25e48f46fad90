#pragma once
// Branch and bound for ModelIR models whose integer variables are binaries.
//
//  - best-first search: the node with the smallest LP relaxation bound is
//    expanded next, FIFO among ties;
//  - branching variable: most fractional value, lowest index among ties;
//  - branching is by bound fixing on a single LpEngine, children warm-start
//    from the parent's optimal basis;
//  - deterministic: identical models explore identical trees.
//
// enumerate_bruteforce is the independent reference: it tries every 0/1
// assignment of the free binaries (exactly 2^n LP solves) and keeps the best.

#include <vector>

#include "resplan/lp_solver.hpp"
#include "resplan/model_ir.hpp"

namespace resplan {

// GapLimit: an incumbent exists and every remaining node was pruned by the
// gap tolerances, but the proven bound is not within 1e-6 of the incumbent.
// With the default near-zero tolerances terminating runs report Optimal.
enum class MilpStatus { Optimal, Infeasible, Unbounded, GapLimit, NodeLimit };

const char* to_string(MilpStatus s);

struct MilpOptions {
  LpOptions lp;
  double int_tol = 1e-6;    // integrality tolerance on binaries
  double abs_gap = 1e-9;    // prune nodes within this of the incumbent
  double rel_gap = 1e-9;
  long node_limit = 200000;
};

struct MilpSolution {
  MilpStatus status = MilpStatus::NodeLimit;
  double objective = 0.0;
  std::vector<double> x;
  double best_bound = 0.0;  // proven lower bound on the optimum
  long nodes = 0;           // LP solves performed
};

MilpSolution solve_milp(const ModelIR& model, const MilpOptions& options = {});

// Exhaustive reference solver. Throws InputError if the model has a
// non-binary integer variable or more than `max_free` free binaries.
MilpSolution enumerate_bruteforce(const ModelIR& model, const MilpOptions& options = {},
                                  int max_free = 12);

}  // namespace resplan
