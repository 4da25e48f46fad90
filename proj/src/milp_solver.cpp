#include "resplan/milp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "resplan/errors.hpp"

namespace resplan {

namespace {

struct Node {
  double bound = 0.0;
  long seq = 0;
  std::vector<double> lo, hi;  // bounds per integer variable
  std::vector<unsigned char> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;                              // FIFO among ties
  }
};

std::vector<int> integer_vars(const ModelIR& model) {
  std::vector<int> ids;
  for (int j = 0; j < model.num_variables(); ++j) {
    if (model.variable(j).is_integer) ids.push_back(j);
  }
  return ids;
}

void check_binary(const Variable& v) {
  if (v.lb < -1e-12 || v.ub > 1.0 + 1e-12) {
    throw InputError("integer variable '" + v.name + "' is not binary");
  }
}

}  // namespace

const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Unbounded: return "unbounded";
    case MilpStatus::GapLimit: return "gap_limit";
    case MilpStatus::NodeLimit: return "node_limit";
  }
  return "unknown";
}

MilpSolution solve_milp(const ModelIR& model, const MilpOptions& options) {
  std::vector<int> ivars = integer_vars(model);
  for (int v : ivars) check_binary(model.variable(v));

  LpEngine engine(model, options.lp);
  MilpSolution best;
  best.status = MilpStatus::Infeasible;

  LpSolution root = engine.solve();
  ++best.nodes;
  if (root.status == LpStatus::Unbounded) {
    best.status = MilpStatus::Unbounded;
    best.best_bound = -kInf;
    return best;
  }
  if (root.status == LpStatus::Infeasible) {
    best.best_bound = kInf;
    return best;
  }
  if (root.status == LpStatus::IterationLimit) {
    throw SolverLimit("branch-and-bound: root relaxation hit the iteration limit");
  }

  int k = static_cast<int>(ivars.size());
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  long seq = 0;
  bool have_incumbent = false;
  double cutoff = kInf;

  auto prune_level = [&]() {
    return have_incumbent
               ? best.objective - std::max(options.abs_gap,
                                           options.rel_gap * std::abs(best.objective))
               : kInf;
  };

  // Examines a solved relaxation: either records an incumbent or pushes the
  // two children of the most fractional binary.
  auto expand = [&](const LpSolution& sol, const std::vector<double>& lo,
                    const std::vector<double>& hi) {
    int branch = -1;
    double score = options.int_tol;
    for (int idx = 0; idx < k; ++idx) {
      double xi = sol.x[ivars[idx]];
      double frac = xi - std::floor(xi);
      double dist = std::min(frac, 1.0 - frac);
      if (dist > score) {
        score = dist;
        branch = idx;
      }
    }
    if (branch < 0) {
      if (!have_incumbent || sol.objective < best.objective) {
        have_incumbent = true;
        best.status = MilpStatus::Optimal;
        best.objective = sol.objective;
        best.x = sol.x;
        for (int v : ivars) best.x[v] = std::round(best.x[v]);
        cutoff = prune_level();
      }
      return;
    }
    double xb = sol.x[ivars[branch]];
    std::vector<unsigned char> snap = engine.basis();
    Node down{sol.objective, seq++, lo, hi, snap};
    down.hi[branch] = std::floor(xb);
    Node up{sol.objective, seq++, lo, hi, std::move(snap)};
    up.lo[branch] = std::ceil(xb);
    open.push(std::move(down));
    open.push(std::move(up));
  };

  std::vector<double> lo(k), hi(k);
  for (int idx = 0; idx < k; ++idx) {
    lo[idx] = model.variable(ivars[idx]).lb;
    hi[idx] = model.variable(ivars[idx]).ub;
  }
  best.best_bound = root.objective;
  expand(root, lo, hi);

  // Smallest bound among nodes pruned by the gap cutoff; the proven global
  // bound must not exceed it.
  double pruned_min = kInf;

  while (!open.empty()) {
    if (best.nodes >= options.node_limit) {
      best.status = MilpStatus::NodeLimit;
      best.best_bound = std::min({open.top().bound, pruned_min,
                                  have_incumbent ? best.objective : kInf});
      return best;
    }
    Node node = open.top();
    open.pop();
    // best-first order: once the smallest bound cannot beat the incumbent,
    // no remaining node can
    if (node.bound >= cutoff) {
      pruned_min = std::min(pruned_min, node.bound);
      break;
    }

    for (int idx = 0; idx < k; ++idx) {
      engine.set_bounds(ivars[idx], node.lo[idx], node.hi[idx]);
    }
    engine.load_basis(node.basis);
    LpSolution sol = engine.resolve();
    ++best.nodes;
    if (sol.status == LpStatus::IterationLimit) {
      throw SolverLimit("branch-and-bound: node relaxation hit the iteration limit");
    }
    if (sol.status != LpStatus::Optimal) continue;  // infeasible child
    if (sol.objective >= cutoff) {
      pruned_min = std::min(pruned_min, sol.objective);
      continue;
    }
    expand(sol, node.lo, node.hi);
  }

  if (!have_incumbent) {
    best.best_bound = kInf;
    return best;
  }
  best.best_bound = std::min(best.objective, pruned_min);
  double closure = std::max(1e-6, 1e-6 * std::abs(best.objective));
  best.status = best.objective - best.best_bound <= closure ? MilpStatus::Optimal
                                                            : MilpStatus::GapLimit;
  return best;
}

MilpSolution enumerate_bruteforce(const ModelIR& model, const MilpOptions& options,
                                  int max_free) {
  std::vector<int> ivars = integer_vars(model);
  std::vector<int> free_vars;
  for (int v : ivars) {
    const Variable& var = model.variable(v);
    check_binary(var);
    if (var.lb != var.ub) free_vars.push_back(v);
  }
  int k = static_cast<int>(free_vars.size());
  if (k > max_free) {
    throw InputError("enumerate_bruteforce: " + std::to_string(k) +
                     " free binaries exceed the limit of " + std::to_string(max_free));
  }

  LpEngine engine(model, options.lp);
  MilpSolution best;
  best.status = MilpStatus::Infeasible;
  best.best_bound = kInf;

  for (long mask = 0; mask < (1L << k); ++mask) {
    for (int idx = 0; idx < k; ++idx) {
      double v = (mask >> idx) & 1 ? 1.0 : 0.0;
      engine.set_bounds(free_vars[idx], v, v);
    }
    LpSolution sol = engine.solve();
    ++best.nodes;
    if (sol.status == LpStatus::Unbounded) {
      best.status = MilpStatus::Unbounded;
      best.best_bound = -kInf;
    }
    if (sol.status != LpStatus::Optimal) continue;
    if (best.status != MilpStatus::Optimal || sol.objective < best.objective) {
      best.status = MilpStatus::Optimal;
      best.objective = sol.objective;
      best.x = sol.x;
      for (int v : ivars) best.x[v] = std::round(best.x[v]);
      best.best_bound = sol.objective;
    }
  }
  return best;
}

}  // namespace resplan
