#include "resplan/dro_verify.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "resplan/errors.hpp"
#include "resplan/formulations.hpp"
#include "resplan/lp_solver.hpp"

namespace resplan {

SecondStageSolution second_stage_cost(const Instance& instance, const Grid& capacity,
                                      const Grid& demand) {
  BuiltSecondStage built = build_second_stage(instance, capacity, demand);
  LpSolution sol = solve_lp(built.model);
  if (sol.status != LpStatus::Optimal) {
    // backlog variables make every capacity plan feasible
    throw std::logic_error("second_stage_cost: recourse LP did not solve to optimality");
  }
  const SecondStageLayout& L = built.layout;
  SecondStageSolution out;
  out.objective = sol.objective;
  out.shipments = Cube(L.num_dcs, L.num_sites, L.periods);
  out.inventory = Grid(L.num_sites, L.periods);
  out.backlog = Grid(L.num_sites, L.periods);
  for (int i = 0; i < L.num_dcs; ++i) {
    for (int j = 0; j < L.num_sites; ++j) {
      for (int t = 0; t < L.periods; ++t) {
        double v = std::max(0.0, sol.x[L.ship(i, j, t)]);
        out.shipments(i, j, t) = v;
        out.shipping_cost += instance.shipping_unit_cost(i, j, t) * v;
      }
    }
  }
  for (int j = 0; j < L.num_sites; ++j) {
    for (int t = 0; t < L.periods; ++t) {
      double inv = std::max(0.0, sol.x[L.inv(j, t)]);
      double un = std::max(0.0, sol.x[L.unmet(j, t)]);
      out.inventory(j, t) = inv;
      out.backlog(j, t) = un;
      out.inventory_cost += instance.inventory_unit_cost(j, t) * inv;
      out.penalty_cost += instance.penalty_unit_cost(j, t) * un;
    }
  }
  return out;
}

DualCertificate second_stage_dual(const Instance& instance, const Grid& capacity,
                                  const Grid& demand) {
  const std::string context = "second_stage_dual";
  const int I = instance.num_dcs();
  const int J = instance.num_sites();
  const int T = instance.periods;
  if (instance.has_dc_inventory()) {
    throw InputError(context + ": covers the base and lead-time recourse only");
  }
  if (capacity.rows() != I || capacity.cols() != T) {
    throw InputError(context + ": capacity grid does not match (DC, period) shape");
  }
  if (demand.rows() != J || demand.cols() != T) {
    throw InputError(context + ": demand grid does not match (site, period) shape");
  }

  // Maximization written as minimization of the negated objective.
  // theta(i,t) prices capacity row (i,t): contributes capacity(i,t) each.
  // gamma(j,t) prices the flow row (j,t): demand, plus the initial inventory
  // and backlog correction in the first period.
  ModelIR m;
  m.name = instance.name + "_recourse_dual";
  auto theta_id = [&](int i, int t) { return i * T + t; };
  auto gamma_id = [&](int j, int t) { return I * T + j * T + t; };
  for (int i = 0; i < I; ++i) {
    for (int t = 0; t < T; ++t) {
      m.add_variable("theta_" + std::to_string(i) + "_" + std::to_string(t), -kInf, 0.0,
                     -capacity(i, t));
    }
  }
  for (int j = 0; j < J; ++j) {
    for (int t = 0; t < T; ++t) {
      double rhs = demand(j, t);
      if (t == 0) rhs += instance.initial_backlog[j] - instance.initial_inventory[j];
      m.add_variable("gamma_" + std::to_string(j) + "_" + std::to_string(t), -kInf, kInf,
                     -rhs);
    }
  }
  // one dual constraint per primal column
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < T; ++t) {
        int arrive = t + instance.lead(i, j);
        std::vector<LinTerm> terms{{theta_id(i, t), 1.0}};
        if (arrive < T) terms.push_back({gamma_id(j, arrive), 1.0});
        m.add_constraint("ship_" + std::to_string(i) + "_" + std::to_string(j) + "_" +
                             std::to_string(t),
                         std::move(terms), Relation::LE,
                         instance.shipping_unit_cost(i, j, t));
      }
    }
  }
  for (int j = 0; j < J; ++j) {
    for (int t = 0; t < T; ++t) {
      std::vector<LinTerm> terms{{gamma_id(j, t), -1.0}};
      if (t + 1 < T) terms.push_back({gamma_id(j, t + 1), 1.0});
      m.add_constraint("inv_" + std::to_string(j) + "_" + std::to_string(t),
                       std::move(terms), Relation::LE, instance.inventory_unit_cost(j, t));
    }
  }
  for (int j = 0; j < J; ++j) {
    for (int t = 0; t < T; ++t) {
      std::vector<LinTerm> terms{{gamma_id(j, t), 1.0}};
      if (t + 1 < T) terms.push_back({gamma_id(j, t + 1), -1.0});
      m.add_constraint("unmet_" + std::to_string(j) + "_" + std::to_string(t),
                       std::move(terms), Relation::LE, instance.penalty_unit_cost(j, t));
    }
  }

  LpSolution sol = solve_lp(m);
  if (sol.status != LpStatus::Optimal) {
    // the primal has complete recourse, so its dual is solvable too
    throw std::logic_error("second_stage_dual: dual LP did not solve to optimality");
  }

  DualCertificate cert;
  cert.theta = Grid(I, T);
  cert.gamma = Grid(J, T);
  cert.value = -sol.objective;
  for (int i = 0; i < I; ++i) {
    for (int t = 0; t < T; ++t) cert.theta(i, t) = sol.x[theta_id(i, t)];
  }
  for (int j = 0; j < J; ++j) {
    for (int t = 0; t < T; ++t) cert.gamma(j, t) = sol.x[gamma_id(j, t)];
  }
  cert.max_infeasibility = m.max_violation(sol.x);
  return cert;
}

WorstCase worst_case_expectation_over(const AmbiguitySpec& ambiguity,
                                      const std::vector<double>& g) {
  ModelIR m = build_worst_case_lp(ambiguity, g);
  LpSolution sol = solve_lp(m);
  if (sol.status != LpStatus::Optimal) {
    throw InputError("worst_case_expectation: ambiguity set admits no distribution");
  }
  WorstCase out;
  out.value = -sol.objective;
  out.distribution.resize(g.size());
  for (size_t k = 0; k < g.size(); ++k) {
    out.distribution[k] = std::max(0.0, sol.x[static_cast<int>(k)]);
  }
  return out;
}

WorstCaseDual worst_case_expectation_dual_over(const AmbiguitySpec& ambiguity,
                                               const std::vector<double>& g) {
  std::vector<MomentRowValues> rows = moment_rows(ambiguity);
  const int K = ambiguity.num_support();
  const int R = static_cast<int>(rows.size());
  if (static_cast<int>(g.size()) != K) {
    throw InputError("worst_case_expectation_dual: one cost per support point required");
  }
  ModelIR m;
  m.name = "worst_case_dual";
  // alpha_r prices the lower moment bound, beta_r the upper; row 0 is the
  // normalization with both bounds equal to 1
  m.add_variable("alpha_norm", 0.0, kInf, -1.0);
  for (int r = 0; r < R; ++r) {
    m.add_variable("alpha_" + rows[r].name, 0.0, kInf, -rows[r].lo);
  }
  m.add_variable("beta_norm", 0.0, kInf, 1.0);
  for (int r = 0; r < R; ++r) {
    m.add_variable("beta_" + rows[r].name, 0.0, kInf, rows[r].hi);
  }
  for (int k = 0; k < K; ++k) {
    std::vector<LinTerm> terms;
    terms.push_back({0, -1.0});
    for (int r = 0; r < R; ++r) terms.push_back({1 + r, -rows[r].value[k]});
    terms.push_back({1 + R, 1.0});
    for (int r = 0; r < R; ++r) terms.push_back({2 + R + r, rows[r].value[k]});
    m.add_constraint("supp_" + std::to_string(k), std::move(terms), Relation::GE, g[k]);
  }
  LpSolution sol = solve_lp(m);
  if (sol.status != LpStatus::Optimal) {
    // feasible by construction (beta_norm can cover any g), so a non-optimal
    // status means the primal set is empty and this dual is unbounded
    throw InputError("worst_case_expectation_dual: ambiguity set admits no distribution");
  }
  WorstCaseDual out;
  out.value = sol.objective;
  out.alpha.resize(R + 1);
  out.beta.resize(R + 1);
  for (int r = 0; r <= R; ++r) {
    out.alpha[r] = std::max(0.0, sol.x[r]);
    out.beta[r] = std::max(0.0, sol.x[1 + R + r]);
  }
  return out;
}

std::vector<double> recourse_costs(const Instance& instance, const Grid& capacity,
                                   const AmbiguitySpec& ambiguity) {
  const int K = ambiguity.num_support();
  std::vector<double> g(K);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < K; ++k) {
    g[k] = second_stage_cost(instance, capacity, ambiguity.support[k]).objective;
  }
  return g;
}

WorstCase worst_case_expectation(const Instance& instance, const Grid& capacity,
                                 const AmbiguitySpec& ambiguity) {
  return worst_case_expectation_over(ambiguity, recourse_costs(instance, capacity, ambiguity));
}

WorstCaseDual worst_case_expectation_dual(const Instance& instance, const Grid& capacity,
                                          const AmbiguitySpec& ambiguity) {
  return worst_case_expectation_dual_over(ambiguity,
                                          recourse_costs(instance, capacity, ambiguity));
}

}  // namespace resplan
