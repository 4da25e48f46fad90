#include "resplan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "resplan/errors.hpp"
#include "resplan/lp_solver.hpp"
#include "resplan/milp_solver.hpp"

namespace resplan {

namespace {

struct ScenarioOutcome {
  double cost = 0.0;
  double ship_cost = 0.0;
  double inv_cost = 0.0;
  double pen_cost = 0.0;
  double terminal_backlog = 0.0;
  std::vector<double> site_backlog;    // terminal, per site
  std::vector<double> period_backlog;  // total, per period
};

void check_plan(const Instance& instance, const std::vector<int>& open,
                const Grid& capacity) {
  const int I = instance.num_dcs();
  const int T = instance.periods;
  if (static_cast<int>(open.size()) != I) {
    throw InputError("plan open flags do not match the DC count");
  }
  if (capacity.rows() != I || capacity.cols() != T) {
    throw InputError("plan capacity grid does not match (DC, period) shape");
  }
  const double tol = 1e-6;
  for (int i = 0; i < I; ++i) {
    for (int t = 0; t < T; ++t) {
      double cap = instance.dc_capacity_limit[i] * open[i];
      if (capacity(i, t) > cap + tol) {
        throw InputError("plan violates capacity link link_" + std::to_string(i) + "_" +
                         std::to_string(t) + ": " + std::to_string(capacity(i, t)) +
                         " > " + std::to_string(cap));
      }
    }
  }
  for (int t = 0; t < T; ++t) {
    double total = 0.0;
    for (int i = 0; i < I; ++i) total += capacity(i, t);
    if (total > instance.temporal_budget[t] + tol) {
      throw InputError("plan violates temporal budget budget_" + std::to_string(t) +
                       ": " + std::to_string(total) + " > " +
                       std::to_string(instance.temporal_budget[t]));
    }
  }
}

// Solves one scenario from the shared reference basis and extracts costs.
ScenarioOutcome evaluate_one(LpEngine& engine, const BuiltSecondStage& built,
                             const Instance& instance,
                             const std::vector<unsigned char>& ref_basis,
                             const Grid& demand) {
  const SecondStageLayout& L = built.layout;
  engine.load_basis(ref_basis);
  for (int j = 0; j < L.num_sites; ++j) {
    for (int t = 0; t < L.periods; ++t) {
      double rhs = demand(j, t);
      if (t == 0) rhs += instance.initial_backlog[j] - instance.initial_inventory[j];
      engine.set_rhs(L.row_flow(j, t), rhs);
    }
  }
  LpSolution sol = engine.resolve();
  if (sol.status != LpStatus::Optimal) {
    // backlog variables make every demand feasible
    throw std::logic_error("evaluation: recourse LP did not solve to optimality");
  }
  ScenarioOutcome out;
  out.cost = sol.objective;
  out.site_backlog.assign(L.num_sites, 0.0);
  out.period_backlog.assign(L.periods, 0.0);
  for (int i = 0; i < L.num_dcs; ++i) {
    for (int j = 0; j < L.num_sites; ++j) {
      for (int t = 0; t < L.periods; ++t) {
        out.ship_cost +=
            instance.shipping_unit_cost(i, j, t) * std::max(0.0, sol.x[L.ship(i, j, t)]);
      }
    }
  }
  for (int j = 0; j < L.num_sites; ++j) {
    for (int t = 0; t < L.periods; ++t) {
      double inv = std::max(0.0, sol.x[L.inv(j, t)]);
      double un = std::max(0.0, sol.x[L.unmet(j, t)]);
      out.inv_cost += instance.inventory_unit_cost(j, t) * inv;
      out.pen_cost += instance.penalty_unit_cost(j, t) * un;
      out.period_backlog[t] += un;
    }
    double terminal = std::max(0.0, sol.x[L.unmet(j, L.periods - 1)]);
    out.site_backlog[j] = terminal;
    out.terminal_backlog += terminal;
  }
  return out;
}

PlanEvaluation reduce_outcomes(const Instance& instance, const std::vector<int>& open,
                               const Grid& capacity, const ScenarioSet& scenarios,
                               const std::vector<ScenarioOutcome>& outcomes) {
  const int J = instance.num_sites();
  const int T = instance.periods;
  const int W = scenarios.count();
  PlanEvaluation eval;
  for (int i = 0; i < instance.num_dcs(); ++i) {
    eval.operating += instance.operating_cost[i] * open[i];
    for (int t = 0; t < T; ++t) {
      eval.capacity += instance.capacity_cost(i, t) * capacity(i, t);
    }
  }
  eval.scenario_cost.resize(W);
  eval.scenario_unmet.resize(W);
  eval.region_unmet_pct.assign(J, 0.0);
  eval.period_backlog.assign(T, 0.0);
  std::vector<double> site_mean(J, 0.0);
  double mean = 0.0, second = 0.0;
  for (int w = 0; w < W; ++w) {
    double p = scenarios.probabilities[w];
    const ScenarioOutcome& o = outcomes[w];
    eval.scenario_cost[w] = o.cost;
    eval.scenario_unmet[w] = o.terminal_backlog;
    eval.shipping += p * o.ship_cost;
    eval.inventory += p * o.inv_cost;
    eval.penalty += p * o.pen_cost;
    mean += p * o.terminal_backlog;
    second += p * o.terminal_backlog * o.terminal_backlog;
    for (int j = 0; j < J; ++j) site_mean[j] += p * o.site_backlog[j];
    for (int t = 0; t < T; ++t) eval.period_backlog[t] += p * o.period_backlog[t];
  }
  eval.total = eval.operating + eval.capacity + eval.shipping + eval.inventory +
               eval.penalty;
  eval.unmet_mean = mean;
  eval.unmet_std = std::sqrt(std::max(0.0, second - mean * mean));

  // lower percentiles over the weighted empirical distribution
  std::vector<std::pair<double, double>> ordered(W);
  for (int w = 0; w < W; ++w) {
    ordered[w] = {eval.scenario_unmet[w], scenarios.probabilities[w]};
  }
  std::sort(ordered.begin(), ordered.end());
  for (int q = 0; q < 5; ++q) {
    double level = kUnmetPercentiles[q] / 100.0;
    double cum = 0.0;
    double value = ordered.back().first;
    for (const auto& [v, p] : ordered) {
      cum += p;
      if (cum + 1e-12 >= level) {
        value = v;
        break;
      }
    }
    eval.unmet_percentile[q] = value;
  }

  // expected horizon demand plus initial backlog bounds the terminal backlog
  for (int j = 0; j < J; ++j) {
    double denom = instance.initial_backlog[j];
    for (int w = 0; w < W; ++w) {
      double p = scenarios.probabilities[w];
      for (int t = 0; t < T; ++t) denom += p * scenarios.demand[w](j, t);
    }
    eval.region_unmet_pct[j] = denom > 0.0 ? 100.0 * site_mean[j] / denom : 0.0;
  }
  return eval;
}

Grid mean_demand(const ScenarioSet& scenarios) {
  Grid mean(scenarios.demand[0].rows(), scenarios.demand[0].cols());
  for (int w = 0; w < scenarios.count(); ++w) {
    double p = scenarios.probabilities[w];
    for (int j = 0; j < mean.rows(); ++j) {
      for (int t = 0; t < mean.cols(); ++t) mean(j, t) += p * scenarios.demand[w](j, t);
    }
  }
  return mean;
}

PlanEvaluation evaluate_impl(const Instance& instance, const std::vector<int>& open,
                             const Grid& capacity, const ScenarioSet& scenarios,
                             bool parallel) {
  check_plan(instance, open, capacity);
  if (scenarios.count() == 0) throw InputError("evaluation: empty scenario set");
  require_valid(validate_scenarios(instance, scenarios), "out_of_sample_evaluate");

  BuiltSecondStage built = build_second_stage(instance, capacity, mean_demand(scenarios));
  std::vector<unsigned char> ref_basis;
  {
    LpEngine warmup(built.model);
    if (warmup.solve().status != LpStatus::Optimal) {
      throw std::logic_error("evaluation: reference recourse LP did not solve");
    }
    ref_basis = warmup.basis();
  }

  const int W = scenarios.count();
  std::vector<ScenarioOutcome> outcomes(W);
  if (parallel) {
#pragma omp parallel
    {
      LpEngine engine(built.model);
#pragma omp for schedule(static)
      for (int w = 0; w < W; ++w) {
        outcomes[w] =
            evaluate_one(engine, built, instance, ref_basis, scenarios.demand[w]);
      }
    }
  } else {
    LpEngine engine(built.model);
    for (int w = 0; w < W; ++w) {
      outcomes[w] = evaluate_one(engine, built, instance, ref_basis, scenarios.demand[w]);
    }
  }
  return reduce_outcomes(instance, open, capacity, scenarios, outcomes);
}

}  // namespace

PlanEvaluation out_of_sample_evaluate(const Instance& instance, const std::vector<int>& open,
                                      const Grid& capacity, const ScenarioSet& scenarios) {
  return evaluate_impl(instance, open, capacity, scenarios, true);
}

PlanEvaluation out_of_sample_evaluate_serial(const Instance& instance,
                                             const std::vector<int>& open,
                                             const Grid& capacity,
                                             const ScenarioSet& scenarios) {
  return evaluate_impl(instance, open, capacity, scenarios, false);
}

Instance apply_scarcity(const Instance& instance, double factor) {
  if (!(factor > 0.0) || factor > 1.0) {
    throw InputError("apply_scarcity: factor must lie in (0, 1], got " +
                     std::to_string(factor));
  }
  Instance scarce = instance;
  for (double& b : scarce.temporal_budget) b *= factor;
  return scarce;
}

DcPolicy dc_policy_from_string(const std::string& s) {
  if (s == "default") return DcPolicy::Default;
  if (s == "best_case") return DcPolicy::BestCase;
  if (s == "most_restrictive") return DcPolicy::MostRestrictive;
  throw InputError("unknown DC policy '" + s + "'");
}

const char* to_string(DcPolicy p) {
  switch (p) {
    case DcPolicy::Default: return "default";
    case DcPolicy::BestCase: return "best_case";
    case DcPolicy::MostRestrictive: return "most_restrictive";
  }
  return "unknown";
}

Instance apply_dc_policy(const Instance& instance, DcPolicy policy,
                         const std::vector<std::string>& preopened) {
  Instance out = instance;
  for (DcSite& site : out.dc_sites) {
    site.status = policy == DcPolicy::MostRestrictive ? DcStatus::Forbidden
                                                      : DcStatus::Candidate;
  }
  if (policy != DcPolicy::BestCase) {
    for (const std::string& id : preopened) {
      bool found = false;
      for (DcSite& site : out.dc_sites) {
        if (site.id == id) {
          site.status = DcStatus::Preopened;
          found = true;
          break;
        }
      }
      if (!found) throw InputError("apply_dc_policy: unknown DC site '" + id + "'");
    }
  }
  return out;
}

namespace {

MilpSolution solve_or_throw(const ModelIR& model, const std::string& stage) {
  MilpSolution sol = solve_milp(model);
  if (sol.status == MilpStatus::NodeLimit || sol.status == MilpStatus::GapLimit) {
    throw SolverLimit(stage + ": branch and bound stopped before proving optimality");
  }
  if (sol.status != MilpStatus::Optimal) {
    throw std::logic_error(stage + ": model unexpectedly " +
                           std::string(to_string(sol.status)));
  }
  return sol;
}

}  // namespace

std::vector<ApproachResult> compare_approaches(const Instance& instance,
                                               const ScenarioSet& scenarios_in,
                                               const ScenarioSet& scenarios_out,
                                               const AmbiguitySpec& ambiguity) {
  std::vector<ApproachResult> rows;

  {
    ApproachResult dt;
    dt.approach = "dt";
    BuiltSmip built = build_deterministic(instance, empirical_moments(scenarios_in));
    MilpSolution sol = solve_or_throw(built.model, "dt solve");
    dt.objective = sol.objective;
    dt.plan = extract_first_stage(built.layout, sol.x);
    rows.push_back(std::move(dt));
  }
  {
    ApproachResult sp;
    sp.approach = "sp";
    BuiltSmip built = build_extensive_smip(instance, scenarios_in);
    MilpSolution sol = solve_or_throw(built.model, "sp solve");
    sp.objective = sol.objective;
    sp.plan = extract_first_stage(built.layout, sol.x);
    rows.push_back(std::move(sp));
  }
  {
    ApproachResult dro;
    dro.approach = "dro";
    BuiltDro built = build_dro_milp(instance, ambiguity);
    MilpSolution sol = solve_or_throw(built.model, "dro solve");
    dro.objective = sol.objective;
    dro.plan = extract_first_stage(built.layout, sol.x);
    rows.push_back(std::move(dro));
  }

  for (ApproachResult& row : rows) {
    row.evaluation =
        out_of_sample_evaluate(instance, row.plan.open, row.plan.capacity, scenarios_out);
  }
  double best = rows[0].evaluation.total;
  for (const ApproachResult& row : rows) best = std::min(best, row.evaluation.total);
  for (ApproachResult& row : rows) {
    row.pct_over_best =
        best > 0.0 ? 100.0 * (row.evaluation.total - best) / best : 0.0;
  }
  return rows;
}

}  // namespace resplan
