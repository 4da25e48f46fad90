#pragma once
// Out-of-sample evaluation of a fixed first-stage plan: per-scenario recourse
// solves, probability-weighted cost breakdown, and unmet-demand statistics.
// Also the experiment knobs (scarcity, DC policy) and the three-approach
// comparison table.
//
// Determinism: each scenario's recourse LP warm-starts from one shared
// reference basis (solved once on the mean demand), so every per-scenario
// number is independent of evaluation order and thread count. The parallel
// kernel and the serial reference produce identical results; the benchmark
// target compares their speed.

#include <string>
#include <vector>

#include "resplan/formulations.hpp"
#include "resplan/grid.hpp"
#include "resplan/instance.hpp"
#include "resplan/scenario.hpp"

namespace resplan {

// Percentile levels reported for the unmet-demand distribution.
inline constexpr int kUnmetPercentiles[5] = {75, 80, 85, 90, 95};

struct PlanEvaluation {
  // probability-weighted currency totals; total is their sum
  double operating = 0.0;
  double capacity = 0.0;
  double shipping = 0.0;
  double inventory = 0.0;
  double penalty = 0.0;
  double total = 0.0;

  std::vector<double> scenario_cost;   // recourse objective per scenario
  std::vector<double> scenario_unmet;  // end-of-horizon backlog per scenario

  // unmet demand = end-of-horizon backlog summed over sites: backlog carries
  // over, so the terminal level is the non-double-counting shortfall measure
  double unmet_mean = 0.0;
  double unmet_std = 0.0;  // probability-weighted population deviation
  // lower percentiles at the levels in kUnmetPercentiles: the smallest
  // observed value whose cumulative probability reaches the level
  double unmet_percentile[5] = {0, 0, 0, 0, 0};

  // expected terminal backlog of site j as a percentage of its expected
  // horizon demand plus initial backlog; in [0, 100]
  std::vector<double> region_unmet_pct;
  // expected total backlog per period, for transparency alongside the
  // terminal measure
  std::vector<double> period_backlog;
};

// Evaluates the plan on every scenario. The plan must satisfy the capacity
// link (h <= M x) and the temporal budgets within 1e-6; violations are
// rejected naming the constraint. Recourse honors the instance's lead times.
PlanEvaluation out_of_sample_evaluate(const Instance& instance,
                                      const std::vector<int>& open, const Grid& capacity,
                                      const ScenarioSet& scenarios);

// Serial reference implementation with identical results, kept for testing
// the parallel kernel.
PlanEvaluation out_of_sample_evaluate_serial(const Instance& instance,
                                             const std::vector<int>& open,
                                             const Grid& capacity,
                                             const ScenarioSet& scenarios);

// Scales every temporal budget B_t by factor; factor must lie in (0, 1].
Instance apply_scarcity(const Instance& instance, double factor);

enum class DcPolicy { Default, BestCase, MostRestrictive };

DcPolicy dc_policy_from_string(const std::string& s);
const char* to_string(DcPolicy p);

// Rewrites DC statuses: default opens the listed sites and leaves the rest
// to the optimizer; best_case frees every site; most_restrictive opens the
// listed sites and forbids the rest. Unknown site ids are rejected.
Instance apply_dc_policy(const Instance& instance, DcPolicy policy,
                         const std::vector<std::string>& preopened);

struct ApproachResult {
  std::string approach;  // dt, sp, dro
  double objective = 0.0;  // in-sample optimal objective
  FirstStagePlan plan;
  PlanEvaluation evaluation;
  double pct_over_best = 0.0;  // total-cost % over the best approach's total
};

// Solves all three approaches (DT on the in-sample mean, SP on the in-sample
// set, DRO on the ambiguity set), evaluates each plan out of sample, and
// reports rows in dt, sp, dro order with percentage over the row-minimum
// total. Throws SolverLimit if any solve hits its node limit.
std::vector<ApproachResult> compare_approaches(const Instance& instance,
                                               const ScenarioSet& scenarios_in,
                                               const ScenarioSet& scenarios_out,
                                               const AmbiguitySpec& ambiguity);

}  // namespace resplan
