// Release gate: one PASS/FAIL line per shipping criterion, run by ctest as
// the `acceptance` test. Exit code 0 only when every hard criterion holds.
//
// Criteria, in print order:
//   1  recourse strong duality on 50 seeded (instance, capacity, demand)
//   2  worst-case expectation primal/dual agreement + robust MILP identity
//   3  branch and bound matches exhaustive enumeration on 20 seeded models
//   4  one-point ambiguity collapses robust = stochastic = deterministic
//   5  widening the ambiguity set never lowers the robust optimum
//   6  physical audit of every optimal solution produced in this binary
//   7a stochastic plan out-of-sample total <= deterministic plan's (hard)
//   7b robust plan has the least unmet demand (soft: a violation is reported
//      as a documented statistical deviation, not a release blocker)
//   8  scarce budgets: unmet >= conservation bound, approaches converge
//   9  extension models reduce to the base model in their trivial settings
//   10 identical configs produce byte-identical CSV artifacts

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "resplan/dro_verify.hpp"
#include "resplan/errors.hpp"
#include "resplan/evaluation.hpp"
#include "resplan/experiment.hpp"
#include "resplan/fixtures.hpp"
#include "resplan/formulations.hpp"
#include "resplan/instance.hpp"
#include "resplan/milp_solver.hpp"
#include "resplan/model_ir.hpp"
#include "resplan/scenario.hpp"

using namespace resplan;

namespace {

constexpr double kRelTol = 1e-6;         // duality and equivalence agreement
constexpr double kMonotoneSlack = 1e-8;  // permitted decrease in widening sweeps
constexpr double kAuditTol = 1e-6;       // ceiling on physical residuals
constexpr double kPairwiseShare = 0.02;  // scarce-regime unmet gap vs total demand
constexpr double kStrongDualitySeconds = 10.0;
constexpr double kOracleSeconds = 60.0;
constexpr double kDeskSeconds = 300.0;

struct Row {
  double order = 0.0;
  std::string label;
  bool ok = false;
  bool hard = true;
  std::string detail;
};

std::vector<Row> g_rows;

void push_row(double order, std::string label, bool ok, std::string detail,
              bool hard = true) {
  g_rows.push_back({order, std::move(label), ok, hard, std::move(detail)});
}

std::string fmt(const char* pattern, ...) {
  va_list args;
  va_start(args, pattern);
  char buffer[512];
  std::vsnprintf(buffer, sizeof buffer, pattern, args);
  va_end(args);
  return std::string(buffer);
}

bool rel_close(double a, double b) {
  return std::abs(a - b) <= kRelTol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

double rel_gap(double a, double b) {
  return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b)));
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// criterion 6 accumulator: every optimal solution vector produced below is
// audited against the instance data and the worst residual is kept
struct AuditTally {
  double worst = 0.0;
  long solutions = 0;
  void add(const SolutionAudit& audit) {
    worst = std::max(worst, audit.worst());
    ++solutions;
  }
};

AuditTally g_audit;

Grid random_capacity(Rng& rng, const Instance& inst) {
  Grid h(inst.num_dcs(), inst.periods);
  for (int i = 0; i < inst.num_dcs(); ++i) {
    for (int t = 0; t < inst.periods; ++t) {
      h(i, t) = rng.uniform(0.0, inst.dc_capacity_limit[i]);
    }
  }
  return h;
}

Grid random_demand(Rng& rng, const MomentEstimate& mom) {
  Grid d(mom.sites(), mom.periods());
  for (int j = 0; j < mom.sites(); ++j) {
    for (int t = 0; t < mom.periods(); ++t) {
      d(j, t) = std::max(0.0, rng.normal(mom.mean(j, t), mom.std_dev(j, t)));
    }
  }
  return d;
}

Grid random_lead(uint64_t seed, int num_dcs, int num_sites) {
  Grid lead(num_dcs, num_sites);
  Rng rng(seed * 31 + 7);
  for (int i = 0; i < num_dcs; ++i) {
    for (int j = 0; j < num_sites; ++j) {
      lead(i, j) = std::floor(rng.uniform01() * 2.999);
    }
  }
  return lead;
}

double first_stage_cost(const Instance& inst, const FirstStagePlan& plan) {
  double cost = 0.0;
  for (int i = 0; i < inst.num_dcs(); ++i) {
    cost += inst.operating_cost[i] * plan.open[i];
    for (int t = 0; t < inst.periods; ++t) {
      cost += inst.capacity_cost(i, t) * plan.capacity(i, t);
    }
  }
  return cost;
}

// solves to optimality or records a row failure through the returned flag
bool solved_optimal(const ModelIR& model, MilpSolution& out) {
  out = solve_milp(model);
  return out.status == MilpStatus::Optimal;
}

void criterion_strong_duality() {
  auto t0 = Clock::now();
  bool ok = true;
  double worst = 0.0;
  for (uint64_t seed = 200; seed < 250; ++seed) {
    int num_dcs = 2 + static_cast<int>(seed % 3);
    int num_sites = 2 + static_cast<int>(seed % 2);
    int periods = 1 + static_cast<int>(seed % 3);
    Instance inst = random_instance(seed, num_dcs, num_sites, periods);
    if (seed % 2 == 0) inst.lead_time = random_lead(seed, num_dcs, num_sites);
    MomentEstimate mom = random_moments(seed + 100, inst);
    Rng rng(seed + 500);
    Grid h = random_capacity(rng, inst);
    Grid d = random_demand(rng, mom);
    SecondStageSolution primal = second_stage_cost(inst, h, d);
    DualCertificate dual = second_stage_dual(inst, h, d);
    worst = std::max(worst, rel_gap(primal.objective, dual.value));
    ok = ok && rel_close(primal.objective, dual.value) &&
         dual.max_infeasibility <= kAuditTol;
  }
  double secs = seconds_since(t0);
  ok = ok && secs < kStrongDualitySeconds;
  push_row(1, "criterion 1 recourse strong duality", ok,
           fmt("max rel gap %.3e over 50 seeds in %.2fs (limit %.0fs)", worst, secs,
               kStrongDualitySeconds));
}

void criterion_worst_case_duality() {
  bool ok = true;
  double worst_pair = 0.0;
  for (uint64_t seed = 400; seed < 450; ++seed) {
    int num_dcs = 2 + static_cast<int>(seed % 2);
    int num_sites = 2 + static_cast<int>(seed % 2);
    int periods = 1 + static_cast<int>(seed % 2);
    int support = 2 + static_cast<int>(seed % 9);  // 2..10 points
    Instance inst = random_instance(seed, num_dcs, num_sites, periods);
    MomentEstimate mom = random_moments(seed + 100, inst);
    AmbiguitySpec amb = random_ambiguity(seed + 300, mom, support, 0.15, 0.7, 1.4);
    Rng rng(seed + 500);
    Grid h = random_capacity(rng, inst);
    WorstCase primal = worst_case_expectation(inst, h, amb);
    WorstCaseDual dual = worst_case_expectation_dual(inst, h, amb);
    worst_pair = std::max(worst_pair, rel_gap(primal.value, dual.value));
    ok = ok && rel_close(primal.value, dual.value);
  }

  double worst_identity = 0.0;
  for (uint64_t seed = 600; seed < 610; ++seed) {
    int num_dcs = 2 + static_cast<int>(seed % 2);
    int periods = 1 + static_cast<int>(seed % 2);
    Instance inst = random_instance(seed, num_dcs, 2, periods);
    MomentEstimate mom = random_moments(seed + 100, inst);
    int support = 2 + static_cast<int>(seed % 4);
    AmbiguitySpec amb = random_ambiguity(seed + 300, mom, support, 0.2, 0.6, 1.5);
    BuiltDro built = build_dro_milp(inst, amb);
    MilpSolution sol;
    if (!solved_optimal(built.model, sol)) {
      ok = false;
      continue;
    }
    g_audit.add(audit_dro_solution(built, inst, amb, sol.x));
    FirstStagePlan plan = extract_first_stage(built.layout, sol.x);
    double recourse_part = sol.objective - first_stage_cost(inst, plan);
    WorstCase wc = worst_case_expectation(inst, plan.capacity, amb);
    worst_identity = std::max(worst_identity, rel_gap(recourse_part, wc.value));
    ok = ok && rel_close(recourse_part, wc.value);
  }
  push_row(2, "criterion 2 worst-case expectation duality + robust MILP identity", ok,
           fmt("max rel gap %.3e over 50 pairs; identity gap %.3e over 10 solves",
               worst_pair, worst_identity));
}

void criterion_oracle_equivalence() {
  auto t0 = Clock::now();
  bool ok = true;
  double worst = 0.0;
  for (uint64_t seed = 900; seed < 920; ++seed) {
    int num_dcs = 2 + static_cast<int>(seed % 4);
    int num_sites = 2 + static_cast<int>(seed % 2);
    int periods = 1 + static_cast<int>(seed % 2);
    Instance inst = random_instance(seed, num_dcs, num_sites, periods);
    MomentEstimate mom = random_moments(seed + 100, inst);
    int count = 3 + static_cast<int>(seed % 3);
    ScenarioSet scen = sample_uniform_scenarios(mom, 0.4, count, seed + 200);
    BuiltSmip built = build_extensive_smip(inst, scen);
    MilpSolution bb;
    MilpSolution bf = enumerate_bruteforce(built.model);
    if (!solved_optimal(built.model, bb) || bf.status != MilpStatus::Optimal) {
      ok = false;
      continue;
    }
    g_audit.add(audit_smip_solution(built, inst, scen, bb.x));
    g_audit.add(audit_smip_solution(built, inst, scen, bf.x));
    worst = std::max(worst, rel_gap(bb.objective, bf.objective));
    ok = ok && rel_close(bb.objective, bf.objective);
  }
  double secs = seconds_since(t0);
  ok = ok && secs < kOracleSeconds;
  push_row(3, "criterion 3 branch and bound matches exhaustive enumeration", ok,
           fmt("max rel gap %.3e over 20 seeds in %.2fs (limit %.0fs)", worst, secs,
               kOracleSeconds));
}

void criterion_point_mass_collapse() {
  bool ok = true;
  double worst = 0.0;
  for (uint64_t seed = 1000; seed < 1005; ++seed) {
    int num_dcs = 2 + static_cast<int>(seed % 3);
    int num_sites = 2 + static_cast<int>(seed % 2);
    int periods = 1 + static_cast<int>(seed % 2);
    Instance inst = random_instance(seed, num_dcs, num_sites, periods);
    MomentEstimate mom = random_moments(seed + 100, inst);
    ScenarioSet single = sample_uniform_scenarios(mom, 0.5, 1, seed + 200);
    MomentEstimate emp = empirical_moments(single);
    AmbiguitySpec amb = build_ambiguity_bounds(emp, 0.0, 1.0, 1.0, single);

    BuiltSmip dt = build_deterministic(inst, emp);
    BuiltSmip sp = build_extensive_smip(inst, single);
    BuiltDro dro = build_dro_milp(inst, amb);
    MilpSolution sdt, ssp, sdro;
    if (!solved_optimal(dt.model, sdt) || !solved_optimal(sp.model, ssp) ||
        !solved_optimal(dro.model, sdro)) {
      ok = false;
      continue;
    }
    g_audit.add(audit_smip_solution(dt, inst, single, sdt.x));
    g_audit.add(audit_smip_solution(sp, inst, single, ssp.x));
    g_audit.add(audit_dro_solution(dro, inst, amb, sdro.x));
    worst = std::max({worst, rel_gap(sdt.objective, ssp.objective),
                      rel_gap(ssp.objective, sdro.objective)});
    ok = ok && rel_close(sdt.objective, ssp.objective) &&
         rel_close(ssp.objective, sdro.objective);
  }
  push_row(4, "criterion 4 one-point ambiguity collapse", ok,
           fmt("max rel gap %.3e across dt = sp = dro on 5 seeds", worst));
}

void criterion_monotonicity() {
  bool ok = true;
  double worst_drop = 0.0;
  for (uint64_t seed = 1100; seed < 1105; ++seed) {
    int num_dcs = 2 + static_cast<int>(seed % 2);
    int periods = 1 + static_cast<int>(seed % 2);
    Instance inst = random_instance(seed, num_dcs, 2, periods);
    MomentEstimate mom = random_moments(seed + 100, inst);
    ScenarioSet support = sample_uniform_scenarios(mom, 0.5, 4, seed + 200);
    MomentEstimate emp = empirical_moments(support);

    auto dro_optimum = [&](double slack, double lo, double hi) {
      AmbiguitySpec amb = build_ambiguity_bounds(emp, slack, lo, hi, support);
      BuiltDro built = build_dro_milp(inst, amb);
      MilpSolution sol;
      if (!solved_optimal(built.model, sol)) {
        ok = false;
        return 0.0;
      }
      g_audit.add(audit_dro_solution(built, inst, amb, sol.x));
      return sol.objective;
    };

    double u1 = dro_optimum(0.1, 0.5, 1.1);
    double u2 = dro_optimum(0.1, 0.5, 2.2);
    double u3 = dro_optimum(0.1, 0.5, 4.4);
    double m1 = dro_optimum(0.05, 0.5, 1.5);
    double m2 = dro_optimum(0.1, 0.5, 1.5);
    double m3 = dro_optimum(0.2, 0.5, 1.5);
    worst_drop = std::max({worst_drop, u1 - u2, u2 - u3, m1 - m2, m2 - m3});
    ok = ok && u2 >= u1 - kMonotoneSlack && u3 >= u2 - kMonotoneSlack &&
         m2 >= m1 - kMonotoneSlack && m3 >= m2 - kMonotoneSlack;
  }
  push_row(5, "criterion 5 ambiguity widening never lowers the robust optimum", ok,
           fmt("worst observed decrease %.3e (slack %.0e) over 5 seeds x 2 sweeps",
               worst_drop, kMonotoneSlack));
}

void criterion_desk_pattern() {
  auto t0 = Clock::now();
  ExperimentArtifacts cmp = compare_experiment(us10_config(), us10_instance());
  double secs = seconds_since(t0);
  const ApproachResult& dt = cmp.results.at(0);
  const ApproachResult& sp = cmp.results.at(1);
  const ApproachResult& dro = cmp.results.at(2);

  bool a_ok = sp.evaluation.total <= dt.evaluation.total + kRelTol * dt.evaluation.total;
  a_ok = a_ok && secs < kDeskSeconds;
  push_row(7.0, "criterion 7a stochastic plan beats deterministic out of sample", a_ok,
           fmt("sp total %.4f <= dt total %.4f; %.2fs (limit %.0fs)",
               sp.evaluation.total, dt.evaluation.total, secs, kDeskSeconds));

  bool b_ok = dro.evaluation.unmet_mean <= sp.evaluation.unmet_mean + 1e-9;
  std::string b_detail = fmt("dro unmet %.4f vs sp unmet %.4f",
                             dro.evaluation.unmet_mean, sp.evaluation.unmet_mean);
  if (!b_ok) b_detail += " (documented statistical deviation, not a release blocker)";
  push_row(7.1, "criterion 7b robust plan has the least unmet demand", b_ok, b_detail,
           /*hard=*/false);
}

void criterion_scarcity() {
  ExperimentConfig config = us10_config();
  config.scarcity_factor = 0.04;
  ExperimentArtifacts scarce = compare_experiment(config, us10_instance());

  double budget_total = 0.0;
  for (double b : scarce.inputs.instance.temporal_budget) budget_total += b;
  double mean_total = 0.0;
  const MomentEstimate& mom = scarce.inputs.moments;
  for (int j = 0; j < mom.sites(); ++j) {
    for (int t = 0; t < mom.periods(); ++t) mean_total += mom.mean(j, t);
  }
  double initial_net = 0.0;
  for (double v : scarce.inputs.instance.initial_backlog) initial_net += v;
  for (double v : scarce.inputs.instance.initial_inventory) initial_net -= v;

  double sample_total = 0.0;
  const ScenarioSet& out = scarce.inputs.out_sample;
  for (int w = 0; w < out.count(); ++w) {
    double d = 0.0;
    for (double v : out.demand[w].data()) d += v;
    sample_total += out.probabilities[w] * d;
  }

  bool premise = budget_total < 0.5 * mean_total;
  double bound_population = mean_total + initial_net - budget_total - 1e-6;
  double bound_sample = sample_total + initial_net - budget_total - 1e-6;

  bool ok = premise;
  double min_unmet = scarce.results.at(0).evaluation.unmet_mean;
  double max_gap = 0.0;
  for (const ApproachResult& row : scarce.results) {
    min_unmet = std::min(min_unmet, row.evaluation.unmet_mean);
    ok = ok && row.evaluation.unmet_mean >= bound_population &&
         row.evaluation.unmet_mean >= bound_sample;
    for (const ApproachResult& other : scarce.results) {
      max_gap = std::max(max_gap, std::abs(row.evaluation.unmet_mean -
                                           other.evaluation.unmet_mean));
    }
  }
  ok = ok && max_gap <= kPairwiseShare * mean_total;
  push_row(8, "criterion 8 scarce budgets force the conservation bound", ok,
           fmt("budgets %.1f < half demand %.1f; min unmet %.4f >= bound %.4f; "
               "max pairwise gap %.4f (%.2f%% of demand, limit %.0f%%)",
               budget_total, 0.5 * mean_total, min_unmet,
               std::max(bound_population, bound_sample), max_gap,
               100.0 * max_gap / mean_total, 100.0 * kPairwiseShare));
}

void criterion_extension_reductions() {
  bool ok = true;
  double worst = 0.0;

  for (uint64_t seed = 1200; seed < 1203; ++seed) {
    Instance inst = random_instance(seed, 3, 2, 2);
    MomentEstimate mom = random_moments(seed + 100, inst);
    ScenarioSet scen = sample_uniform_scenarios(mom, 0.4, 3, seed + 200);
    BuiltSmip base = build_extensive_smip(inst, scen);
    MilpSolution sbase;
    Instance zero_lead = inst;
    zero_lead.lead_time = Grid(3, 2);
    BuiltSmip lead = build_lead_time_extension(zero_lead, scen);
    MilpSolution slead;
    if (!solved_optimal(base.model, sbase) || !solved_optimal(lead.model, slead)) {
      ok = false;
      continue;
    }
    g_audit.add(audit_smip_solution(base, inst, scen, sbase.x));
    g_audit.add(audit_smip_solution(lead, zero_lead, scen, slead.x));
    worst = std::max(worst, rel_gap(sbase.objective, slead.objective));
    ok = ok && rel_close(sbase.objective, slead.objective);
  }

  for (uint64_t seed = 1210; seed < 1213; ++seed) {
    Instance inst = random_instance(seed, 3, 2, 2);
    MomentEstimate mom = random_moments(seed + 100, inst);
    ScenarioSet scen = sample_uniform_scenarios(mom, 0.4, 3, seed + 200);
    BuiltSmip base = build_extensive_smip(inst, scen);
    MilpSolution sbase;
    TypedInstance one = widen_to_single_type(inst);
    BuiltTyped typed = build_multi_type_extension(one, scen);
    MilpSolution styped;
    if (!solved_optimal(base.model, sbase) || !solved_optimal(typed.model, styped)) {
      ok = false;
      continue;
    }
    g_audit.add(audit_smip_solution(base, inst, scen, sbase.x));
    g_audit.add(audit_typed_solution(typed, one, scen, styped.x));
    worst = std::max(worst, rel_gap(sbase.objective, styped.objective));
    ok = ok && rel_close(sbase.objective, styped.objective);
  }

  for (uint64_t seed = 1220; seed < 1223; ++seed) {
    Instance inst = random_instance(seed, 3, 2, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 2; ++j) {
        for (int t = 1; t < 3; ++t) {
          inst.shipping_unit_cost(i, j, t) = inst.shipping_unit_cost(i, j, 0);
        }
      }
    }
    inst.inventory_unit_cost = Grid(2, 3, 0.0);
    MomentEstimate mom = random_moments(seed + 100, inst);
    ScenarioSet scen = sample_uniform_scenarios(mom, 0.4, 3, seed + 200);
    BuiltSmip base = build_extensive_smip(inst, scen);
    MilpSolution sbase;
    Instance stocked = inst;
    stocked.dc_inventory_unit_cost = Grid(3, 3, 0.0);
    BuiltSmip ext = build_dc_inventory_extension(stocked, scen);
    MilpSolution sext;
    if (!solved_optimal(base.model, sbase) || !solved_optimal(ext.model, sext)) {
      ok = false;
      continue;
    }
    g_audit.add(audit_smip_solution(base, inst, scen, sbase.x));
    g_audit.add(audit_smip_solution(ext, stocked, scen, sext.x));
    worst = std::max(worst, rel_gap(sbase.objective, sext.objective));
    ok = ok && rel_close(sbase.objective, sext.objective);
  }

  push_row(9, "criterion 9 extensions reduce to the base model", ok,
           fmt("max rel gap %.3e over zero-lead, one-type, free-DC-stock cases", worst));
}

void criterion_determinism() {
  Instance base = random_instance(41, 3, 3, 1);
  base.temporal_budget = {1000.0};
  ExperimentConfig config;
  config.instance_path = "unused";
  config.approach = "sp";
  config.in_sample_count = 6;
  config.in_sample_seed = 11;
  config.out_sample_count = 20;
  config.out_sample_seed = 12;
  config.phases.push_back({"2021-01-01", 2, 0.0, {40.0, 55.0, 35.0}});

  ExperimentArtifacts one1 = run_experiment(config, base);
  ExperimentArtifacts one2 = run_experiment(config, base);
  ExperimentArtifacts cmp1 = compare_experiment(config, base);
  ExperimentArtifacts cmp2 = compare_experiment(config, base);
  bool ok = !one1.breakdown.empty() && one1.breakdown == one2.breakdown &&
            !cmp1.breakdown.empty() && cmp1.breakdown == cmp2.breakdown &&
            cmp1.summary == cmp2.summary;
  push_row(10, "criterion 10 reruns emit byte-identical CSV artifacts", ok,
           fmt("%zu and %zu csv bytes identical across reruns", one1.breakdown.size(),
               cmp1.breakdown.size()));
}

void run_guarded(double order, const char* label, void (*fn)()) {
  try {
    fn();
  } catch (const std::exception& e) {
    push_row(order, label, false, fmt("unexpected exception: %s", e.what()));
  }
}

}  // namespace

int main() {
  run_guarded(1, "criterion 1 recourse strong duality", criterion_strong_duality);
  run_guarded(2, "criterion 2 worst-case expectation duality + robust MILP identity",
              criterion_worst_case_duality);
  run_guarded(3, "criterion 3 branch and bound matches exhaustive enumeration",
              criterion_oracle_equivalence);
  run_guarded(4, "criterion 4 one-point ambiguity collapse", criterion_point_mass_collapse);
  run_guarded(5, "criterion 5 ambiguity widening never lowers the robust optimum",
              criterion_monotonicity);
  run_guarded(7, "criterion 7 desk-scale comparison", criterion_desk_pattern);
  run_guarded(8, "criterion 8 scarce budgets force the conservation bound",
              criterion_scarcity);
  run_guarded(9, "criterion 9 extensions reduce to the base model",
              criterion_extension_reductions);
  run_guarded(10, "criterion 10 reruns emit byte-identical CSV artifacts",
              criterion_determinism);

  push_row(6, "criterion 6 physical audit of every optimal solution",
           g_audit.worst <= kAuditTol,
           fmt("worst residual %.3e over %ld solutions (limit %.0e)", g_audit.worst,
               g_audit.solutions, kAuditTol));

  std::sort(g_rows.begin(), g_rows.end(),
            [](const Row& a, const Row& b) { return a.order < b.order; });

  int failures = 0;
  int deviations = 0;
  for (const Row& row : g_rows) {
    const char* verdict = row.ok ? "PASS" : (row.hard ? "FAIL" : "DEVIATION");
    std::printf("%s %s: %s\n", verdict, row.label.c_str(), row.detail.c_str());
    if (!row.ok && row.hard) ++failures;
    if (!row.ok && !row.hard) ++deviations;
  }
  std::printf("acceptance: %zu lines, %d hard failures, %d soft deviations\n",
              g_rows.size(), failures, deviations);
  return failures == 0 ? 0 : 1;
}
