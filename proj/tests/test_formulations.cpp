#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "resplan/errors.hpp"
#include "resplan/fixtures.hpp"
#include "resplan/formulations.hpp"
#include "resplan/lp_solver.hpp"
#include "resplan/milp_solver.hpp"

using namespace resplan;
using resplan::testing::close_rel;

namespace {

bool models_equal(const ModelIR& a, const ModelIR& b) {
  return a.variables() == b.variables() && a.constraints() == b.constraints();
}

double milp_optimum(const ModelIR& model) {
  MilpSolution s = solve_milp(model);
  REQUIRE(s.status == MilpStatus::Optimal);
  return s.objective;
}

}  // namespace

TEST_SUITE("formulations") {

TEST_CASE("extensive form has the closed-form variable and row counts") {
  Instance inst = random_instance(11, 2, 2, 2);
  MomentEstimate mom = random_moments(12, inst);
  ScenarioSet scen = sample_uniform_scenarios(mom, 0.5, 2, 13);
  BuiltSmip built = build_extensive_smip(inst, scen);
  // 2 binaries + 4 capacity vars + 2 scenarios x (8 ship + 4 inv + 4 unmet)
  CHECK(built.model.num_variables() == 38);
  // 4 links + 2 budgets + 2 x (4 dc + 4 flow)
  CHECK(built.model.num_constraints() == 22);
  CHECK(built.layout.num_vars() == built.model.num_variables());
  CHECK(built.layout.num_rows() == built.model.num_constraints());

  // layout indices land on their canonical names
  CHECK(built.model.variable(built.layout.x(1)).name == name_x(1));
  CHECK(built.model.variable(built.layout.h(1, 0)).name == name_h(1, 0));
  CHECK(built.model.variable(built.layout.ship(1, 0, 1, 1)).name == name_ship(1, 0, 1, 1));
  CHECK(built.model.variable(built.layout.unmet(0, 1, 1)).name == name_unmet(0, 1, 1));
}

TEST_CASE("the point-mass model and the deterministic model coincide") {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    Instance inst = random_instance(seed, 3, 4, 3);
    MomentEstimate mom = random_moments(seed + 100, inst);
    BuiltSmip dt = build_deterministic(inst, mom);
    ScenarioSet point;
    point.probabilities = {1.0};
    point.demand = {mom.mean};
    BuiltSmip sp = build_extensive_smip(inst, point);
    CHECK(models_equal(dt.model, sp.model));
  }
}

TEST_CASE("zero demand needs no plan") {
  Instance inst = random_instance(21, 2, 2, 2);
  for (DcSite& site : inst.dc_sites) site.status = DcStatus::Candidate;
  for (double& v : inst.initial_backlog) v = 0.0;
  for (double& v : inst.initial_inventory) v = 0.0;
  ScenarioSet zero;
  zero.probabilities = {1.0};
  zero.demand = {Grid(2, 2, 0.0)};
  BuiltSmip built = build_extensive_smip(inst, zero);
  MilpSolution s = solve_milp(built.model);
  REQUIRE(s.status == MilpStatus::Optimal);
  CHECK(std::abs(s.objective) <= 1e-9);
  for (int i = 0; i < 2; ++i) CHECK(s.x[built.layout.x(i)] <= 1e-9);
}

TEST_CASE("solved extensive forms pass the physical audit") {
  for (uint64_t seed = 30; seed < 34; ++seed) {
    Instance inst = random_instance(seed, 3, 3, 3);
    MomentEstimate mom = random_moments(seed + 1, inst);
    ScenarioSet scen = sample_uniform_scenarios(mom, 0.5, 4, seed + 2);
    BuiltSmip built = build_extensive_smip(inst, scen);
    MilpSolution sol = solve_milp(built.model);
    REQUIRE(sol.status == MilpStatus::Optimal);
    SolutionAudit audit = audit_smip_solution(built, inst, scen, sol.x);
    CAPTURE(seed);
    CHECK(audit.worst() <= 1e-6);
  }
}

TEST_CASE("scenario dimension mismatches are rejected") {
  Instance inst = random_instance(22, 2, 2, 2);
  ScenarioSet bad;
  bad.probabilities = {1.0};
  bad.demand = {Grid(3, 2, 1.0)};
  CHECK_THROWS_AS(build_extensive_smip(inst, bad), InputError);
}

TEST_CASE("time-varying capacity cost is reserved for the DC-stock variant") {
  Instance inst = random_instance(23, 2, 2, 2);
  inst.capacity_unit_cost(0, 1) = inst.capacity_unit_cost(0, 0) + 1.0;
  inst.capacity_cost_time_varying = true;
  MomentEstimate mom = random_moments(123, inst);
  ScenarioSet scen = sample_uniform_scenarios(mom, 0.5, 2, 223);
  CHECK_THROWS_AS(build_extensive_smip(inst, scen), InputError);
  inst.dc_inventory_unit_cost = Grid(2, 2, 0.1);
  CHECK_NOTHROW(build_dc_inventory_extension(inst, scen));
}

TEST_CASE("zero lead times reproduce the base model term for term") {
  for (uint64_t seed = 20; seed < 25; ++seed) {
    Instance inst = random_instance(seed, 3, 3, 3);
    MomentEstimate mom = random_moments(seed + 5, inst);
    ScenarioSet scen = sample_uniform_scenarios(mom, 0.5, 3, seed + 9);
    BuiltSmip base = build_extensive_smip(inst, scen);
    inst.lead_time = Grid(3, 3, 0.0);
    BuiltSmip lead = build_lead_time_extension(inst, scen);
    CHECK(models_equal(base.model, lead.model));
  }
}

TEST_CASE("a one-arc lead-time chain ships ahead of demand") {
  Instance inst;
  inst.name = "chain";
  inst.periods = 2;
  inst.dc_sites = {{"dc", DcStatus::Candidate, {}}};
  inst.demand_sites = {"site"};
  inst.operating_cost = {10.0};
  inst.capacity_unit_cost = Grid(1, 2, 1.0);
  inst.shipping_unit_cost = Cube(1, 1, 2, 1.0);
  inst.inventory_unit_cost = Grid(1, 2, 0.5);
  inst.penalty_unit_cost = Grid(1, 2, 100.0);
  inst.dc_capacity_limit = {100.0};
  inst.temporal_budget = {100.0, 100.0};
  inst.initial_inventory = {0.0};
  inst.initial_backlog = {0.0};
  inst.lead_time = Grid(1, 1, 1.0);
  require_valid(validate_instance(inst), "instance");

  ScenarioSet scen;
  scen.probabilities = {1.0};
  Grid d(1, 2);
  d(0, 0) = 0.0;
  d(0, 1) = 10.0;
  scen.demand = {d};

  // open (10) + 10 units of capacity (10) + ship 10 one period early (10)
  BuiltSmip built = build_lead_time_extension(inst, scen);
  CHECK(milp_optimum(built.model) == doctest::Approx(30.0).epsilon(1e-9));

  // leads beyond the horizon strand every shipment: only backlog remains
  inst.lead_time = Grid(1, 1, 2.0);
  BuiltSmip stranded = build_lead_time_extension(inst, scen);
  CHECK(milp_optimum(stranded.model) == doctest::Approx(1000.0).epsilon(1e-9));
}

TEST_CASE("lead-time solutions pass the audit") {
  for (uint64_t seed = 70; seed < 73; ++seed) {
    Instance inst = random_instance(seed, 3, 3, 4);
    Grid leads(3, 3);
    Rng lr(seed + 7);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) leads(i, j) = std::floor(lr.uniform(0.0, 2.999));
    }
    inst.lead_time = leads;
    MomentEstimate mom = random_moments(seed + 1, inst);
    ScenarioSet scen = sample_uniform_scenarios(mom, 0.5, 3, seed + 2);
    BuiltSmip built = build_lead_time_extension(inst, scen);
    MilpSolution sol = solve_milp(built.model);
    REQUIRE(sol.status == MilpStatus::Optimal);
    SolutionAudit audit = audit_smip_solution(built, inst, scen, sol.x);
    CHECK(audit.worst() <= 1e-6);
  }
}

TEST_CASE("free DC stock with level costs adds nothing to the optimum") {
  for (uint64_t seed = 40; seed < 43; ++seed) {
    Instance inst = random_instance(seed, 3, 3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (int t = 1; t < 3; ++t) {
          inst.shipping_unit_cost(i, j, t) = inst.shipping_unit_cost(i, j, 0);
        }
      }
    }
    inst.inventory_unit_cost = Grid(3, 3, 0.0);
    MomentEstimate mom = random_moments(seed + 1, inst);
    ScenarioSet scen = sample_uniform_scenarios(mom, 0.5, 3, seed + 2);
    BuiltSmip base = build_extensive_smip(inst, scen);
    double base_opt = milp_optimum(base.model);

    inst.dc_inventory_unit_cost = Grid(3, 3, 0.0);
    BuiltSmip ext = build_dc_inventory_extension(inst, scen);
    MilpSolution ext_sol = solve_milp(ext.model);
    REQUIRE(ext_sol.status == MilpStatus::Optimal);
    CAPTURE(seed);
    CHECK(close_rel(base_opt, ext_sol.objective));
    SolutionAudit audit = audit_smip_solution(ext, inst, scen, ext_sol.x);
    CHECK(audit.worst() <= 1e-6);
  }
}

TEST_CASE("initial DC stock must be carried when holding beats shipping") {
  Instance inst;
  inst.name = "carry";
  inst.periods = 1;
  inst.dc_sites = {{"d0", DcStatus::Candidate, {}}, {"d1", DcStatus::Candidate, {}}};
  inst.demand_sites = {"site"};
  inst.operating_cost = {100.0, 100.0};
  inst.capacity_unit_cost = Grid(2, 1, 1.0);
  inst.shipping_unit_cost = Cube(2, 1, 1, 1.0);
  inst.inventory_unit_cost = Grid(1, 1, 0.5);
  inst.penalty_unit_cost = Grid(1, 1, 100.0);
  inst.dc_capacity_limit = {50.0, 50.0};
  inst.temporal_budget = {100.0};
  inst.initial_inventory = {0.0};
  inst.initial_backlog = {0.0};
  inst.dc_inventory_unit_cost = Grid(2, 1, 0.2);
  inst.initial_dc_inventory = {5.0, 5.0};

  ScenarioSet zero;
  zero.probabilities = {1.0};
  zero.demand = {Grid(1, 1, 0.0)};
  BuiltSmip built = build_dc_inventory_extension(inst, zero);
  // 2 DCs x 5 units x 0.2 holding; shipping (1.0/unit) would cost more
  CHECK(milp_optimum(built.model) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("typed model has the closed-form counts and collapses at one type") {
  TypedInstance typed = random_typed_instance(60, 2, 2, 2, 2);
  MomentEstimate mom = MomentEstimate::from_mean_sd(Grid(2, 2, 10.0), Grid(2, 2, 2.0));
  ScenarioSet scen = sample_uniform_scenarios(mom, 0.5, 2, 61);
  BuiltTyped built = build_multi_type_extension(typed, scen);
  // x 4, h 8, per scenario: ship 16, inv 8, unmet 8, split 8
  CHECK(built.model.num_variables() == 92);
  // link 8, budget 2, per scenario: dc 8, flow 8, split 4
  CHECK(built.model.num_constraints() == 50);

  for (uint64_t seed = 50; seed < 53; ++seed) {
    Instance inst = random_instance(seed, 3, 3, 2);
    MomentEstimate m = random_moments(seed + 1, inst);
    ScenarioSet s = sample_uniform_scenarios(m, 0.5, 3, seed + 2);
    double base_opt = milp_optimum(build_extensive_smip(inst, s).model);
    TypedInstance one = widen_to_single_type(inst);
    BuiltTyped ext = build_multi_type_extension(one, s);
    MilpSolution ext_sol = solve_milp(ext.model);
    REQUIRE(ext_sol.status == MilpStatus::Optimal);
    CAPTURE(seed);
    CHECK(close_rel(base_opt, ext_sol.objective));
    SolutionAudit audit = audit_typed_solution(ext, one, s, ext_sol.x);
    CHECK(audit.worst() <= 1e-6);
  }
}

TEST_CASE("a dominant resource type absorbs the whole demand split") {
  TypedInstance typed = random_typed_instance(63, 1, 1, 1, 2);
  typed.dc_sites[0].status = DcStatus::Candidate;
  // type 1 ships and serves for free at ample capacity; type 0 is costly
  typed.operating_cost = Grid(1, 2, 0.0);
  typed.capacity_unit_cost(0, 0) = 5.0;
  typed.capacity_unit_cost(0, 1) = 0.0;
  for (int l = 0; l < 2; ++l) {
    typed.shipping_unit_cost(0, 0, 0, l) = l == 0 ? 4.0 : 0.0;
    typed.inventory_unit_cost(0, 0, l) = 0.1;
    typed.penalty_unit_cost(0, 0, l) = 50.0;
    typed.dc_capacity_limit(0, l) = 100.0;
  }
  typed.temporal_budget = {200.0};
  typed.initial_inventory = {0.0};
  typed.initial_backlog = {0.0};

  ScenarioSet scen;
  scen.probabilities = {1.0};
  scen.demand = {Grid(1, 1, 8.0)};
  BuiltTyped built = build_multi_type_extension(typed, scen);
  MilpSolution sol = solve_milp(built.model);
  REQUIRE(sol.status == MilpStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(sol.x[built.layout.split(0, 0, 0, 0)] <= 1e-9);
  CHECK(sol.x[built.layout.split(0, 0, 0, 1)] == doctest::Approx(8.0).epsilon(1e-9));
}

TEST_CASE("robust counterpart counts and feasibility guard") {
  for (uint64_t seed = 80; seed < 83; ++seed) {
    Instance inst = random_instance(seed, 2, 2, 2);
    MomentEstimate mom = random_moments(seed + 1, inst);
    AmbiguitySpec amb = random_ambiguity(seed + 2, mom, 4, 0.1, 0.8, 1.2);
    BuiltDro built = build_dro_milp(inst, amb);
    int I = 2, J = 2, T = 2, K = 4;
    CHECK(built.model.num_variables() ==
          I + I * T + 2 + 4 * J * T + K * (I * J * T + 2 * J * T + 1));
    CHECK(built.layout.num_vars() == built.model.num_variables());
    MilpSolution sol = solve_milp(built.model);
    REQUIRE(sol.status == MilpStatus::Optimal);
    SolutionAudit audit = audit_dro_solution(built, inst, amb, sol.x);
    CAPTURE(seed);
    CHECK(audit.worst() <= 1e-6);
  }

  // an empty ambiguity set cannot be built into a model
  MomentEstimate mom = MomentEstimate::from_mean_sd(Grid(1, 1, 100.0), Grid(1, 1, 5.0));
  AmbiguitySpec empty;
  empty.moment_estimate = mom;
  empty.mean_slack = Grid(1, 1, 0.0);
  empty.second_moment_lo = Grid(1, 1, 1.0);
  empty.second_moment_hi = Grid(1, 1, 1.0);
  empty.support = {Grid(1, 1, 200.0)};
  CHECK_THROWS_AS(build_dro_milp(random_instance(84, 1, 1, 1), empty), InputError);
}

TEST_CASE("the robust optimum dominates the stochastic one on its support") {
  for (uint64_t seed = 85; seed < 88; ++seed) {
    Instance inst = random_instance(seed, 2, 2, 2);
    MomentEstimate mom = random_moments(seed + 1, inst);
    ScenarioSet scen = sample_uniform_scenarios(mom, 0.4, 4, seed + 2);
    MomentEstimate emp = empirical_moments(scen);
    AmbiguitySpec amb = build_ambiguity_bounds(emp, 0.1, 0.9, 1.1, scen);
    double sp = milp_optimum(build_extensive_smip(inst, scen).model);
    double dro = milp_optimum(build_dro_milp(inst, amb).model);
    CAPTURE(seed);
    CHECK(dro >= sp - 1e-6 * (1.0 + std::abs(sp)));
  }
}

TEST_CASE("moment rows list means then second moments with matching bounds") {
  MomentEstimate mom = MomentEstimate::from_mean_sd(Grid(2, 1, 10.0), Grid(2, 1, 2.0));
  ScenarioSet support;
  support.probabilities = {0.5, 0.5};
  support.demand = {Grid(2, 1, 8.0), Grid(2, 1, 12.0)};
  AmbiguitySpec amb = build_ambiguity_bounds(mom, 0.2, 0.5, 1.5, support);
  std::vector<MomentRowValues> rows = moment_rows(amb);
  REQUIRE(rows.size() == 4);  // 2 mean rows then 2 second-moment rows
  CHECK(rows[0].value == std::vector<double>{8.0, 12.0});
  CHECK(rows[2].value == std::vector<double>{64.0, 144.0});
  CHECK(rows[0].lo == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(rows[0].hi == doctest::Approx(12.0).epsilon(1e-12));
  CHECK(rows[2].lo == doctest::Approx(0.5 * 104.0).epsilon(1e-12));
  CHECK(rows[2].hi == doctest::Approx(1.5 * 104.0).epsilon(1e-12));
}

TEST_CASE("worst-case lp degenerate supports") {
  MomentEstimate mom = MomentEstimate::from_mean_sd(Grid(1, 1, 10.0), Grid(1, 1, 1.0));
  AmbiguitySpec point = random_ambiguity(7, mom, 1, 0.0, 1.0, 1.0);
  ModelIR lp = build_worst_case_lp(point, {123.0});
  LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(-s.objective == doctest::Approx(123.0).epsilon(1e-9));

  AmbiguitySpec pair = random_ambiguity(8, mom, 2, 0.5, 0.5, 1.5);
  ModelIR flat = build_worst_case_lp(pair, {42.0, 42.0});
  LpSolution sf = solve_lp(flat);
  REQUIRE(sf.status == LpStatus::Optimal);
  CHECK(-sf.objective == doctest::Approx(42.0).epsilon(1e-9));
}

TEST_CASE("plans extract from both solved model families") {
  Instance inst = random_instance(90, 2, 2, 2);
  MomentEstimate mom = random_moments(91, inst);
  ScenarioSet scen = sample_uniform_scenarios(mom, 0.4, 3, 92);
  BuiltSmip smip = build_extensive_smip(inst, scen);
  MilpSolution sol = solve_milp(smip.model);
  REQUIRE(sol.status == MilpStatus::Optimal);
  FirstStagePlan plan = extract_first_stage(smip.layout, sol.x);
  REQUIRE(int(plan.open.size()) == 2);
  REQUIRE(plan.capacity.rows() == 2);
  REQUIRE(plan.capacity.cols() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK((plan.open[i] == 0 || plan.open[i] == 1));
    for (int t = 0; t < 2; ++t) {
      CHECK(plan.capacity(i, t) >= -1e-9);
      CHECK(plan.capacity(i, t) <=
            inst.dc_capacity_limit[i] * plan.open[i] + 1e-6);
    }
  }
}

}  // TEST_SUITE
