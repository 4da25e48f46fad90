#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "resplan/fixtures.hpp"
#include "resplan/instance.hpp"

using namespace resplan;
using resplan::testing::rejects_with;

namespace {

bool has_issue(const ValidationReport& report, const std::string& field_needle) {
  for (const ValidationIssue& issue : report.issues) {
    if (issue.field.find(field_needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_SUITE("instance") {

TEST_CASE("grids are row-major with value semantics") {
  Grid g(2, 3, 1.5);
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 3);
  CHECK(g(0, 0) == 1.5);
  g(1, 2) = 4.0;
  CHECK(g.data()[1 * 3 + 2] == 4.0);

  Grid copy = g;
  CHECK(copy == g);
  copy(0, 1) = 9.0;
  CHECK(copy != g);
  CHECK(Grid().empty());

  Cube c(2, 3, 4, 0.25);
  CHECK(c.dim0() == 2);
  CHECK(c.dim1() == 3);
  CHECK(c.dim2() == 4);
  c(1, 2, 3) = 7.0;
  CHECK(c.data()[(1 * 3 + 2) * 4 + 3] == 7.0);

  Tensor4 t(2, 2, 2, 2, 1.0);
  t(1, 1, 1, 1) = 3.0;
  CHECK(t(1, 1, 1, 1) == 3.0);
  CHECK(t(0, 0, 0, 0) == 1.0);
}

TEST_CASE("seeded random instances are valid and reproducible") {
  Instance a = random_instance(7, 3, 4, 2);
  CHECK(a.num_dcs() == 3);
  CHECK(a.num_sites() == 4);
  CHECK(a.periods == 2);
  CHECK(validate_instance(a).ok());
  CHECK(a == random_instance(7, 3, 4, 2));
  CHECK(a != random_instance(8, 3, 4, 2));

  TypedInstance typed = random_typed_instance(9, 2, 3, 2, 2);
  CHECK(typed.num_types() == 2);
  CHECK(validate_typed_instance(typed).ok());
}

TEST_CASE("validation pinpoints offending entries by coordinates") {
  Instance inst = random_instance(11, 2, 2, 2);

  SUBCASE("negative shipping cost") {
    inst.shipping_unit_cost(1, 0, 1) = -3.0;
    ValidationReport report = validate_instance(inst);
    CHECK_FALSE(report.ok());
    CHECK(has_issue(report, "shipping_unit_cost[1][0][1]"));
  }
  SUBCASE("wrong inventory table shape") {
    inst.inventory_unit_cost = Grid(1, 2, 0.5);
    CHECK(has_issue(validate_instance(inst), "inventory_unit_cost"));
  }
  SUBCASE("empty site lists and nonpositive horizon") {
    Instance bare;
    ValidationReport report = validate_instance(bare);
    CHECK(has_issue(report, "dc_sites"));
    CHECK(has_issue(report, "demand_sites"));
    CHECK(has_issue(report, "periods"));
  }
  SUBCASE("capacity cost rows must be time-constant unless flagged") {
    inst.capacity_unit_cost(0, 1) = inst.capacity_unit_cost(0, 0) + 1.0;
    CHECK(has_issue(validate_instance(inst), "capacity_unit_cost[0]"));
    inst.capacity_cost_time_varying = true;
    CHECK(validate_instance(inst).ok());
  }
  SUBCASE("fractional lead times") {
    inst.lead_time = Grid(2, 2, 0.5);
    CHECK(has_issue(validate_instance(inst), "lead_time[0][0]"));
  }
}

TEST_CASE("require_valid raises with context and field path") {
  Instance inst = random_instance(12, 2, 2, 2);
  inst.penalty_unit_cost(1, 0) = -1.0;
  CHECK(rejects_with("penalty_unit_cost[1][0]",
                     [&] { require_valid(validate_instance(inst), "instance"); }));
  CHECK(rejects_with("instance",
                     [&] { require_valid(validate_instance(inst), "instance"); }));
  CHECK_NOTHROW(require_valid(validate_instance(random_instance(12, 2, 2, 2)), "instance"));
}

TEST_CASE("scenario sets validate probabilities and demand shapes") {
  Instance inst = random_instance(13, 2, 3, 2);
  ScenarioSet good;
  good.probabilities = {0.25, 0.75};
  good.demand = {Grid(3, 2, 1.0), Grid(3, 2, 2.0)};
  CHECK(validate_scenarios(inst, good).ok());

  SUBCASE("mass must sum to one") {
    ScenarioSet bad = good;
    bad.probabilities = {0.25, 0.25};
    CHECK(has_issue(validate_scenarios(inst, bad), "probabilities"));
  }
  SUBCASE("negative probability") {
    ScenarioSet bad = good;
    bad.probabilities = {1.5, -0.5};
    CHECK(has_issue(validate_scenarios(inst, bad), "probabilities[1]"));
  }
  SUBCASE("count mismatch") {
    ScenarioSet bad = good;
    bad.probabilities = {1.0};
    CHECK_FALSE(validate_scenarios(inst, bad).ok());
  }
  SUBCASE("wrong demand shape") {
    ScenarioSet bad = good;
    bad.demand[1] = Grid(2, 2, 1.0);
    CHECK(has_issue(validate_scenarios(inst, bad), "demand[1]"));
  }
  SUBCASE("negative demand entry") {
    ScenarioSet bad = good;
    bad.demand[0](2, 1) = -4.0;
    CHECK(has_issue(validate_scenarios(inst, bad), "demand[0][2][1]"));
  }
  SUBCASE("at least one scenario") {
    ScenarioSet bad;
    CHECK(has_issue(validate_scenarios(inst, bad), "demand"));
  }
}

TEST_CASE("typed instances report their own dimension issues") {
  TypedInstance typed = random_typed_instance(14, 2, 2, 2, 2);
  typed.resource_types.clear();
  CHECK(has_issue(validate_typed_instance(typed), "resource_types"));
}

TEST_CASE("dc status strings round trip") {
  for (DcStatus s : {DcStatus::Preopened, DcStatus::Candidate, DcStatus::Forbidden}) {
    auto back = dc_status_from_string(to_string(s));
    REQUIRE(back.has_value());
    CHECK(*back == s);
  }
  CHECK_FALSE(dc_status_from_string("open-ish").has_value());
}

TEST_CASE("validation report text carries fields and messages") {
  Instance bare;
  std::string text = validate_instance(bare).to_string();
  CHECK(text.find("dc_sites") != std::string::npos);
  CHECK(text.find("nonempty") != std::string::npos);
}

TEST_CASE("instance helpers default the optional extension fields") {
  Instance inst = random_instance(15, 2, 2, 3);
  CHECK_FALSE(inst.has_dc_inventory());
  CHECK(inst.lead(1, 1) == 0);
  CHECK(inst.initial_dc_inv(0) == 0.0);
  inst.lead_time = Grid(2, 2, 2.0);
  CHECK(inst.lead(0, 1) == 2);
  inst.initial_dc_inventory = {4.0, 5.0};
  CHECK(inst.initial_dc_inv(1) == 5.0);
}

}  // TEST_SUITE
