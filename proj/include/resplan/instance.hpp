#pragma once
// Problem data for the multi-period facility location and distribution models:
// sites, horizon, costs, capacity limits, initial state, and demand scenarios.
// Instances are immutable after construction and safe to share across threads.

#include <optional>
#include <string>
#include <vector>

#include "resplan/grid.hpp"

namespace resplan {

enum class DcStatus { Preopened, Candidate, Forbidden };

const char* to_string(DcStatus s);
std::optional<DcStatus> dc_status_from_string(const std::string& s);

struct DcSite {
  std::string id;
  DcStatus status = DcStatus::Candidate;
  // Latitude/longitude, carried for fixture generation and reports only.
  std::optional<std::pair<double, double>> coords;

  bool operator==(const DcSite&) const = default;
};

// Base single-resource instance. Extension fields are optional: an absent
// lead_time means all lead times are zero, and the DC-inventory variant is
// enabled only when dc_inventory_unit_cost is present.
struct Instance {
  std::string name;
  std::vector<DcSite> dc_sites;           // index i
  std::vector<std::string> demand_sites;  // index j
  int periods = 0;                        // t ranges over 0..periods-1

  std::vector<double> operating_cost;     // c^o_i
  // c^h stored per (i,t); the base formulation requires each row constant
  // across t, the DC-inventory extension consumes the full table.
  Grid capacity_unit_cost;
  bool capacity_cost_time_varying = false;
  Cube shipping_unit_cost;                // c^s_(i,j,t)
  Grid inventory_unit_cost;               // c^I_(j,t)
  Grid penalty_unit_cost;                 // c^u_(j,t)
  std::vector<double> dc_capacity_limit;  // M_i, units per period
  std::vector<double> temporal_budget;    // B_t, units per period
  std::vector<double> initial_inventory;  // I_j0
  std::vector<double> initial_backlog;    // u_j0

  std::optional<Grid> dc_inventory_unit_cost;   // c^ID_(i,t)
  std::vector<double> initial_dc_inventory;     // I^D_i0; empty means zeros
  std::optional<Grid> lead_time;                // L_(i,j), integer periods

  int num_dcs() const { return static_cast<int>(dc_sites.size()); }
  int num_sites() const { return static_cast<int>(demand_sites.size()); }
  bool has_dc_inventory() const { return dc_inventory_unit_cost.has_value(); }
  int lead(int i, int j) const {
    return lead_time ? static_cast<int>((*lead_time)(i, j)) : 0;
  }
  double capacity_cost(int i, int t) const { return capacity_unit_cost(i, t); }
  double initial_dc_inv(int i) const {
    return initial_dc_inventory.empty() ? 0.0 : initial_dc_inventory[i];
  }

  bool operator==(const Instance&) const = default;
};

// Multi-type variant: every cost and limit carries a resource-type index l.
// Initial site inventory/backlog remain per-site scalars and are assigned to
// the first resource type, which makes the single-type case collapse exactly.
struct TypedInstance {
  std::string name;
  std::vector<DcSite> dc_sites;
  std::vector<std::string> demand_sites;
  std::vector<std::string> resource_types;  // index l
  int periods = 0;

  Grid operating_cost;        // c^o_(i,l)
  Grid capacity_unit_cost;    // c^h_(i,l)
  Tensor4 shipping_unit_cost; // c^s_(i,j,t,l)
  Cube inventory_unit_cost;   // c^I_(j,t,l)
  Cube penalty_unit_cost;     // c^u_(j,t,l)
  Grid dc_capacity_limit;     // M_(i,l)
  std::vector<double> temporal_budget;    // B_t
  std::vector<double> initial_inventory;  // per j, resource type 0
  std::vector<double> initial_backlog;    // per j, resource type 0

  int num_dcs() const { return static_cast<int>(dc_sites.size()); }
  int num_sites() const { return static_cast<int>(demand_sites.size()); }
  int num_types() const { return static_cast<int>(resource_types.size()); }

  bool operator==(const TypedInstance&) const = default;
};

struct ScenarioSet {
  std::vector<double> probabilities;  // p^w, sums to 1 within 1e-9
  std::vector<Grid> demand;           // d_(j,t) per scenario

  int count() const { return static_cast<int>(demand.size()); }

  bool operator==(const ScenarioSet&) const = default;
};

struct ValidationIssue {
  std::string field;    // e.g. "penalty_unit_cost[1][0]"
  std::string message;

  bool operator==(const ValidationIssue&) const = default;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

// Collects every violation (dimension mismatches, negative costs or limits,
// fractional lead times) with index coordinates. Never throws.
ValidationReport validate_instance(const Instance& instance);
ValidationReport validate_typed_instance(const TypedInstance& instance);

// Checks probability mass, nonnegative demand, and (j,t) dimensions against
// the instance.
ValidationReport validate_scenarios(const Instance& instance, const ScenarioSet& scenarios);

// Throws InputError carrying the full report text when the report is nonempty.
void require_valid(const ValidationReport& report, const std::string& context);

}  // namespace resplan
