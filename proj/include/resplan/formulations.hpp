#pragma once
// Builders translating instances and scenario data into ModelIR models: the
// deterministic and extensive stochastic programs, the lead-time, DC-inventory,
// and multi-type variants, the distributionally robust MILP, and the
// second-stage and worst-case LPs used by verification and evaluation.
//
// Every builder lays out variables in a fixed order (first-stage variables,
// then scenario-major recourse blocks) and exposes the closed-form index map
// as a *Layout struct. After emitting, each builder audits itself: layout
// indices must map back to the expected names and every constraint family
// must appear with exactly its expected cardinality.

#include <string>
#include <vector>

#include "resplan/instance.hpp"
#include "resplan/model_ir.hpp"
#include "resplan/scenario.hpp"

namespace resplan {

enum class SmipVariant { Base, LeadTime, DcInventory };

// Variable order: x (I), h (I*T), then per scenario w: shipments (I*J*T),
// site inventory (J*T), backlog (J*T), and DC inventory (I*T) when the
// DC-inventory variant is active. Row order: capacity links (i,t), budgets
// (t), then per scenario w: DC rows (i,t) and flow-balance rows (j,t).
struct SmipLayout {
  int num_dcs = 0;
  int num_sites = 0;
  int periods = 0;
  int num_scenarios = 0;
  SmipVariant variant = SmipVariant::Base;

  int scenario_vars() const {
    int n = num_dcs * num_sites * periods + 2 * num_sites * periods;
    if (variant == SmipVariant::DcInventory) n += num_dcs * periods;
    return n;
  }
  int x(int i) const { return i; }
  int h(int i, int t) const { return num_dcs + i * periods + t; }
  int ship(int w, int i, int j, int t) const {
    return first_recourse() + w * scenario_vars() + (i * num_sites + j) * periods + t;
  }
  int inv(int w, int j, int t) const {
    return first_recourse() + w * scenario_vars() + num_dcs * num_sites * periods +
           j * periods + t;
  }
  int unmet(int w, int j, int t) const {
    return inv(w, j, t) + num_sites * periods;
  }
  int dc_inv(int w, int i, int t) const {
    return first_recourse() + w * scenario_vars() + num_dcs * num_sites * periods +
           2 * num_sites * periods + i * periods + t;
  }
  int first_recourse() const { return num_dcs + num_dcs * periods; }
  int num_vars() const { return first_recourse() + num_scenarios * scenario_vars(); }

  int row_link(int i, int t) const { return i * periods + t; }
  int row_budget(int t) const { return num_dcs * periods + t; }
  int scenario_rows() const { return num_dcs * periods + num_sites * periods; }
  int row_dc(int w, int i, int t) const {
    return num_dcs * periods + periods + w * scenario_rows() + i * periods + t;
  }
  int row_flow(int w, int j, int t) const {
    return num_dcs * periods + periods + w * scenario_rows() + num_dcs * periods +
           j * periods + t;
  }
  int num_rows() const {
    return num_dcs * periods + periods + num_scenarios * scenario_rows();
  }
};

struct BuiltSmip {
  ModelIR model;
  SmipLayout layout;
};

// Variable order: x (I*L), h (I*T*L), then per scenario w: shipments
// (I*J*T*L), inventory, backlog, demand split (J*T*L each). Row order:
// capacity links (i,t,l), budgets (t), then per scenario w: DC rows (i,t,l),
// flow rows (j,t,l), split rows (j,t).
struct TypedLayout {
  int num_dcs = 0;
  int num_sites = 0;
  int periods = 0;
  int num_types = 0;
  int num_scenarios = 0;

  int x(int i, int l) const { return i * num_types + l; }
  int h(int i, int t, int l) const {
    return num_dcs * num_types + (i * periods + t) * num_types + l;
  }
  int scenario_vars() const {
    return (num_dcs * num_sites * periods + 3 * num_sites * periods) * num_types;
  }
  int first_recourse() const { return num_dcs * num_types + num_dcs * periods * num_types; }
  int ship(int w, int i, int j, int t, int l) const {
    return first_recourse() + w * scenario_vars() +
           (((i * num_sites + j) * periods) + t) * num_types + l;
  }
  int inv(int w, int j, int t, int l) const {
    return first_recourse() + w * scenario_vars() +
           num_dcs * num_sites * periods * num_types + (j * periods + t) * num_types + l;
  }
  int unmet(int w, int j, int t, int l) const {
    return inv(w, j, t, l) + num_sites * periods * num_types;
  }
  int split(int w, int j, int t, int l) const {
    return inv(w, j, t, l) + 2 * num_sites * periods * num_types;
  }
  int num_vars() const { return first_recourse() + num_scenarios * scenario_vars(); }

  int row_link(int i, int t, int l) const { return (i * periods + t) * num_types + l; }
  int row_budget(int t) const { return num_dcs * periods * num_types + t; }
  int scenario_rows() const {
    return num_dcs * periods * num_types + num_sites * periods * num_types +
           num_sites * periods;
  }
  int first_scenario_row() const { return num_dcs * periods * num_types + periods; }
  int row_dc(int w, int i, int t, int l) const {
    return first_scenario_row() + w * scenario_rows() + (i * periods + t) * num_types + l;
  }
  int row_flow(int w, int j, int t, int l) const {
    return first_scenario_row() + w * scenario_rows() + num_dcs * periods * num_types +
           (j * periods + t) * num_types + l;
  }
  int row_split(int w, int j, int t) const {
    return first_scenario_row() + w * scenario_rows() + num_dcs * periods * num_types +
           num_sites * periods * num_types + j * periods + t;
  }
  int num_rows() const { return first_scenario_row() + num_scenarios * scenario_rows(); }
};

struct BuiltTyped {
  ModelIR model;
  TypedLayout layout;
};

// Variable order: x (I), h (I*T), the normalization duals alpha1 and beta1,
// lower-bound duals alpha_r (R), upper-bound duals beta_r (R), then per
// support point k: shipments (I*J*T), inventory (J*T), backlog (J*T), and the
// recourse-cost variable phi_k. R counts moment rows beyond normalization:
// with the special mean/second-moment form R = 2*J*T (mean rows first,
// j-major), with general rows R = general.size().
struct DroLayout {
  int num_dcs = 0;
  int num_sites = 0;
  int periods = 0;
  int num_support = 0;
  int num_moment_rows = 0;  // R

  int x(int i) const { return i; }
  int h(int i, int t) const { return num_dcs + i * periods + t; }
  int alpha1() const { return num_dcs + num_dcs * periods; }
  int beta1() const { return alpha1() + 1; }
  int alpha_row(int r) const { return alpha1() + 2 + r; }
  int beta_row(int r) const { return alpha1() + 2 + num_moment_rows + r; }
  // special-form accessors, valid when the spec has no general rows
  int mean_row(int j, int t) const { return j * periods + t; }
  int second_row(int j, int t) const { return num_sites * periods + j * periods + t; }
  int alpha_mean(int j, int t) const { return alpha_row(mean_row(j, t)); }
  int alpha_second(int j, int t) const { return alpha_row(second_row(j, t)); }
  int beta_mean(int j, int t) const { return beta_row(mean_row(j, t)); }
  int beta_second(int j, int t) const { return beta_row(second_row(j, t)); }

  int support_vars() const {
    return num_dcs * num_sites * periods + 2 * num_sites * periods + 1;
  }
  int first_recourse() const { return alpha1() + 2 + 2 * num_moment_rows; }
  int ship(int k, int i, int j, int t) const {
    return first_recourse() + k * support_vars() + (i * num_sites + j) * periods + t;
  }
  int inv(int k, int j, int t) const {
    return first_recourse() + k * support_vars() + num_dcs * num_sites * periods +
           j * periods + t;
  }
  int unmet(int k, int j, int t) const { return inv(k, j, t) + num_sites * periods; }
  int phi(int k) const {
    return first_recourse() + k * support_vars() + support_vars() - 1;
  }
  int num_vars() const { return first_recourse() + num_support * support_vars(); }

  // rows: capacity links (i,t), budgets (t), then per k: coupling, recourse
  // cost definition, DC rows (i,t), flow rows (j,t)
  int row_link(int i, int t) const { return i * periods + t; }
  int row_budget(int t) const { return num_dcs * periods + t; }
  int support_rows() const { return 2 + num_dcs * periods + num_sites * periods; }
  int row_couple(int k) const {
    return num_dcs * periods + periods + k * support_rows();
  }
  int row_phidef(int k) const { return row_couple(k) + 1; }
  int row_dc(int k, int i, int t) const { return row_couple(k) + 2 + i * periods + t; }
  int row_flow(int k, int j, int t) const {
    return row_couple(k) + 2 + num_dcs * periods + j * periods + t;
  }
  int num_rows() const {
    return num_dcs * periods + periods + num_support * support_rows();
  }
};

struct BuiltDro {
  ModelIR model;
  DroLayout layout;
};

// Single-scenario recourse LP for fixed capacity h and demand. Variables:
// shipments (I*J*T), inventory (J*T), backlog (J*T); rows: DC rows (i,t)
// then flow rows (j,t). Capacity enters only through row right-hand sides,
// demand only through flow-row right-hand sides, so one engine serves many
// scenarios via set_rhs + resolve.
struct SecondStageLayout {
  int num_dcs = 0;
  int num_sites = 0;
  int periods = 0;

  int ship(int i, int j, int t) const { return (i * num_sites + j) * periods + t; }
  int inv(int j, int t) const {
    return num_dcs * num_sites * periods + j * periods + t;
  }
  int unmet(int j, int t) const { return inv(j, t) + num_sites * periods; }
  int num_vars() const {
    return num_dcs * num_sites * periods + 2 * num_sites * periods;
  }

  int row_dc(int i, int t) const { return i * periods + t; }
  int row_flow(int j, int t) const { return num_dcs * periods + j * periods + t; }
  int num_rows() const { return num_dcs * periods + num_sites * periods; }
};

struct BuiltSecondStage {
  ModelIR model;
  SecondStageLayout layout;
};

// Canonical variable names, shared by builders, audits, and tests.
std::string name_x(int i);
std::string name_h(int i, int t);
std::string name_ship(int w, int i, int j, int t);
std::string name_inv(int w, int j, int t);
std::string name_unmet(int w, int j, int t);

// One moment row of an ambiguity set, evaluated on the support: the
// distribution p must satisfy lo <= sum_k p_k value_k <= hi. The implied
// normalization row (value 1, bounds [1,1]) is not included. The special
// form yields mean rows (j-major, t-minor) then second-moment rows; general
// rows replace both blocks.
struct MomentRowValues {
  std::string name;
  std::vector<double> value;
  double lo = 0.0;
  double hi = 0.0;
};

std::vector<MomentRowValues> moment_rows(const AmbiguitySpec& spec);

// Extensive-form stochastic program over the given scenarios. Ignores the
// optional lead-time and DC-inventory fields; rejects instances flagged as
// having time-varying capacity cost.
BuiltSmip build_extensive_smip(const Instance& instance, const ScenarioSet& scenarios);

// Point-mass model at the mean demand: coefficient-for-coefficient identical
// to build_extensive_smip on the one-scenario set {moments.mean}.
BuiltSmip build_deterministic(const Instance& instance, const MomentEstimate& moments);

// Variant with DC-side inventory: the per-DC shipment cap becomes a DC stock
// balance (shipments + ending stock = capacity + prior stock) and DC holding
// cost joins the objective. Requires dc_inventory_unit_cost; accepts
// time-varying capacity cost.
BuiltSmip build_dc_inventory_extension(const Instance& instance, const ScenarioSet& scenarios);

// Variant with shipment lead times: a shipment sent in period t consumes
// capacity in t and serves demand in t + L(i,j); shipments that would arrive
// beyond the horizon still consume capacity but serve nothing. Requires the
// lead_time table.
BuiltSmip build_lead_time_extension(const Instance& instance, const ScenarioSet& scenarios);

// Multi-resource-type variant: per-type opening, capacity, shipment, and
// stock variables plus a per-type demand split d-bar with
// sum_l dbar(j,t,l) = d(j,t). Initial inventory and backlog attach to type 0.
BuiltTyped build_multi_type_extension(const TypedInstance& instance,
                                      const ScenarioSet& scenarios);

// Distributionally robust counterpart over a moment ambiguity set: the
// inner worst-case expectation is replaced by its dual bound (alpha/beta
// variables) plus one coupling constraint and one recourse copy per support
// point. Throws InputError when the ambiguity set is empty, naming the
// violated bound.
BuiltDro build_dro_milp(const Instance& instance, const AmbiguitySpec& ambiguity);

// Recourse LP for a fixed plan: minimizes shipping + inventory + penalty cost
// for one demand realization. Honors the instance's lead times; rejects
// DC-inventory instances.
BuiltSecondStage build_second_stage(const Instance& instance, const Grid& capacity,
                                    const Grid& demand);

// LP over distributions p on the support maximizing sum_k p_k g_k subject to
// the moment rows. Emitted in minimization form with costs -g_k; negate the
// optimal value to recover the worst-case expectation. Rows: normalization
// (EQ 1), then per moment row a lower (GE) and an upper (LE) bound row.
ModelIR build_worst_case_lp(const AmbiguitySpec& ambiguity, const std::vector<double>& g);

struct FirstStagePlan {
  std::vector<int> open;  // 0/1 per DC
  Grid capacity;          // units per (DC, period)
};

FirstStagePlan extract_first_stage(const SmipLayout& layout, const std::vector<double>& x);
FirstStagePlan extract_first_stage(const DroLayout& layout, const std::vector<double>& x);

// Physical residuals of a solution, recomputed from instance data rather
// than from the emitted rows. max_flow_residual covers every equality
// (flow balance, DC stock balance, recourse-cost definitions),
// max_capacity_violation every inequality (capacity link, budget, DC
// shipment caps), max_joint_inventory is min(inventory, backlog) over all
// (j,t) where holding plus penalty cost is positive, and
// max_integrality_gap the distance of each x_i from {0,1}.
struct SolutionAudit {
  double max_flow_residual = 0.0;
  double max_capacity_violation = 0.0;
  double max_joint_inventory = 0.0;
  double max_integrality_gap = 0.0;

  double worst() const;
};

SolutionAudit audit_smip_solution(const BuiltSmip& built, const Instance& instance,
                                  const ScenarioSet& scenarios,
                                  const std::vector<double>& x);
SolutionAudit audit_dro_solution(const BuiltDro& built, const Instance& instance,
                                 const AmbiguitySpec& ambiguity,
                                 const std::vector<double>& x);
SolutionAudit audit_typed_solution(const BuiltTyped& built, const TypedInstance& instance,
                                   const ScenarioSet& scenarios,
                                   const std::vector<double>& x);

}  // namespace resplan
