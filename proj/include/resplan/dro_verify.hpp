#pragma once
// Verification oracles for the robust machinery: the recourse LP and its
// explicitly constructed dual, plus the worst-case-expectation primal/dual
// pair over an ambiguity set. Each pair gives two independent routes to the
// same optimal value, so their agreement certifies both the model builders
// and the LP solver's optimality claims.

#include <vector>

#include "resplan/grid.hpp"
#include "resplan/instance.hpp"
#include "resplan/scenario.hpp"

namespace resplan {

struct SecondStageSolution {
  double objective = 0.0;
  Cube shipments;  // units per (DC, site, send period)
  Grid inventory;  // units per (site, period)
  Grid backlog;    // units per (site, period)
  double shipping_cost = 0.0;
  double inventory_cost = 0.0;
  double penalty_cost = 0.0;
};

// Minimum recourse cost g(h, demand) for a fixed capacity plan. Backlog
// variables give complete recourse, so this always solves to optimality.
// Honors the instance's lead times; rejects DC-inventory instances.
SecondStageSolution second_stage_cost(const Instance& instance, const Grid& capacity,
                                      const Grid& demand);

// Dual of the recourse LP, built explicitly from its closed form rather than
// read back from the solver: theta prices DC capacity (never positive),
// gamma prices demand. Strong duality makes value match second_stage_cost.
struct DualCertificate {
  Grid theta;  // per (DC, period), <= 0
  Grid gamma;  // per (site, period), free
  double value = 0.0;
  // largest residual of the dual constraint system at (theta, gamma)
  double max_infeasibility = 0.0;
};

DualCertificate second_stage_dual(const Instance& instance, const Grid& capacity,
                                  const Grid& demand);

struct WorstCase {
  double value = 0.0;
  std::vector<double> distribution;  // worst-case p over the support points
};

struct WorstCaseDual {
  double value = 0.0;
  // one multiplier per moment row; index 0 prices the normalization sum(p)=1,
  // the rest follow moment_rows() order. alpha prices lower bounds, beta
  // upper bounds.
  std::vector<double> alpha;
  std::vector<double> beta;
};

// Maximum expected recourse cost over the ambiguity set, taking the
// per-support-point costs g as given.
WorstCase worst_case_expectation_over(const AmbiguitySpec& ambiguity,
                                      const std::vector<double>& g);
WorstCaseDual worst_case_expectation_dual_over(const AmbiguitySpec& ambiguity,
                                               const std::vector<double>& g);

// Same, computing g(h, xi_k) per support point via second_stage_cost.
WorstCase worst_case_expectation(const Instance& instance, const Grid& capacity,
                                 const AmbiguitySpec& ambiguity);
WorstCaseDual worst_case_expectation_dual(const Instance& instance, const Grid& capacity,
                                          const AmbiguitySpec& ambiguity);

// Recourse costs per support point, evaluated independently (and in parallel
// when OpenMP is enabled; results are identical either way).
std::vector<double> recourse_costs(const Instance& instance, const Grid& capacity,
                                   const AmbiguitySpec& ambiguity);

}  // namespace resplan
