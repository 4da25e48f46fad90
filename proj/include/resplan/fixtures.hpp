#pragma once
// Seeded, fully deterministic fixtures: random instances for property tests
// and (see us10_*) the ten-region US case driven by the experiment pipeline.

#include <cstdint>

#include "resplan/experiment.hpp"
#include "resplan/instance.hpp"
#include "resplan/scenario.hpp"

namespace resplan {

// Random base instance: mixed preopened/candidate DCs, uniform unit costs,
// penalty rates well above shipping rates so demand is served whenever
// capacity allows, and budgets tight enough to bind sometimes.
Instance random_instance(uint64_t seed, int num_dcs, int num_sites, int periods);

// Demand means in [5, 30] with sd = mean / 4, shaped for the instance.
MomentEstimate random_moments(uint64_t seed, const Instance& instance);

// Multi-type instance with the same flavor as random_instance.
TypedInstance random_typed_instance(uint64_t seed, int num_dcs, int num_sites,
                                    int periods, int num_types);

// Ambiguity set whose moment bounds are centered on the empirical moments of
// its own sampled support, so the equal-weight distribution always lies
// inside and the set is never empty.
AmbiguitySpec random_ambiguity(uint64_t seed, const MomentEstimate& moments,
                               int support_count, double mean_slack_factor,
                               double lo_factor, double hi_factor);

// Reshapes a base instance into a one-type TypedInstance with identical
// costs and limits; the multi-type model on it collapses to the base model.
TypedInstance widen_to_single_type(const Instance& instance);

// Ten-region US vaccine case at desk scale: all quantities (demand totals,
// capacities, budgets) and the fixed operating costs divided by 1000, unit
// costs per dose kept verbatim ($25 capacity, $100 penalty, $0.00008
// inventory, $3/mile over 230,400 doses per truck). Five preopened DCs plus
// ten candidates colocated with the demand regions. us10_instance() is the
// one-period base whose cost tables replicate across the phase horizon;
// us10_config() spreads the phase totals over two periods and pins seeds.
Instance us10_instance();
ExperimentConfig us10_config();

}  // namespace resplan
