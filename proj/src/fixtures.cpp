#include "resplan/fixtures.hpp"

#include <cmath>
#include <string>

namespace resplan {

Instance random_instance(uint64_t seed, int num_dcs, int num_sites, int periods) {
  Rng rng(seed);
  Instance inst;
  inst.name = "random_" + std::to_string(seed);
  inst.periods = periods;
  for (int i = 0; i < num_dcs; ++i) {
    DcSite site;
    site.id = "dc" + std::to_string(i);
    double r = rng.uniform01();
    site.status = r < 0.3 ? DcStatus::Preopened
                          : (r > 0.95 ? DcStatus::Forbidden : DcStatus::Candidate);
    inst.dc_sites.push_back(site);
  }
  // at least one usable DC; penalties keep the recourse feasible regardless
  if (inst.dc_sites[0].status == DcStatus::Forbidden) {
    inst.dc_sites[0].status = DcStatus::Candidate;
  }
  for (int j = 0; j < num_sites; ++j) {
    inst.demand_sites.push_back("site" + std::to_string(j));
  }

  inst.operating_cost.resize(num_dcs);
  inst.dc_capacity_limit.resize(num_dcs);
  inst.capacity_unit_cost = Grid(num_dcs, periods);
  for (int i = 0; i < num_dcs; ++i) {
    inst.operating_cost[i] = rng.uniform(200.0, 800.0);
    inst.dc_capacity_limit[i] = rng.uniform(50.0, 150.0);
    double rate = rng.uniform(1.0, 5.0);
    for (int t = 0; t < periods; ++t) inst.capacity_unit_cost(i, t) = rate;
  }
  inst.shipping_unit_cost = Cube(num_dcs, num_sites, periods);
  for (int i = 0; i < num_dcs; ++i) {
    for (int j = 0; j < num_sites; ++j) {
      for (int t = 0; t < periods; ++t) {
        inst.shipping_unit_cost(i, j, t) = rng.uniform(1.0, 10.0);
      }
    }
  }
  inst.inventory_unit_cost = Grid(num_sites, periods);
  inst.penalty_unit_cost = Grid(num_sites, periods);
  for (int j = 0; j < num_sites; ++j) {
    for (int t = 0; t < periods; ++t) {
      inst.inventory_unit_cost(j, t) = rng.uniform(0.5, 2.0);
      inst.penalty_unit_cost(j, t) = rng.uniform(20.0, 60.0);
    }
  }
  double total_limit = 0.0;
  for (double m : inst.dc_capacity_limit) total_limit += m;
  inst.temporal_budget.resize(periods);
  for (int t = 0; t < periods; ++t) {
    inst.temporal_budget[t] = rng.uniform(0.3, 0.9) * total_limit * 0.5;
  }
  inst.initial_inventory.resize(num_sites);
  inst.initial_backlog.resize(num_sites);
  for (int j = 0; j < num_sites; ++j) {
    inst.initial_inventory[j] = rng.uniform(0.0, 10.0);
    inst.initial_backlog[j] = rng.uniform(0.0, 5.0);
  }
  return inst;
}

MomentEstimate random_moments(uint64_t seed, const Instance& instance) {
  Rng rng(seed);
  Grid mean(instance.num_sites(), instance.periods);
  Grid sd(instance.num_sites(), instance.periods);
  for (int j = 0; j < instance.num_sites(); ++j) {
    for (int t = 0; t < instance.periods; ++t) {
      mean(j, t) = rng.uniform(5.0, 30.0);
      sd(j, t) = mean(j, t) / 4.0;
    }
  }
  return MomentEstimate::from_mean_sd(std::move(mean), std::move(sd));
}

TypedInstance random_typed_instance(uint64_t seed, int num_dcs, int num_sites,
                                    int periods, int num_types) {
  Rng rng(seed);
  TypedInstance inst;
  inst.name = "random_typed_" + std::to_string(seed);
  inst.periods = periods;
  for (int i = 0; i < num_dcs; ++i) {
    DcSite site;
    site.id = "dc" + std::to_string(i);
    site.status = rng.uniform01() < 0.3 ? DcStatus::Preopened : DcStatus::Candidate;
    inst.dc_sites.push_back(site);
  }
  for (int j = 0; j < num_sites; ++j) {
    inst.demand_sites.push_back("site" + std::to_string(j));
  }
  for (int l = 0; l < num_types; ++l) {
    inst.resource_types.push_back("type" + std::to_string(l));
  }
  inst.operating_cost = Grid(num_dcs, num_types);
  inst.capacity_unit_cost = Grid(num_dcs, num_types);
  inst.dc_capacity_limit = Grid(num_dcs, num_types);
  double total_limit = 0.0;
  for (int i = 0; i < num_dcs; ++i) {
    for (int l = 0; l < num_types; ++l) {
      inst.operating_cost(i, l) = rng.uniform(200.0, 800.0);
      inst.capacity_unit_cost(i, l) = rng.uniform(1.0, 5.0);
      inst.dc_capacity_limit(i, l) = rng.uniform(50.0, 150.0);
      total_limit += inst.dc_capacity_limit(i, l);
    }
  }
  inst.shipping_unit_cost = Tensor4(num_dcs, num_sites, periods, num_types);
  for (int i = 0; i < num_dcs; ++i) {
    for (int j = 0; j < num_sites; ++j) {
      for (int t = 0; t < periods; ++t) {
        for (int l = 0; l < num_types; ++l) {
          inst.shipping_unit_cost(i, j, t, l) = rng.uniform(1.0, 10.0);
        }
      }
    }
  }
  inst.inventory_unit_cost = Cube(num_sites, periods, num_types);
  inst.penalty_unit_cost = Cube(num_sites, periods, num_types);
  for (int j = 0; j < num_sites; ++j) {
    for (int t = 0; t < periods; ++t) {
      for (int l = 0; l < num_types; ++l) {
        inst.inventory_unit_cost(j, t, l) = rng.uniform(0.5, 2.0);
        inst.penalty_unit_cost(j, t, l) = rng.uniform(20.0, 60.0);
      }
    }
  }
  inst.temporal_budget.resize(periods);
  for (int t = 0; t < periods; ++t) {
    inst.temporal_budget[t] = rng.uniform(0.3, 0.9) * total_limit * 0.5;
  }
  inst.initial_inventory.resize(num_sites);
  inst.initial_backlog.resize(num_sites);
  for (int j = 0; j < num_sites; ++j) {
    inst.initial_inventory[j] = rng.uniform(0.0, 10.0);
    inst.initial_backlog[j] = rng.uniform(0.0, 5.0);
  }
  return inst;
}

AmbiguitySpec random_ambiguity(uint64_t seed, const MomentEstimate& moments,
                               int support_count, double mean_slack_factor,
                               double lo_factor, double hi_factor) {
  ScenarioSet support = sample_uniform_scenarios(moments, 0.5, support_count, seed);
  return build_ambiguity_bounds(empirical_moments(support), mean_slack_factor, lo_factor,
                                hi_factor, support);
}

TypedInstance widen_to_single_type(const Instance& instance) {
  TypedInstance typed;
  typed.name = instance.name + "_typed";
  typed.dc_sites = instance.dc_sites;
  typed.demand_sites = instance.demand_sites;
  typed.resource_types = {"only"};
  typed.periods = instance.periods;
  const int I = instance.num_dcs();
  const int J = instance.num_sites();
  const int T = instance.periods;
  typed.operating_cost = Grid(I, 1);
  typed.capacity_unit_cost = Grid(I, 1);
  typed.dc_capacity_limit = Grid(I, 1);
  for (int i = 0; i < I; ++i) {
    typed.operating_cost(i, 0) = instance.operating_cost[i];
    typed.capacity_unit_cost(i, 0) = instance.capacity_cost(i, 0);
    typed.dc_capacity_limit(i, 0) = instance.dc_capacity_limit[i];
  }
  typed.shipping_unit_cost = Tensor4(I, J, T, 1);
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < T; ++t) {
        typed.shipping_unit_cost(i, j, t, 0) = instance.shipping_unit_cost(i, j, t);
      }
    }
  }
  typed.inventory_unit_cost = Cube(J, T, 1);
  typed.penalty_unit_cost = Cube(J, T, 1);
  for (int j = 0; j < J; ++j) {
    for (int t = 0; t < T; ++t) {
      typed.inventory_unit_cost(j, t, 0) = instance.inventory_unit_cost(j, t);
      typed.penalty_unit_cost(j, t, 0) = instance.penalty_unit_cost(j, t);
    }
  }
  typed.temporal_budget = instance.temporal_budget;
  typed.initial_inventory = instance.initial_inventory;
  typed.initial_backlog = instance.initial_backlog;
  return typed;
}

namespace {

struct City {
  const char* id;
  double lat;
  double lon;
  double rent;  // warehouse rent, dollars per square foot per year
};

// five production DCs already in service, then one candidate per region
constexpr City kUs10Dcs[15] = {
    {"kalamazoo_mi", 42.2917, -85.5872, 4.5},
    {"pleasant_prairie_wi", 42.5531, -87.9334, 5.0},
    {"bloomington_in", 39.1653, -86.5264, 4.8},
    {"norwood_ma", 42.1945, -71.1995, 9.5},
    {"saint_louis_mo", 38.6270, -90.1994, 4.9},
    {"boston_ma", 42.3601, -71.0589, 10.5},
    {"new_york_ny", 40.7128, -74.0060, 16.0},
    {"philadelphia_pa", 39.9526, -75.1652, 7.5},
    {"atlanta_ga", 33.7490, -84.3880, 5.6},
    {"chicago_il", 41.8781, -87.6298, 6.2},
    {"dallas_tx", 32.7767, -96.7970, 5.4},
    {"kansas_city_ks", 39.1147, -94.6275, 4.6},
    {"denver_co", 39.7392, -104.9903, 7.8},
    {"san_francisco_ca", 37.7749, -122.4194, 14.0},
    {"seattle_wa", 47.6062, -122.3321, 11.0},
};

constexpr City kUs10Regions[10] = {
    {"region1_boston", 42.3601, -71.0589, 0},
    {"region2_new_york", 40.7128, -74.0060, 0},
    {"region3_philadelphia", 39.9526, -75.1652, 0},
    {"region4_atlanta", 33.7490, -84.3880, 0},
    {"region5_chicago", 41.8781, -87.6298, 0},
    {"region6_dallas", 32.7767, -96.7970, 0},
    {"region7_kansas_city", 39.1147, -94.6275, 0},
    {"region8_denver", 39.7392, -104.9903, 0},
    {"region9_san_francisco", 37.7749, -122.4194, 0},
    {"region10_seattle", 47.6062, -122.3321, 0},
};

// phase demand totals per region, thousands of doses (desk scale)
constexpr double kUs10Phase1Total[10] = {1000.0, 1300.0, 2200.0, 3900.0, 2000.0,
                                         3000.0, 970.0,  920.4,  3300.0, 968.5};

constexpr double kUs10DailyCapacity = 500.0;  // thousands of doses per DC per day
constexpr int kUs10PeriodDays = 14;

}  // namespace

Instance us10_instance() {
  const int I = 15;
  const int J = 10;
  Instance inst;
  inst.name = "us10_vaccine_phase1";
  inst.periods = 1;
  for (const City& c : kUs10Dcs) {
    DcSite site;
    site.id = c.id;
    site.status = DcStatus::Candidate;
    site.coords = {c.lat, c.lon};
    inst.dc_sites.push_back(std::move(site));
  }
  for (int i = 0; i < 5; ++i) inst.dc_sites[i].status = DcStatus::Preopened;
  for (const City& c : kUs10Regions) inst.demand_sites.push_back(c.id);

  inst.operating_cost.resize(I);
  inst.dc_capacity_limit.resize(I);
  inst.capacity_unit_cost = Grid(I, 1, 25.0);
  double per_dc = kUs10DailyCapacity * kUs10PeriodDays;
  for (int i = 0; i < I; ++i) {
    // 10000 sq ft at the local rent, scaled by the same 1/1000 as quantities
    inst.operating_cost[i] = 10.0 * kUs10Dcs[i].rent;
    inst.dc_capacity_limit[i] = per_dc;
  }
  inst.temporal_budget = {per_dc * I};

  inst.shipping_unit_cost = Cube(I, J, 1);
  for (int i = 0; i < I; ++i) {
    for (int j = 0; j < J; ++j) {
      double dist = haversine_miles(kUs10Dcs[i].lat, kUs10Dcs[i].lon, kUs10Regions[j].lat,
                                    kUs10Regions[j].lon);
      inst.shipping_unit_cost(i, j, 0) = shipping_cost_per_unit(dist, 3.0, 230400.0, 0.01);
    }
  }
  inst.inventory_unit_cost = Grid(J, 1, 0.00008);
  inst.penalty_unit_cost = Grid(J, 1, 100.0);
  inst.initial_inventory.assign(J, 0.0);
  inst.initial_backlog.assign(J, 0.0);
  return inst;
}

ExperimentConfig us10_config() {
  ExperimentConfig config;
  config.instance_path = "us10_instance.json";  // sibling of the config file
  config.approach = "sp";
  config.in_sample_count = 30;
  config.in_sample_seed = 7001;
  config.out_sample_count = 200;
  config.out_sample_seed = 7002;
  config.distribution = SampleDistribution::Uniform;
  config.half_width_factor = 0.5;
  config.mean_slack_factor = 0.5;
  config.second_moment_lo = 0.1;
  config.second_moment_hi = 2.0;
  config.dro_support_count = 10;
  config.scarcity_factor = 1.0;
  config.dc_policy = DcPolicy::Default;
  config.penalty_case = PenaltyCase::Constant;
  config.period_length_days = kUs10PeriodDays;
  PhaseDefinition phase;
  phase.start_date = "2020-12-14";
  phase.periods = 2;
  phase.daily_capacity = kUs10DailyCapacity;
  phase.demand_total.assign(kUs10Phase1Total, kUs10Phase1Total + 10);
  config.phases.push_back(std::move(phase));
  return config;
}

}  // namespace resplan
