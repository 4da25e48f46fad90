#pragma once
// Experiment orchestration: a config names an instance file, an approach, and
// the sampling/ambiguity/scarcity knobs; the pipeline is
// load -> phase build -> sample -> solve -> evaluate -> emit. Every stage is
// deterministic given the seeds, so reruns produce byte-identical CSVs.
// Errors are rethrown with the failing stage in the message.

#include <cstdint>
#include <string>
#include <vector>

#include "resplan/evaluation.hpp"
#include "resplan/instance.hpp"
#include "resplan/scenario.hpp"

namespace resplan {

// Great-circle distance in statute miles (mean earth radius 3958.8 mi).
double haversine_miles(double lat1, double lon1, double lat2, double lon2);

// cost = per_mile_cost * distance / units_per_truck + refrigeration_per_unit.
// All inputs must be nonnegative and units_per_truck positive.
double shipping_cost_per_unit(double distance_miles, double per_mile_cost,
                              double units_per_truck, double refrigeration_per_unit);

enum class SampleDistribution { Uniform, Normal };

SampleDistribution sample_distribution_from_string(const std::string& s);
const char* to_string(SampleDistribution d);

// One demand phase: a run of `periods` consecutive model periods whose
// regional demand totals are spread evenly across them. start_date is
// ISO-8601 metadata; phases are index ranges over periods, not calendar
// arithmetic. daily_capacity > 0 overrides the per-DC capacity limit as
// daily_capacity * period_length_days during this phase.
struct PhaseDefinition {
  std::string start_date;
  int periods = 0;
  double daily_capacity = 0.0;
  std::vector<double> demand_total;  // per region, summed over the phase

  bool operator==(const PhaseDefinition&) const = default;
};

struct ExperimentConfig {
  std::string instance_path;
  std::string approach = "sp";  // dt | sp | dro

  int in_sample_count = 1;
  uint64_t in_sample_seed = 0;
  int out_sample_count = 1;
  uint64_t out_sample_seed = 0;

  SampleDistribution distribution = SampleDistribution::Uniform;
  double half_width_factor = 0.5;  // uniform sampling: d ~ U[(1-f)mu, (1+f)mu]

  double mean_slack_factor = 0.5;     // ambiguity mean half-width as a factor of mu
  double second_moment_lo = 0.1;      // factor on the nominal second moment
  double second_moment_hi = 2.0;
  int dro_support_count = 0;          // 0 = all in-sample scenarios

  double scarcity_factor = 1.0;  // scales every temporal budget, in (0, 1]
  DcPolicy dc_policy = DcPolicy::Default;

  PenaltyCase penalty_case = PenaltyCase::Constant;
  bool penalty_override = false;          // rebuild the penalty grid from the case
  std::vector<double> elder_population;   // per region, for the elder-based case

  int period_length_days = 14;
  std::vector<PhaseDefinition> phases;  // at least one

  bool operator==(const ExperimentConfig&) const = default;
};

std::string to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

// Spreads each phase's regional totals evenly across its periods and returns
// the rebuilt instance plus the nominal demand moments. The horizon becomes
// the total phase period count; base cost tables must either already match it
// or have a single period to replicate. Capacity limits follow the phase
// daily_capacity overrides (per-DC limit = max over phases, temporal budget =
// sum of that phase's per-DC limits). Totals must cover every region.
std::pair<Instance, MomentEstimate> build_phase_instance(const ExperimentConfig& config,
                                                         const Instance& base);

// Everything the solve stage consumes, produced by load + phase build +
// policy/scarcity + sample + ambiguity construction.
struct ExperimentInputs {
  Instance instance;
  MomentEstimate moments;
  ScenarioSet in_sample;
  ScenarioSet out_sample;
  AmbiguitySpec ambiguity;  // support = leading dro_support_count in-sample draws
};

ExperimentInputs prepare_experiment(const ExperimentConfig& config);
ExperimentInputs prepare_experiment(const ExperimentConfig& config, const Instance& base);

// Solves one approach on prepared inputs; the evaluation fields stay empty.
// Throws SolverLimit when branch and bound stops before proving optimality.
ApproachResult solve_approach(const ExperimentInputs& inputs, const std::string& approach);

struct ExperimentArtifacts {
  ExperimentInputs inputs;
  std::vector<ApproachResult> results;  // one row, or dt/sp/dro for compare
  std::string breakdown;                // fixed-column CSV
  std::string summary;                  // human-readable, compact currency
};

// Solves config.approach only; the CSV holds one row.
ExperimentArtifacts run_experiment(const ExperimentConfig& config);
ExperimentArtifacts run_experiment(const ExperimentConfig& config, const Instance& base);

// Solves all three approaches on the same inputs; the CSV holds three rows.
ExperimentArtifacts compare_experiment(const ExperimentConfig& config);
ExperimentArtifacts compare_experiment(const ExperimentConfig& config, const Instance& base);

// $12.34 / $56.7K / $8.90M / $1.23B, used only in summary logs.
std::string format_currency_compact(double v);

}  // namespace resplan
