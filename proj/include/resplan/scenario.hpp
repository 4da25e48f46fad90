#pragma once
// Demand scenario generation, moment estimation, and ambiguity-set
// construction.
//
// Random numbers come from a fixed, documented generator (std::mt19937_64 with
// 53-bit uniform extraction and Box-Muller normals) so that a seed identifies
// a scenario set bit-for-bit. Draws are sequential in scenario-major order:
// scenario, then site, then period.

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "resplan/grid.hpp"
#include "resplan/instance.hpp"

namespace resplan {

class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // uniform on [0,1) with 53-bit resolution
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller; consumes two words per pair and caches the second deviate
  double normal(double mean, double sd);

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

struct MomentEstimate {
  Grid mean;           // mu, per (site, period)
  Grid second_moment;  // S = mu^2 + sigma^2
  Grid std_dev;        // sigma

  int sites() const { return mean.rows(); }
  int periods() const { return mean.cols(); }

  static MomentEstimate from_mean_sd(Grid mean, Grid sd);
};

// One generalized moment row: E[f(xi)] in [lo, hi] with
// f(xi) = prod_{j,t} xi_jt^exponents(j,t), exponents integer-valued.
struct GeneralMomentRow {
  Grid exponents;
  double lo = 0.0;
  double hi = 0.0;
};

// Moment-based ambiguity set over distributions supported on K demand
// realizations. The special form bounds the mean within mean_slack of the
// empirical mean and the second moment within [lo, hi] factors of the
// empirical second moment. When `general` rows are present, verification
// oracles use those rows instead of the special-form rows; the normalization
// sum(p) = 1 is always implied.
struct AmbiguitySpec {
  std::vector<Grid> support;  // K realizations, each (site, period)
  Grid mean_slack;            // absolute half-width around the mean
  Grid second_moment_lo;      // factor in [0,1]
  Grid second_moment_hi;      // factor >= 1
  MomentEstimate moment_estimate;
  std::vector<GeneralMomentRow> general;

  int num_support() const { return static_cast<int>(support.size()); }
  int sites() const { return moment_estimate.sites(); }
  int periods() const { return moment_estimate.periods(); }

  double mean_lo(int j, int t) const { return moment_estimate.mean(j, t) - mean_slack(j, t); }
  double mean_hi(int j, int t) const { return moment_estimate.mean(j, t) + mean_slack(j, t); }
  double sec_lo(int j, int t) const {
    return second_moment_lo(j, t) * moment_estimate.second_moment(j, t);
  }
  double sec_hi(int j, int t) const {
    return second_moment_hi(j, t) * moment_estimate.second_moment(j, t);
  }
};

// Each d_jt ~ uniform on [(1-f) mu, (1+f) mu], i.i.d., equal probabilities.
ScenarioSet sample_uniform_scenarios(const MomentEstimate& means, double half_width_factor,
                                     int count, uint64_t seed);

// Each d_jt ~ normal(mu, sigma^2) clamped at zero, i.i.d., equal probabilities.
ScenarioSet sample_normal_scenarios(const MomentEstimate& moments, int count, uint64_t seed);

// Treats (q025, q975) as a central 95% range: mean = (q025 + 2 median + q975)/4,
// sd = (q975 - q025)/3.92. Throws InputError if the quantiles are out of order.
std::pair<double, double> moments_from_quantiles(double q025, double median, double q975);

MomentEstimate empirical_moments(const ScenarioSet& scenarios);

// Empty string when a distribution over the support satisfies every moment
// bound, otherwise a description of a violated bound. Decided by a feasibility
// LP with violation slacks.
std::string ambiguity_infeasibility(const AmbiguitySpec& spec);

// mean bounds mu -+ factor*mu, second-moment bounds [lo_factor, hi_factor]*S.
// Throws InputError when factors are out of range or the set is empty.
AmbiguitySpec build_ambiguity_bounds(const MomentEstimate& moments, double mean_slack_factor,
                                     double lo_factor, double hi_factor,
                                     const ScenarioSet& support);

enum class PenaltyCase { Constant, MedianBased, ElderBased };

PenaltyCase penalty_case_from_string(const std::string& s);
const char* to_string(PenaltyCase c);

// Unmet-demand penalty per (site, period): constant 100, median demand + 10,
// or 0.001 * elderly population of the site. Side data not needed by the
// chosen case may be empty; missing required data throws InputError.
Grid penalty_schedule(PenaltyCase pcase, const Grid& medians, const std::vector<double>& elders,
                      int sites, int periods);

}  // namespace resplan
