#include "resplan/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "resplan/errors.hpp"
#include "resplan/lp_solver.hpp"
#include "resplan/model_ir.hpp"

namespace resplan {

double Rng::normal(double mean, double sd) {
  if (has_cached_) {
    has_cached_ = false;
    return mean + sd * cached_;
  }
  // u1 in (0,1] keeps the log finite
  double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1p-53;
  double u2 = static_cast<double>(gen_() >> 11) * 0x1p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return mean + sd * r * std::cos(a);
}

MomentEstimate MomentEstimate::from_mean_sd(Grid mean, Grid sd) {
  if (mean.rows() != sd.rows() || mean.cols() != sd.cols()) {
    throw InputError("moment estimate: mean and std_dev dimensions differ");
  }
  MomentEstimate m;
  m.second_moment = Grid(mean.rows(), mean.cols());
  for (int j = 0; j < mean.rows(); ++j) {
    for (int t = 0; t < mean.cols(); ++t) {
      if (sd(j, t) < 0) throw InputError("moment estimate: negative std_dev");
      m.second_moment(j, t) = mean(j, t) * mean(j, t) + sd(j, t) * sd(j, t);
    }
  }
  m.mean = std::move(mean);
  m.std_dev = std::move(sd);
  return m;
}

ScenarioSet sample_uniform_scenarios(const MomentEstimate& means, double half_width_factor,
                                     int count, uint64_t seed) {
  if (half_width_factor < 0.0 || half_width_factor > 1.0) {
    throw InputError("sample_uniform_scenarios: half_width_factor must be in [0,1]");
  }
  if (count < 1) throw InputError("sample_uniform_scenarios: count must be >= 1");
  int J = means.sites(), T = means.periods();
  Rng rng(seed);
  ScenarioSet set;
  set.probabilities.assign(count, 1.0 / count);
  set.demand.reserve(count);
  for (int w = 0; w < count; ++w) {
    Grid d(J, T);
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < T; ++t) {
        double mu = means.mean(j, t);
        d(j, t) = rng.uniform((1.0 - half_width_factor) * mu, (1.0 + half_width_factor) * mu);
      }
    }
    set.demand.push_back(std::move(d));
  }
  return set;
}

ScenarioSet sample_normal_scenarios(const MomentEstimate& moments, int count, uint64_t seed) {
  if (count < 1) throw InputError("sample_normal_scenarios: count must be >= 1");
  int J = moments.sites(), T = moments.periods();
  Rng rng(seed);
  ScenarioSet set;
  set.probabilities.assign(count, 1.0 / count);
  set.demand.reserve(count);
  for (int w = 0; w < count; ++w) {
    Grid d(J, T);
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < T; ++t) {
        d(j, t) = std::max(0.0, rng.normal(moments.mean(j, t), moments.std_dev(j, t)));
      }
    }
    set.demand.push_back(std::move(d));
  }
  return set;
}

std::pair<double, double> moments_from_quantiles(double q025, double median, double q975) {
  if (!(q025 <= median && median <= q975)) {
    throw InputError("moments_from_quantiles: quantiles must satisfy q025 <= median <= q975");
  }
  double mean = (q025 + 2.0 * median + q975) / 4.0;
  double sd = (q975 - q025) / 3.92;
  return {mean, sd};
}

MomentEstimate empirical_moments(const ScenarioSet& scenarios) {
  if (scenarios.demand.empty()) throw InputError("empirical_moments: no scenarios");
  int J = scenarios.demand[0].rows(), T = scenarios.demand[0].cols();
  MomentEstimate m;
  m.mean = Grid(J, T);
  m.second_moment = Grid(J, T);
  m.std_dev = Grid(J, T);
  for (size_t w = 0; w < scenarios.demand.size(); ++w) {
    double p = scenarios.probabilities[w];
    const Grid& d = scenarios.demand[w];
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < T; ++t) {
        m.mean(j, t) += p * d(j, t);
        m.second_moment(j, t) += p * d(j, t) * d(j, t);
      }
    }
  }
  for (int j = 0; j < J; ++j) {
    for (int t = 0; t < T; ++t) {
      double var = m.second_moment(j, t) - m.mean(j, t) * m.mean(j, t);
      m.std_dev(j, t) = std::sqrt(std::max(var, 0.0));
    }
  }
  return m;
}

namespace {

double general_row_value(const GeneralMomentRow& row, const Grid& xi) {
  double v = 1.0;
  for (int j = 0; j < xi.rows(); ++j) {
    for (int t = 0; t < xi.cols(); ++t) {
      int k = static_cast<int>(row.exponents(j, t));
      for (int e = 0; e < k; ++e) v *= xi(j, t);
    }
  }
  return v;
}

}  // namespace

std::string ambiguity_infeasibility(const AmbiguitySpec& spec) {
  int K = spec.num_support();
  if (K < 1) return "ambiguity set has no support points";
  int J = spec.sites(), T = spec.periods();

  // Feasibility LP over p >= 0 with a violation slack per bound; the set is
  // nonempty iff the minimal total violation is zero.
  ModelIR lp;
  lp.name = "ambiguity_feasibility";
  for (int k = 0; k < K; ++k) {
    lp.add_variable("p_" + std::to_string(k), 0.0, kInf, 0.0);
  }
  struct Row {
    std::string what;
    std::vector<double> coef;  // per support point
    double lo, hi;
  };
  std::vector<Row> rows;
  std::vector<double> ones(K, 1.0);
  rows.push_back({"probability normalization", ones, 1.0, 1.0});
  if (spec.general.empty()) {
    for (int j = 0; j < J; ++j) {
      for (int t = 0; t < T; ++t) {
        Row mr{"mean bound at site " + std::to_string(j) + " period " + std::to_string(t),
               std::vector<double>(K), spec.mean_lo(j, t), spec.mean_hi(j, t)};
        Row sr{"second-moment bound at site " + std::to_string(j) + " period " +
                   std::to_string(t),
               std::vector<double>(K), spec.sec_lo(j, t), spec.sec_hi(j, t)};
        for (int k = 0; k < K; ++k) {
          double xi = spec.support[k](j, t);
          mr.coef[k] = xi;
          sr.coef[k] = xi * xi;
        }
        rows.push_back(std::move(mr));
        rows.push_back(std::move(sr));
      }
    }
  } else {
    for (size_t s = 0; s < spec.general.size(); ++s) {
      Row r{"general moment row " + std::to_string(s), std::vector<double>(K),
            spec.general[s].lo, spec.general[s].hi};
      for (int k = 0; k < K; ++k) r.coef[k] = general_row_value(spec.general[s], spec.support[k]);
      rows.push_back(std::move(r));
    }
  }

  std::vector<int> slack_lo(rows.size()), slack_hi(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    slack_lo[r] = lp.add_variable("vlo_" + std::to_string(r), 0.0, kInf, 1.0);
    slack_hi[r] = lp.add_variable("vhi_" + std::to_string(r), 0.0, kInf, 1.0);
  }
  for (size_t r = 0; r < rows.size(); ++r) {
    std::vector<LinTerm> lo_terms, hi_terms;
    for (int k = 0; k < K; ++k) {
      if (rows[r].coef[k] != 0.0) {
        lo_terms.push_back({k, rows[r].coef[k]});
        hi_terms.push_back({k, rows[r].coef[k]});
      }
    }
    lo_terms.push_back({slack_lo[r], 1.0});   // value + slack >= lo
    hi_terms.push_back({slack_hi[r], -1.0});  // value - slack <= hi
    lp.add_constraint("lo_" + std::to_string(r), std::move(lo_terms), Relation::GE, rows[r].lo);
    lp.add_constraint("hi_" + std::to_string(r), std::move(hi_terms), Relation::LE, rows[r].hi);
  }

  LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::Optimal) {
    return "ambiguity feasibility check failed: " + std::string(to_string(sol.status));
  }
  double tol = 1e-7;
  if (sol.objective <= tol) return {};
  for (size_t r = 0; r < rows.size(); ++r) {
    double lo_v = sol.x[slack_lo[r]], hi_v = sol.x[slack_hi[r]];
    if (lo_v > tol) {
      return rows[r].what + ": lower bound " + std::to_string(rows[r].lo) +
             " unreachable by " + std::to_string(lo_v);
    }
    if (hi_v > tol) {
      return rows[r].what + ": upper bound " + std::to_string(rows[r].hi) + " exceeded by " +
             std::to_string(hi_v);
    }
  }
  return "ambiguity set empty (total bound violation " + std::to_string(sol.objective) + ")";
}

AmbiguitySpec build_ambiguity_bounds(const MomentEstimate& moments, double mean_slack_factor,
                                     double lo_factor, double hi_factor,
                                     const ScenarioSet& support) {
  if (mean_slack_factor < 0.0) {
    throw InputError("build_ambiguity_bounds: mean_slack_factor must be >= 0");
  }
  if (!(lo_factor >= 0.0 && lo_factor <= 1.0 && hi_factor >= 1.0)) {
    throw InputError("build_ambiguity_bounds: need 0 <= lo_factor <= 1 <= hi_factor");
  }
  if (support.demand.empty()) throw InputError("build_ambiguity_bounds: empty support");
  int J = moments.sites(), T = moments.periods();
  for (const Grid& d : support.demand) {
    if (d.rows() != J || d.cols() != T) {
      throw InputError("build_ambiguity_bounds: support dimensions do not match moments");
    }
  }

  AmbiguitySpec spec;
  spec.support = support.demand;
  spec.moment_estimate = moments;
  spec.mean_slack = Grid(J, T);
  spec.second_moment_lo = Grid(J, T, lo_factor);
  spec.second_moment_hi = Grid(J, T, hi_factor);
  for (int j = 0; j < J; ++j) {
    for (int t = 0; t < T; ++t) {
      spec.mean_slack(j, t) = mean_slack_factor * moments.mean(j, t);
    }
  }

  std::string issue = ambiguity_infeasibility(spec);
  if (!issue.empty()) throw InputError("build_ambiguity_bounds: " + issue);
  return spec;
}

PenaltyCase penalty_case_from_string(const std::string& s) {
  if (s == "constant") return PenaltyCase::Constant;
  if (s == "median_based") return PenaltyCase::MedianBased;
  if (s == "elder_based") return PenaltyCase::ElderBased;
  throw InputError("unknown penalty case '" + s +
                   "' (expected constant, median_based, or elder_based)");
}

const char* to_string(PenaltyCase c) {
  switch (c) {
    case PenaltyCase::Constant: return "constant";
    case PenaltyCase::MedianBased: return "median_based";
    case PenaltyCase::ElderBased: return "elder_based";
  }
  return "unknown";
}

Grid penalty_schedule(PenaltyCase pcase, const Grid& medians, const std::vector<double>& elders,
                      int sites, int periods) {
  Grid out(sites, periods);
  switch (pcase) {
    case PenaltyCase::Constant:
      for (int j = 0; j < sites; ++j) {
        for (int t = 0; t < periods; ++t) out(j, t) = 100.0;
      }
      break;
    case PenaltyCase::MedianBased:
      if (medians.rows() != sites || medians.cols() != periods) {
        throw InputError("penalty_schedule: median demand grid missing or mis-sized");
      }
      for (int j = 0; j < sites; ++j) {
        for (int t = 0; t < periods; ++t) out(j, t) = medians(j, t) + 10.0;
      }
      break;
    case PenaltyCase::ElderBased:
      if (static_cast<int>(elders.size()) != sites) {
        throw InputError("penalty_schedule: elderly population vector missing or mis-sized");
      }
      for (int j = 0; j < sites; ++j) {
        for (int t = 0; t < periods; ++t) out(j, t) = 0.001 * elders[j];
      }
      break;
  }
  return out;
}

}  // namespace resplan
