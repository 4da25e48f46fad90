#include "resplan/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "resplan/errors.hpp"
#include "resplan/formulations.hpp"
#include "resplan/milp_solver.hpp"
#include "resplan/serialize.hpp"

#include "../vendor/json.hpp"

namespace resplan {

namespace {

constexpr double kEarthRadiusMiles = 3958.8;
constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

double haversine_miles(double lat1, double lon1, double lat2, double lon2) {
  double phi1 = deg2rad(lat1);
  double phi2 = deg2rad(lat2);
  double dphi = deg2rad(lat2 - lat1);
  double dlam = deg2rad(lon2 - lon1);
  double a = std::sin(dphi / 2) * std::sin(dphi / 2) +
             std::cos(phi1) * std::cos(phi2) * std::sin(dlam / 2) * std::sin(dlam / 2);
  return 2.0 * kEarthRadiusMiles * std::asin(std::min(1.0, std::sqrt(a)));
}

double shipping_cost_per_unit(double distance_miles, double per_mile_cost,
                              double units_per_truck, double refrigeration_per_unit) {
  if (distance_miles < 0 || per_mile_cost < 0 || units_per_truck < 0 ||
      refrigeration_per_unit < 0) {
    throw InputError("shipping_cost_per_unit: inputs must be nonnegative");
  }
  if (units_per_truck == 0) {
    throw InputError("shipping_cost_per_unit: units_per_truck must be positive");
  }
  return per_mile_cost * distance_miles / units_per_truck + refrigeration_per_unit;
}

SampleDistribution sample_distribution_from_string(const std::string& s) {
  if (s == "uniform") return SampleDistribution::Uniform;
  if (s == "normal") return SampleDistribution::Normal;
  throw InputError("unknown sampling distribution '" + s + "'");
}

const char* to_string(SampleDistribution d) {
  return d == SampleDistribution::Uniform ? "uniform" : "normal";
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw InputError("schema violation at " + path + ": " + message);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) fail(path + "." + item.key(), "unknown field");
  }
}

const json& field(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing field");
  return *it;
}

double num_at(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

int int_at(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

uint64_t seed_at(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected an integer");
  if (v.is_number_integer() && v.get<int64_t>() < 0) fail(path, "seed must be nonnegative");
  return v.get<uint64_t>();
}

std::string str_at(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

std::vector<double> vec_at(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(num_at(v[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

bool iso_date_ok(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (int k : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (s[k] < '0' || s[k] > '9') return false;
  }
  int month = (s[5] - '0') * 10 + (s[6] - '0');
  int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

}  // namespace

std::string to_json(const ExperimentConfig& config) {
  json doc;
  doc["instance"] = config.instance_path;
  doc["approach"] = config.approach;
  doc["in_sample"] = {{"count", config.in_sample_count}, {"seed", config.in_sample_seed}};
  doc["out_of_sample"] = {{"count", config.out_sample_count},
                          {"seed", config.out_sample_seed}};
  doc["sampling"] = {{"distribution", to_string(config.distribution)},
                     {"half_width_factor", config.half_width_factor}};
  json amb = {{"mean_slack_factor", config.mean_slack_factor},
              {"second_moment_lo_factor", config.second_moment_lo},
              {"second_moment_hi_factor", config.second_moment_hi}};
  if (config.dro_support_count > 0) amb["support_count"] = config.dro_support_count;
  doc["ambiguity"] = std::move(amb);
  doc["scarcity_factor"] = config.scarcity_factor;
  doc["dc_policy"] = to_string(config.dc_policy);
  json pen = {{"case", to_string(config.penalty_case)},
              {"override", config.penalty_override}};
  if (!config.elder_population.empty()) pen["elder_population"] = config.elder_population;
  doc["penalty"] = std::move(pen);
  json defs = json::array();
  for (const PhaseDefinition& phase : config.phases) {
    json p;
    p["start_date"] = phase.start_date;
    p["periods"] = phase.periods;
    if (phase.daily_capacity > 0) p["daily_capacity"] = phase.daily_capacity;
    p["demand_total"] = phase.demand_total;
    defs.push_back(std::move(p));
  }
  doc["phases"] = {{"period_length_days", config.period_length_days},
                   {"definitions", std::move(defs)}};
  return doc.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  const std::string root = "config";
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("config: invalid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) fail(root, "expected an object");
  check_keys(doc, root,
             {"instance", "approach", "in_sample", "out_of_sample", "sampling",
              "ambiguity", "scarcity_factor", "dc_policy", "penalty", "phases"});

  ExperimentConfig out;
  out.instance_path = str_at(field(doc, root, "instance"), root + ".instance");
  out.approach = str_at(field(doc, root, "approach"), root + ".approach");
  if (out.approach != "dt" && out.approach != "sp" && out.approach != "dro") {
    fail(root + ".approach", "expected dt, sp, or dro");
  }

  auto sample_block = [&](const char* key, int& count, uint64_t& seed) {
    const std::string path = root + "." + key;
    const json& blk = field(doc, root, key);
    if (!blk.is_object()) fail(path, "expected an object");
    check_keys(blk, path, {"count", "seed"});
    count = int_at(field(blk, path, "count"), path + ".count");
    if (count < 1) fail(path + ".count", "count must be at least 1");
    seed = seed_at(field(blk, path, "seed"), path + ".seed");
  };
  sample_block("in_sample", out.in_sample_count, out.in_sample_seed);
  sample_block("out_of_sample", out.out_sample_count, out.out_sample_seed);

  {
    const std::string path = root + ".sampling";
    const json& blk = field(doc, root, "sampling");
    if (!blk.is_object()) fail(path, "expected an object");
    check_keys(blk, path, {"distribution", "half_width_factor"});
    out.distribution = sample_distribution_from_string(
        str_at(field(blk, path, "distribution"), path + ".distribution"));
    out.half_width_factor =
        num_at(field(blk, path, "half_width_factor"), path + ".half_width_factor");
    if (out.half_width_factor < 0 || out.half_width_factor >= 1) {
      fail(path + ".half_width_factor", "factor must lie in [0, 1)");
    }
  }
  {
    const std::string path = root + ".ambiguity";
    const json& blk = field(doc, root, "ambiguity");
    if (!blk.is_object()) fail(path, "expected an object");
    check_keys(blk, path,
               {"mean_slack_factor", "second_moment_lo_factor", "second_moment_hi_factor",
                "support_count"});
    out.mean_slack_factor =
        num_at(field(blk, path, "mean_slack_factor"), path + ".mean_slack_factor");
    out.second_moment_lo = num_at(field(blk, path, "second_moment_lo_factor"),
                                  path + ".second_moment_lo_factor");
    out.second_moment_hi = num_at(field(blk, path, "second_moment_hi_factor"),
                                  path + ".second_moment_hi_factor");
    if (out.mean_slack_factor < 0) fail(path + ".mean_slack_factor", "factor must be >= 0");
    if (out.second_moment_lo < 0 || out.second_moment_lo > 1) {
      fail(path + ".second_moment_lo_factor", "factor must lie in [0, 1]");
    }
    if (out.second_moment_hi < 1) {
      fail(path + ".second_moment_hi_factor", "factor must be >= 1");
    }
    if (blk.contains("support_count")) {
      out.dro_support_count = int_at(blk["support_count"], path + ".support_count");
      if (out.dro_support_count < 1) fail(path + ".support_count", "count must be at least 1");
    }
  }
  out.scarcity_factor = num_at(field(doc, root, "scarcity_factor"), root + ".scarcity_factor");
  if (!(out.scarcity_factor > 0) || out.scarcity_factor > 1) {
    fail(root + ".scarcity_factor", "factor must lie in (0, 1]");
  }
  {
    std::string s = str_at(field(doc, root, "dc_policy"), root + ".dc_policy");
    try {
      out.dc_policy = dc_policy_from_string(s);
    } catch (const InputError&) {
      fail(root + ".dc_policy", "expected default, best_case, or most_restrictive");
    }
  }
  {
    const std::string path = root + ".penalty";
    const json& blk = field(doc, root, "penalty");
    if (!blk.is_object()) fail(path, "expected an object");
    check_keys(blk, path, {"case", "override", "elder_population"});
    std::string s = str_at(field(blk, path, "case"), path + ".case");
    try {
      out.penalty_case = penalty_case_from_string(s);
    } catch (const InputError&) {
      fail(path + ".case", "unknown penalty case '" + s + "'");
    }
    if (blk.contains("override")) {
      if (!blk["override"].is_boolean()) fail(path + ".override", "expected a boolean");
      out.penalty_override = blk["override"].get<bool>();
    }
    if (blk.contains("elder_population")) {
      out.elder_population = vec_at(blk["elder_population"], path + ".elder_population");
    }
  }
  {
    const std::string path = root + ".phases";
    const json& blk = field(doc, root, "phases");
    if (!blk.is_object()) fail(path, "expected an object");
    check_keys(blk, path, {"period_length_days", "definitions"});
    out.period_length_days =
        int_at(field(blk, path, "period_length_days"), path + ".period_length_days");
    if (out.period_length_days < 1) {
      fail(path + ".period_length_days", "length must be at least 1 day");
    }
    const json& defs = field(blk, path, "definitions");
    if (!defs.is_array() || defs.empty()) {
      fail(path + ".definitions", "expected a nonempty array");
    }
    for (std::size_t k = 0; k < defs.size(); ++k) {
      const std::string pk = path + ".definitions[" + std::to_string(k) + "]";
      const json& p = defs[k];
      if (!p.is_object()) fail(pk, "expected an object");
      check_keys(p, pk, {"start_date", "periods", "daily_capacity", "demand_total"});
      PhaseDefinition phase;
      phase.start_date = str_at(field(p, pk, "start_date"), pk + ".start_date");
      if (!iso_date_ok(phase.start_date)) {
        fail(pk + ".start_date", "expected an ISO-8601 date (YYYY-MM-DD)");
      }
      phase.periods = int_at(field(p, pk, "periods"), pk + ".periods");
      if (phase.periods < 1) fail(pk + ".periods", "each phase spans at least one period");
      if (p.contains("daily_capacity")) {
        phase.daily_capacity = num_at(p["daily_capacity"], pk + ".daily_capacity");
        if (phase.daily_capacity < 0) fail(pk + ".daily_capacity", "capacity must be >= 0");
      }
      phase.demand_total = vec_at(field(p, pk, "demand_total"), pk + ".demand_total");
      if (phase.demand_total.empty()) {
        fail(pk + ".demand_total", "totals must cover every region");
      }
      for (std::size_t j = 0; j < phase.demand_total.size(); ++j) {
        if (phase.demand_total[j] < 0) {
          fail(pk + ".demand_total[" + std::to_string(j) + "]", "totals must be >= 0");
        }
      }
      out.phases.push_back(std::move(phase));
    }
  }
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  try {
    return config_from_json(read_text_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  write_text_file(path, to_json(config));
}

std::pair<Instance, MomentEstimate> build_phase_instance(const ExperimentConfig& config,
                                                         const Instance& base) {
  const std::string context = "build_phase_instance";
  const int J = base.num_sites();
  const int I = base.num_dcs();
  int total_periods = 0;
  for (const PhaseDefinition& phase : config.phases) total_periods += phase.periods;
  if (total_periods < 1) throw InputError(context + ": phases span no periods");
  for (std::size_t k = 0; k < config.phases.size(); ++k) {
    if (static_cast<int>(config.phases[k].demand_total.size()) != J) {
      throw InputError(context + ": phase " + std::to_string(k) + " lists " +
                       std::to_string(config.phases[k].demand_total.size()) +
                       " regions, instance has " + std::to_string(J));
    }
  }

  // per-period tables either already span the rebuilt horizon or replicate
  // their single column
  const int baseT = base.periods;
  if (baseT != total_periods && baseT != 1) {
    throw InputError(context + ": instance spans " + std::to_string(baseT) +
                     " periods, phases span " + std::to_string(total_periods) +
                     " (only single-period tables replicate)");
  }
  auto col = [&](int t) { return baseT == total_periods ? t : 0; };

  Instance out = base;
  out.periods = total_periods;
  out.capacity_unit_cost = Grid(I, total_periods);
  out.shipping_unit_cost = Cube(I, J, total_periods);
  out.inventory_unit_cost = Grid(J, total_periods);
  out.penalty_unit_cost = Grid(J, total_periods);
  for (int t = 0; t < total_periods; ++t) {
    for (int i = 0; i < I; ++i) {
      out.capacity_unit_cost(i, t) = base.capacity_unit_cost(i, col(t));
      for (int j = 0; j < J; ++j) {
        out.shipping_unit_cost(i, j, t) = base.shipping_unit_cost(i, j, col(t));
      }
    }
    for (int j = 0; j < J; ++j) {
      out.inventory_unit_cost(j, t) = base.inventory_unit_cost(j, col(t));
      out.penalty_unit_cost(j, t) = base.penalty_unit_cost(j, col(t));
    }
  }
  if (base.dc_inventory_unit_cost) {
    Grid dc(I, total_periods);
    for (int i = 0; i < I; ++i) {
      for (int t = 0; t < total_periods; ++t) dc(i, t) = (*base.dc_inventory_unit_cost)(i, col(t));
    }
    out.dc_inventory_unit_cost = std::move(dc);
  }

  // demand means: each phase's totals spread evenly over its periods
  Grid mean(J, total_periods);
  std::vector<double> budget(total_periods, 0.0);
  std::vector<double> dc_limit = base.dc_capacity_limit;
  int t0 = 0;
  for (const PhaseDefinition& phase : config.phases) {
    for (int dt = 0; dt < phase.periods; ++dt) {
      for (int j = 0; j < J; ++j) {
        mean(j, t0 + dt) = phase.demand_total[j] / phase.periods;
      }
    }
    if (phase.daily_capacity > 0) {
      double limit = phase.daily_capacity * config.period_length_days;
      for (int i = 0; i < I; ++i) dc_limit[i] = std::max(dc_limit[i], limit);
      for (int dt = 0; dt < phase.periods; ++dt) budget[t0 + dt] = limit * I;
    } else {
      for (int dt = 0; dt < phase.periods; ++dt) {
        budget[t0 + dt] =
            baseT == total_periods ? base.temporal_budget[t0 + dt] : base.temporal_budget[0];
      }
    }
    t0 += phase.periods;
  }
  // a phase override raises the per-DC limit for the whole horizon (the
  // limit is per DC, not per period); the temporal budget carries the
  // phase-by-phase production profile
  bool any_override = false;
  for (const PhaseDefinition& phase : config.phases) {
    if (phase.daily_capacity > 0) any_override = true;
  }
  if (any_override) out.dc_capacity_limit = std::move(dc_limit);
  out.temporal_budget = std::move(budget);

  // nominal spread: uniform sampling half-width f gives sd = f*mu/sqrt(3)
  Grid sd(J, total_periods);
  for (int j = 0; j < J; ++j) {
    for (int t = 0; t < total_periods; ++t) {
      sd(j, t) = config.half_width_factor * mean(j, t) / std::sqrt(3.0);
    }
  }
  MomentEstimate moments = MomentEstimate::from_mean_sd(mean, sd);

  if (config.penalty_override) {
    out.penalty_unit_cost = penalty_schedule(config.penalty_case, moments.mean,
                                             config.elder_population, J, total_periods);
  }

  require_valid(validate_instance(out), context);
  return {std::move(out), std::move(moments)};
}

namespace {

template <typename Fn>
auto stage(const char* label, Fn&& fn) {
  try {
    return fn();
  } catch (const SolverLimit& e) {
    throw SolverLimit(std::string(label) + ": " + e.what());
  } catch (const InputError& e) {
    throw InputError(std::string(label) + ": " + e.what());
  }
}

ScenarioSet draw(const ExperimentConfig& config, const MomentEstimate& moments, int count,
                 uint64_t seed) {
  if (config.distribution == SampleDistribution::Uniform) {
    return sample_uniform_scenarios(moments, config.half_width_factor, count, seed);
  }
  return sample_normal_scenarios(moments, count, seed);
}

ExperimentInputs prepare_from_base(const ExperimentConfig& config, const Instance& base) {
  ExperimentInputs in;
  stage("phase build", [&] {
    auto built = build_phase_instance(config, base);
    in.instance = std::move(built.first);
    in.moments = std::move(built.second);
    std::vector<std::string> preopened;
    for (const DcSite& site : in.instance.dc_sites) {
      if (site.status == DcStatus::Preopened) preopened.push_back(site.id);
    }
    in.instance = apply_dc_policy(in.instance, config.dc_policy, preopened);
    in.instance = apply_scarcity(in.instance, config.scarcity_factor);
    return 0;
  });
  stage("sample", [&] {
    in.in_sample = draw(config, in.moments, config.in_sample_count, config.in_sample_seed);
    in.out_sample = draw(config, in.moments, config.out_sample_count, config.out_sample_seed);
    return 0;
  });
  stage("ambiguity", [&] {
    ScenarioSet support = in.in_sample;
    if (config.dro_support_count > 0 &&
        config.dro_support_count < static_cast<int>(support.demand.size())) {
      support.demand.resize(config.dro_support_count);
      support.probabilities.assign(config.dro_support_count,
                                   1.0 / config.dro_support_count);
    }
    in.ambiguity = build_ambiguity_bounds(in.moments, config.mean_slack_factor,
                                          config.second_moment_lo, config.second_moment_hi,
                                          support);
    return 0;
  });
  return in;
}

ApproachResult solve_one(const ExperimentInputs& in, const std::string& approach) {
  auto run = [&](const ModelIR& model, const auto& layout) {
    MilpSolution sol = solve_milp(model);
    if (sol.status == MilpStatus::NodeLimit || sol.status == MilpStatus::GapLimit) {
      throw SolverLimit(approach + ": branch and bound stopped before proving optimality");
    }
    if (sol.status != MilpStatus::Optimal) {
      throw std::logic_error(approach + ": model unexpectedly " +
                             std::string(to_string(sol.status)));
    }
    ApproachResult row;
    row.approach = approach;
    row.objective = sol.objective;
    row.plan = extract_first_stage(layout, sol.x);
    return row;
  };
  if (approach == "dt") {
    BuiltSmip built = build_deterministic(in.instance, empirical_moments(in.in_sample));
    return run(built.model, built.layout);
  }
  if (approach == "sp") {
    BuiltSmip built = build_extensive_smip(in.instance, in.in_sample);
    return run(built.model, built.layout);
  }
  BuiltDro built = build_dro_milp(in.instance, in.ambiguity);
  return run(built.model, built.layout);
}

std::string summarize(const std::vector<ApproachResult>& rows) {
  std::string out;
  for (const ApproachResult& row : rows) {
    out += row.approach;
    out += ": total " + format_currency_compact(row.evaluation.total);
    out += ", operating " + format_currency_compact(row.evaluation.operating);
    out += ", capacity " + format_currency_compact(row.evaluation.capacity);
    out += ", penalty " + format_currency_compact(row.evaluation.penalty);
    char buf[64];
    std::snprintf(buf, sizeof(buf), ", unmet mean %.2f", row.evaluation.unmet_mean);
    out += buf;
    if (row.pct_over_best > 0) {
      std::snprintf(buf, sizeof(buf), " (+%.2f%% over best)", row.pct_over_best);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

ExperimentArtifacts finish(ExperimentInputs inputs, std::vector<ApproachResult> rows) {
  ExperimentArtifacts art;
  art.inputs = std::move(inputs);
  art.results = std::move(rows);
  art.breakdown = stage("emit", [&] { return breakdown_csv(art.results); });
  art.summary = summarize(art.results);
  return art;
}

}  // namespace

ExperimentInputs prepare_experiment(const ExperimentConfig& config) {
  Instance base = stage("load", [&] { return load_instance(config.instance_path); });
  return prepare_from_base(config, base);
}

ExperimentInputs prepare_experiment(const ExperimentConfig& config, const Instance& base) {
  return prepare_from_base(config, base);
}

ApproachResult solve_approach(const ExperimentInputs& inputs, const std::string& approach) {
  if (approach != "dt" && approach != "sp" && approach != "dro") {
    throw InputError("solve_approach: expected dt, sp, or dro, got '" + approach + "'");
  }
  return solve_one(inputs, approach);
}

namespace {

ExperimentArtifacts run_prepared(const ExperimentConfig& config, ExperimentInputs in) {
  ApproachResult row = stage("solve", [&] { return solve_one(in, config.approach); });
  stage("evaluate", [&] {
    row.evaluation = out_of_sample_evaluate(in.instance, row.plan.open, row.plan.capacity,
                                            in.out_sample);
    return 0;
  });
  std::vector<ApproachResult> rows;
  rows.push_back(std::move(row));
  return finish(std::move(in), std::move(rows));
}

ExperimentArtifacts compare_prepared(ExperimentInputs in) {
  std::vector<ApproachResult> rows = stage("solve", [&] {
    return compare_approaches(in.instance, in.in_sample, in.out_sample, in.ambiguity);
  });
  return finish(std::move(in), std::move(rows));
}

}  // namespace

ExperimentArtifacts run_experiment(const ExperimentConfig& config) {
  return run_prepared(config, prepare_experiment(config));
}

ExperimentArtifacts run_experiment(const ExperimentConfig& config, const Instance& base) {
  return run_prepared(config, prepare_experiment(config, base));
}

ExperimentArtifacts compare_experiment(const ExperimentConfig& config) {
  return compare_prepared(prepare_experiment(config));
}

ExperimentArtifacts compare_experiment(const ExperimentConfig& config, const Instance& base) {
  return compare_prepared(prepare_experiment(config, base));
}

std::string format_currency_compact(double v) {
  char buf[64];
  double a = std::fabs(v);
  if (a >= 1e9) {
    std::snprintf(buf, sizeof(buf), "$%.2fB", v / 1e9);
  } else if (a >= 1e6) {
    std::snprintf(buf, sizeof(buf), "$%.2fM", v / 1e6);
  } else if (a >= 1e3) {
    std::snprintf(buf, sizeof(buf), "$%.2fK", v / 1e3);
  } else {
    std::snprintf(buf, sizeof(buf), "$%.2f", v);
  }
  return buf;
}

}  // namespace resplan
