// Command-line front end: validate instances, sample scenario sets, solve a
// single approach, evaluate a saved plan out of sample, compare all three
// approaches, and export models in LP format.
//
// Exit codes: 0 success, 1 input error, 2 solver limit.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "resplan/errors.hpp"
#include "resplan/experiment.hpp"
#include "resplan/formulations.hpp"
#include "resplan/serialize.hpp"

#include "../vendor/CLI11.hpp"

namespace {

using namespace resplan;

struct Overrides {
  std::optional<int> in_count, out_count, support_count;
  std::optional<uint64_t> in_seed, out_seed;
  std::optional<double> scarcity, mean_slack, sec_lo, sec_hi;
  std::optional<std::string> dc_policy, penalty_case, approach;
};

void add_override_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--in-count", ov.in_count, "In-sample scenario count");
  cmd->add_option("--in-seed", ov.in_seed, "In-sample sampling seed");
  cmd->add_option("--out-count", ov.out_count, "Out-of-sample scenario count");
  cmd->add_option("--out-seed", ov.out_seed, "Out-of-sample sampling seed");
  cmd->add_option("--scarcity", ov.scarcity, "Temporal budget factor in (0, 1]");
  cmd->add_option("--dc-policy", ov.dc_policy,
                  "DC policy: default, best_case, or most_restrictive");
  cmd->add_option("--penalty-case", ov.penalty_case,
                  "Penalty case: constant, median_based, or elder_based");
  cmd->add_option("--mean-slack", ov.mean_slack, "Ambiguity mean slack factor");
  cmd->add_option("--second-moment-lo", ov.sec_lo, "Ambiguity second-moment lower factor");
  cmd->add_option("--second-moment-hi", ov.sec_hi, "Ambiguity second-moment upper factor");
  cmd->add_option("--support-count", ov.support_count,
                  "DRO support size (leading in-sample scenarios)");
}

ExperimentConfig load_with_overrides(const std::string& config_path, const Overrides& ov) {
  ExperimentConfig config = load_config(config_path);
  // a relative instance path is resolved against the config file's directory
  std::filesystem::path inst(config.instance_path);
  if (inst.is_relative()) {
    config.instance_path =
        (std::filesystem::path(config_path).parent_path() / inst).string();
  }
  if (ov.in_count) config.in_sample_count = *ov.in_count;
  if (ov.in_seed) config.in_sample_seed = *ov.in_seed;
  if (ov.out_count) config.out_sample_count = *ov.out_count;
  if (ov.out_seed) config.out_sample_seed = *ov.out_seed;
  if (ov.scarcity) config.scarcity_factor = *ov.scarcity;
  if (ov.dc_policy) config.dc_policy = dc_policy_from_string(*ov.dc_policy);
  if (ov.penalty_case) {
    config.penalty_case = penalty_case_from_string(*ov.penalty_case);
    config.penalty_override = true;
  }
  if (ov.mean_slack) config.mean_slack_factor = *ov.mean_slack;
  if (ov.sec_lo) config.second_moment_lo = *ov.sec_lo;
  if (ov.sec_hi) config.second_moment_hi = *ov.sec_hi;
  if (ov.support_count) config.dro_support_count = *ov.support_count;
  if (ov.approach) config.approach = *ov.approach;
  if (config.in_sample_count < 1 || config.out_sample_count < 1) {
    throw InputError("scenario counts must be at least 1");
  }
  return config;
}

int run(int argc, char** argv) {
  CLI::App app{"Pandemic resource planning: build, solve, and evaluate "
               "facility-location and distribution plans"};
  app.require_subcommand(1);

  std::string instance_path, config_path, out_path, plan_path, results_path, csv_path;
  std::string which = "in";
  Overrides ov;

  CLI::App* validate = app.add_subcommand("validate", "Check an instance file");
  validate->add_option("instance", instance_path, "Instance JSON path")->required();

  CLI::App* sample = app.add_subcommand("sample", "Draw a scenario set from the config");
  sample->add_option("--config", config_path, "Experiment config path")->required();
  sample->add_option("--which", which, "Which set: in or out")
      ->check(CLI::IsMember({"in", "out"}));
  sample->add_option("--out", out_path, "Output scenario JSON path")->required();
  add_override_flags(sample, ov);

  CLI::App* solve = app.add_subcommand("solve", "Solve one approach and save its plan");
  solve->add_option("--config", config_path, "Experiment config path")->required();
  solve->add_option("--approach", ov.approach, "dt, sp, or dro")
      ->check(CLI::IsMember({"dt", "sp", "dro"}));
  solve->add_option("--plan", plan_path, "Output plan JSON path");
  add_override_flags(solve, ov);

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a saved plan out of sample");
  evaluate->add_option("--config", config_path, "Experiment config path")->required();
  evaluate->add_option("--plan", plan_path, "Plan JSON path")->required();
  evaluate->add_option("--results", results_path, "Output results JSON path");
  evaluate->add_option("--csv", csv_path, "Output one-row breakdown CSV path");
  add_override_flags(evaluate, ov);

  CLI::App* compare = app.add_subcommand("compare", "Solve dt, sp, and dro and compare");
  compare->add_option("--config", config_path, "Experiment config path")->required();
  compare->add_option("--csv", csv_path, "Output breakdown CSV path");
  add_override_flags(compare, ov);

  CLI::App* export_lp = app.add_subcommand("export-lp", "Write the model in LP format");
  export_lp->add_option("--config", config_path, "Experiment config path")->required();
  export_lp->add_option("--approach", ov.approach, "dt, sp, or dro")
      ->check(CLI::IsMember({"dt", "sp", "dro"}));
  export_lp->add_option("--out", out_path, "Output LP file path")->required();
  add_override_flags(export_lp, ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (validate->parsed()) {
    Instance inst = load_instance(instance_path);
    std::printf("ok: %d DCs, %d demand sites, %d periods\n", inst.num_dcs(),
                inst.num_sites(), inst.periods);
    return 0;
  }

  if (sample->parsed()) {
    ExperimentConfig config = load_with_overrides(config_path, ov);
    ExperimentInputs in = prepare_experiment(config);
    save_scenarios(which == "in" ? in.in_sample : in.out_sample, out_path);
    std::printf("wrote %s scenario set (%d scenarios) to %s\n",
                which == "in" ? "in-sample" : "out-of-sample",
                which == "in" ? config.in_sample_count : config.out_sample_count,
                out_path.c_str());
    return 0;
  }

  if (solve->parsed()) {
    ExperimentConfig config = load_with_overrides(config_path, ov);
    ExperimentInputs in = prepare_experiment(config);
    ApproachResult row = solve_approach(in, config.approach);
    std::printf("%s objective: %s\n", row.approach.c_str(),
                format_number(row.objective).c_str());
    int open_count = 0;
    for (int v : row.plan.open) open_count += v;
    std::printf("open DCs: %d of %d\n", open_count, in.instance.num_dcs());
    if (!plan_path.empty()) {
      save_plan(row.plan, plan_path);
      std::printf("plan written to %s\n", plan_path.c_str());
    }
    return 0;
  }

  if (evaluate->parsed()) {
    ExperimentConfig config = load_with_overrides(config_path, ov);
    ExperimentInputs in = prepare_experiment(config);
    FirstStagePlan plan = load_plan(plan_path);
    ApproachResult row;
    row.approach = config.approach;
    row.plan = plan;
    row.evaluation =
        out_of_sample_evaluate(in.instance, plan.open, plan.capacity, in.out_sample);
    std::printf("total %s, unmet mean %.4f\n",
                format_currency_compact(row.evaluation.total).c_str(),
                row.evaluation.unmet_mean);
    if (!results_path.empty()) save_results(row.evaluation, results_path);
    if (!csv_path.empty()) write_text_file(csv_path, breakdown_csv({row}));
    return 0;
  }

  if (compare->parsed()) {
    ExperimentConfig config = load_with_overrides(config_path, ov);
    ExperimentArtifacts art = compare_experiment(config);
    std::fputs(art.summary.c_str(), stdout);
    if (!csv_path.empty()) {
      write_text_file(csv_path, art.breakdown);
      std::printf("breakdown written to %s\n", csv_path.c_str());
    }
    return 0;
  }

  // export-lp
  ExperimentConfig config = load_with_overrides(config_path, ov);
  ExperimentInputs in = prepare_experiment(config);
  std::string lp;
  if (config.approach == "dt") {
    lp = build_deterministic(in.instance, empirical_moments(in.in_sample)).model.to_lp_format();
  } else if (config.approach == "sp") {
    lp = build_extensive_smip(in.instance, in.in_sample).model.to_lp_format();
  } else {
    lp = build_dro_milp(in.instance, in.ambiguity).model.to_lp_format();
  }
  write_text_file(out_path, lp);
  std::printf("%s model written to %s\n", config.approach.c_str(), out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const SolverLimit& e) {
    std::cerr << "solver limit: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
