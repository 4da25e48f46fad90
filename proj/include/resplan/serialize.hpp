#pragma once
// Strict JSON (de)serialization for instances, scenario sets, plans, and
// evaluation results, plus the fixed-column CSV cost/unmet report.
//
// Loads run in strict mode: unknown fields, wrong types, and shape mismatches
// are rejected with the offending field path (e.g. "shipping_unit_cost[2][0]").
// Demand and cost matrices are nested arrays in site-major, period-minor
// order. Numbers are emitted as shortest round-trip decimal text, so equal
// data produces byte-identical files.

#include <string>
#include <vector>

#include "resplan/evaluation.hpp"
#include "resplan/formulations.hpp"
#include "resplan/instance.hpp"

namespace resplan {

// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double v);

std::string to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

std::string to_json(const ScenarioSet& scenarios);
ScenarioSet scenarios_from_json(const std::string& text);

std::string to_json(const FirstStagePlan& plan);
FirstStagePlan plan_from_json(const std::string& text);

// Result bundle: cost breakdown, unmet statistics, per-scenario columns.
std::string to_json(const PlanEvaluation& evaluation);

// File wrappers; read failures and schema violations throw InputError with
// the path (and field path) in the message.
Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);
ScenarioSet load_scenarios(const std::string& path);
void save_scenarios(const ScenarioSet& scenarios, const std::string& path);
FirstStagePlan load_plan(const std::string& path);
void save_plan(const FirstStagePlan& plan, const std::string& path);
void save_results(const PlanEvaluation& evaluation, const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// One row per approach, columns exactly:
// approach,operating,capacity,shipping,inventory,penalty,total,
// unmet_mean,unmet_std,unmet_p75,unmet_p80,unmet_p85,unmet_p90,unmet_p95
std::string breakdown_csv(const std::vector<ApproachResult>& rows);

}  // namespace resplan
