#include "resplan/serialize.hpp"

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <system_error>

#include "resplan/errors.hpp"

#include "../vendor/json.hpp"

namespace resplan {

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

std::string str_at(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

const json& array_at(const json& v, const std::string& path, int size = -1) {
  if (!v.is_array()) fail(path, "expected an array");
  if (size >= 0 && static_cast<int>(v.size()) != size) {
    fail(path, "expected " + std::to_string(size) + " entries, found " +
                   std::to_string(v.size()));
  }
  return v;
}

std::vector<double> vec_at(const json& v, const std::string& path, int size = -1) {
  array_at(v, path, size);
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(num_at(v[k], path + "[" + std::to_string(k) + "]"));
  }
  return out;
}

Grid grid_at(const json& v, const std::string& path, int rows, int cols) {
  array_at(v, path, rows);
  Grid g(rows, cols);
  for (int r = 0; r < rows; ++r) {
    std::string row_path = path + "[" + std::to_string(r) + "]";
    std::vector<double> row = vec_at(v[r], row_path, cols);
    for (int c = 0; c < cols; ++c) g(r, c) = row[c];
  }
  return g;
}

json grid_to_json(const Grid& g) {
  json rows = json::array();
  for (int r = 0; r < g.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < g.cols(); ++c) row.push_back(g(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Cube cube_at(const json& v, const std::string& path, int d0, int d1, int d2) {
  array_at(v, path, d0);
  Cube c(d0, d1, d2);
  for (int a = 0; a < d0; ++a) {
    const std::string pa = path + "[" + std::to_string(a) + "]";
    array_at(v[a], pa, d1);
    for (int b = 0; b < d1; ++b) {
      const std::string pb = pa + "[" + std::to_string(b) + "]";
      std::vector<double> inner = vec_at(v[a][b], pb, d2);
      for (int k = 0; k < d2; ++k) c(a, b, k) = inner[k];
    }
  }
  return c;
}

json cube_to_json(const Cube& c) {
  json out = json::array();
  for (int a = 0; a < c.dim0(); ++a) {
    json mid = json::array();
    for (int b = 0; b < c.dim1(); ++b) {
      json inner = json::array();
      for (int k = 0; k < c.dim2(); ++k) inner.push_back(c(a, b, k));
      mid.push_back(std::move(inner));
    }
    out.push_back(std::move(mid));
  }
  return out;
}

json parse_document(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_json(const Instance& instance) {
  json doc;
  doc["name"] = instance.name;
  doc["periods"] = instance.periods;
  json dcs = json::array();
  for (const DcSite& site : instance.dc_sites) {
    json s;
    s["id"] = site.id;
    s["status"] = to_string(site.status);
    if (site.coords) s["coords"] = {site.coords->first, site.coords->second};
    dcs.push_back(std::move(s));
  }
  doc["dc_sites"] = std::move(dcs);
  doc["demand_sites"] = instance.demand_sites;
  doc["operating_cost"] = instance.operating_cost;
  doc["capacity_unit_cost"] = grid_to_json(instance.capacity_unit_cost);
  doc["capacity_cost_time_varying"] = instance.capacity_cost_time_varying;
  doc["shipping_unit_cost"] = cube_to_json(instance.shipping_unit_cost);
  doc["inventory_unit_cost"] = grid_to_json(instance.inventory_unit_cost);
  doc["penalty_unit_cost"] = grid_to_json(instance.penalty_unit_cost);
  doc["dc_capacity_limit"] = instance.dc_capacity_limit;
  doc["temporal_budget"] = instance.temporal_budget;
  doc["initial_inventory"] = instance.initial_inventory;
  doc["initial_backlog"] = instance.initial_backlog;
  if (instance.dc_inventory_unit_cost) {
    doc["dc_inventory_unit_cost"] = grid_to_json(*instance.dc_inventory_unit_cost);
  }
  if (!instance.initial_dc_inventory.empty()) {
    doc["initial_dc_inventory"] = instance.initial_dc_inventory;
  }
  if (instance.lead_time) doc["lead_time"] = grid_to_json(*instance.lead_time);
  return doc.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
  const std::string root = "instance";
  json doc = parse_document(text, "instance");
  if (!doc.is_object()) fail(root, "expected an object");
  check_keys(doc, root,
             {"name", "periods", "dc_sites", "demand_sites", "operating_cost",
              "capacity_unit_cost", "capacity_cost_time_varying", "shipping_unit_cost",
              "inventory_unit_cost", "penalty_unit_cost", "dc_capacity_limit",
              "temporal_budget", "initial_inventory", "initial_backlog",
              "dc_inventory_unit_cost", "initial_dc_inventory", "lead_time"});

  Instance out;
  out.name = str_at(field(doc, root, "name"), root + ".name");
  out.periods = int_at(field(doc, root, "periods"), root + ".periods");
  if (out.periods <= 0) fail(root + ".periods", "horizon must contain at least one period");

  const json& dcs = array_at(field(doc, root, "dc_sites"), root + ".dc_sites");
  for (std::size_t k = 0; k < dcs.size(); ++k) {
    const std::string pk = root + ".dc_sites[" + std::to_string(k) + "]";
    const json& s = dcs[k];
    if (!s.is_object()) fail(pk, "expected an object");
    check_keys(s, pk, {"id", "status", "coords"});
    DcSite site;
    site.id = str_at(field(s, pk, "id"), pk + ".id");
    std::string status = str_at(field(s, pk, "status"), pk + ".status");
    auto parsed = dc_status_from_string(status);
    if (!parsed) fail(pk + ".status", "unknown status '" + status + "'");
    site.status = *parsed;
    if (s.contains("coords")) {
      std::vector<double> c = vec_at(s["coords"], pk + ".coords", 2);
      site.coords = {c[0], c[1]};
    }
    out.dc_sites.push_back(std::move(site));
  }
  if (out.dc_sites.empty()) fail(root + ".dc_sites", "at least one DC site required");

  const json& sites = array_at(field(doc, root, "demand_sites"), root + ".demand_sites");
  for (std::size_t k = 0; k < sites.size(); ++k) {
    out.demand_sites.push_back(
        str_at(sites[k], root + ".demand_sites[" + std::to_string(k) + "]"));
  }
  if (out.demand_sites.empty()) fail(root + ".demand_sites", "at least one demand site required");

  const int I = out.num_dcs();
  const int J = out.num_sites();
  const int T = out.periods;
  out.operating_cost = vec_at(field(doc, root, "operating_cost"), root + ".operating_cost", I);
  out.capacity_unit_cost =
      grid_at(field(doc, root, "capacity_unit_cost"), root + ".capacity_unit_cost", I, T);
  if (doc.contains("capacity_cost_time_varying")) {
    const json& flag = doc["capacity_cost_time_varying"];
    if (!flag.is_boolean()) fail(root + ".capacity_cost_time_varying", "expected a boolean");
    out.capacity_cost_time_varying = flag.get<bool>();
  }
  out.shipping_unit_cost =
      cube_at(field(doc, root, "shipping_unit_cost"), root + ".shipping_unit_cost", I, J, T);
  out.inventory_unit_cost =
      grid_at(field(doc, root, "inventory_unit_cost"), root + ".inventory_unit_cost", J, T);
  out.penalty_unit_cost =
      grid_at(field(doc, root, "penalty_unit_cost"), root + ".penalty_unit_cost", J, T);
  out.dc_capacity_limit =
      vec_at(field(doc, root, "dc_capacity_limit"), root + ".dc_capacity_limit", I);
  out.temporal_budget =
      vec_at(field(doc, root, "temporal_budget"), root + ".temporal_budget", T);
  out.initial_inventory =
      vec_at(field(doc, root, "initial_inventory"), root + ".initial_inventory", J);
  out.initial_backlog =
      vec_at(field(doc, root, "initial_backlog"), root + ".initial_backlog", J);
  if (doc.contains("dc_inventory_unit_cost")) {
    out.dc_inventory_unit_cost =
        grid_at(doc["dc_inventory_unit_cost"], root + ".dc_inventory_unit_cost", I, T);
  }
  if (doc.contains("initial_dc_inventory")) {
    out.initial_dc_inventory =
        vec_at(doc["initial_dc_inventory"], root + ".initial_dc_inventory", I);
  }
  if (doc.contains("lead_time")) {
    out.lead_time = grid_at(doc["lead_time"], root + ".lead_time", I, J);
  }
  require_valid(validate_instance(out), "instance");
  return out;
}

std::string to_json(const ScenarioSet& scenarios) {
  json doc;
  doc["probabilities"] = scenarios.probabilities;
  json all = json::array();
  for (const Grid& d : scenarios.demand) all.push_back(grid_to_json(d));
  doc["demand"] = std::move(all);
  return doc.dump(2) + "\n";
}

ScenarioSet scenarios_from_json(const std::string& text) {
  const std::string root = "scenarios";
  json doc = parse_document(text, "scenarios");
  if (!doc.is_object()) fail(root, "expected an object");
  check_keys(doc, root, {"probabilities", "demand"});
  ScenarioSet out;
  out.probabilities = vec_at(field(doc, root, "probabilities"), root + ".probabilities");
  const json& all = array_at(field(doc, root, "demand"), root + ".demand",
                             static_cast<int>(out.probabilities.size()));
  if (all.empty()) fail(root + ".demand", "at least one scenario required");
  const std::string p0 = root + ".demand[0]";
  const json& first = array_at(all[0], p0);
  if (first.empty()) fail(p0, "at least one site row required");
  int sites = static_cast<int>(first.size());
  int periods = static_cast<int>(array_at(first[0], p0 + "[0]").size());
  for (std::size_t w = 0; w < all.size(); ++w) {
    out.demand.push_back(
        grid_at(all[w], root + ".demand[" + std::to_string(w) + "]", sites, periods));
  }
  return out;
}

std::string to_json(const FirstStagePlan& plan) {
  json doc;
  doc["open"] = plan.open;
  doc["capacity"] = grid_to_json(plan.capacity);
  return doc.dump(2) + "\n";
}

FirstStagePlan plan_from_json(const std::string& text) {
  const std::string root = "plan";
  json doc = parse_document(text, "plan");
  if (!doc.is_object()) fail(root, "expected an object");
  check_keys(doc, root, {"open", "capacity"});
  FirstStagePlan out;
  const json& open = array_at(field(doc, root, "open"), root + ".open");
  for (std::size_t k = 0; k < open.size(); ++k) {
    const std::string pk = root + ".open[" + std::to_string(k) + "]";
    int v = int_at(open[k], pk);
    if (v != 0 && v != 1) fail(pk, "open flags are 0 or 1");
    out.open.push_back(v);
  }
  if (out.open.empty()) fail(root + ".open", "at least one DC required");
  const json& cap = array_at(field(doc, root, "capacity"), root + ".capacity",
                             static_cast<int>(out.open.size()));
  const std::string c0 = root + ".capacity[0]";
  int periods = static_cast<int>(array_at(cap[0], c0).size());
  out.capacity = grid_at(cap, root + ".capacity", static_cast<int>(out.open.size()), periods);
  return out;
}

std::string to_json(const PlanEvaluation& evaluation) {
  json doc;
  doc["operating"] = evaluation.operating;
  doc["capacity"] = evaluation.capacity;
  doc["shipping"] = evaluation.shipping;
  doc["inventory"] = evaluation.inventory;
  doc["penalty"] = evaluation.penalty;
  doc["total"] = evaluation.total;
  doc["unmet_mean"] = evaluation.unmet_mean;
  doc["unmet_std"] = evaluation.unmet_std;
  json pct;
  for (int q = 0; q < 5; ++q) {
    pct["p" + std::to_string(kUnmetPercentiles[q])] = evaluation.unmet_percentile[q];
  }
  doc["unmet_percentiles"] = std::move(pct);
  doc["region_unmet_pct"] = evaluation.region_unmet_pct;
  doc["period_backlog"] = evaluation.period_backlog;
  doc["scenario_cost"] = evaluation.scenario_cost;
  doc["scenario_unmet"] = evaluation.scenario_unmet;
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write file: " + path);
  out << content;
  if (!out) throw InputError("write failed: " + path);
}

Instance load_instance(const std::string& path) {
  try {
    return instance_from_json(read_text_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_instance(const Instance& instance, const std::string& path) {
  write_text_file(path, to_json(instance));
}

ScenarioSet load_scenarios(const std::string& path) {
  try {
    return scenarios_from_json(read_text_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_scenarios(const ScenarioSet& scenarios, const std::string& path) {
  write_text_file(path, to_json(scenarios));
}

FirstStagePlan load_plan(const std::string& path) {
  try {
    return plan_from_json(read_text_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void save_plan(const FirstStagePlan& plan, const std::string& path) {
  write_text_file(path, to_json(plan));
}

void save_results(const PlanEvaluation& evaluation, const std::string& path) {
  write_text_file(path, to_json(evaluation));
}

std::string breakdown_csv(const std::vector<ApproachResult>& rows) {
  std::string out =
      "approach,operating,capacity,shipping,inventory,penalty,total,"
      "unmet_mean,unmet_std,unmet_p75,unmet_p80,unmet_p85,unmet_p90,unmet_p95\n";
  for (const ApproachResult& row : rows) {
    const PlanEvaluation& e = row.evaluation;
    out += row.approach;
    for (double v : {e.operating, e.capacity, e.shipping, e.inventory, e.penalty, e.total,
                     e.unmet_mean, e.unmet_std}) {
      out += ',';
      out += format_number(v);
    }
    for (int q = 0; q < 5; ++q) {
      out += ',';
      out += format_number(e.unmet_percentile[q]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace resplan
