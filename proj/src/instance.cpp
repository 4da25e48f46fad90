#include "resplan/instance.hpp"

#include <cmath>
#include <sstream>

#include "resplan/errors.hpp"

namespace resplan {

const char* to_string(DcStatus s) {
  switch (s) {
    case DcStatus::Preopened: return "preopened";
    case DcStatus::Candidate: return "candidate";
    case DcStatus::Forbidden: return "forbidden";
  }
  return "?";
}

std::optional<DcStatus> dc_status_from_string(const std::string& s) {
  if (s == "preopened") return DcStatus::Preopened;
  if (s == "candidate") return DcStatus::Candidate;
  if (s == "forbidden") return DcStatus::Forbidden;
  return std::nullopt;
}

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << issue.field << ": " << issue.message << "\n";
  }
  return out.str();
}

namespace {

class Checker {
 public:
  explicit Checker(ValidationReport& report) : report_(report) {}

  void issue(const std::string& field, const std::string& message) {
    report_.issues.push_back({field, message});
  }

  void dims(const std::string& field, std::size_t got, std::size_t want) {
    if (got != want) {
      issue(field, "expected length " + std::to_string(want) + ", got " + std::to_string(got));
    }
  }

  void grid_dims(const std::string& field, const Grid& g, int rows, int cols) {
    if (g.rows() != rows || g.cols() != cols) {
      issue(field, "expected shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                       ", got " + std::to_string(g.rows()) + "x" + std::to_string(g.cols()));
    }
  }

  template <typename Get>
  void nonneg_vec(const std::string& field, std::size_t n, Get get) {
    for (std::size_t k = 0; k < n; ++k) {
      if (!(get(k) >= 0.0)) {
        issue(field + "[" + std::to_string(k) + "]", "must be >= 0, got " + std::to_string(get(k)));
      }
    }
  }

  void nonneg_grid(const std::string& field, const Grid& g) {
    for (int r = 0; r < g.rows(); ++r) {
      for (int c = 0; c < g.cols(); ++c) {
        if (!(g(r, c) >= 0.0)) {
          issue(field + "[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                "must be >= 0, got " + std::to_string(g(r, c)));
        }
      }
    }
  }

 private:
  ValidationReport& report_;
};

}  // namespace

ValidationReport validate_instance(const Instance& inst) {
  ValidationReport report;
  Checker ck(report);

  const int nI = inst.num_dcs();
  const int nJ = inst.num_sites();
  const int nT = inst.periods;
  if (nI == 0) ck.issue("dc_sites", "must be nonempty");
  if (nJ == 0) ck.issue("demand_sites", "must be nonempty");
  if (nT <= 0) ck.issue("periods", "must be >= 1, got " + std::to_string(nT));
  if (nI == 0 || nJ == 0 || nT <= 0) return report;

  ck.dims("operating_cost", inst.operating_cost.size(), nI);
  ck.grid_dims("capacity_unit_cost", inst.capacity_unit_cost, nI, nT);
  if (inst.shipping_unit_cost.dim0() != nI || inst.shipping_unit_cost.dim1() != nJ ||
      inst.shipping_unit_cost.dim2() != nT) {
    ck.issue("shipping_unit_cost", "expected shape " + std::to_string(nI) + "x" +
                                       std::to_string(nJ) + "x" + std::to_string(nT));
  }
  ck.grid_dims("inventory_unit_cost", inst.inventory_unit_cost, nJ, nT);
  ck.grid_dims("penalty_unit_cost", inst.penalty_unit_cost, nJ, nT);
  ck.dims("dc_capacity_limit", inst.dc_capacity_limit.size(), nI);
  ck.dims("temporal_budget", inst.temporal_budget.size(), nT);
  ck.dims("initial_inventory", inst.initial_inventory.size(), nJ);
  ck.dims("initial_backlog", inst.initial_backlog.size(), nJ);
  if (!inst.initial_dc_inventory.empty()) {
    ck.dims("initial_dc_inventory", inst.initial_dc_inventory.size(), nI);
  }
  if (inst.dc_inventory_unit_cost) {
    ck.grid_dims("dc_inventory_unit_cost", *inst.dc_inventory_unit_cost, nI, nT);
  }
  if (inst.lead_time) {
    ck.grid_dims("lead_time", *inst.lead_time, nI, nJ);
  }
  if (!report.ok()) return report;  // value checks below assume shapes line up

  ck.nonneg_vec("operating_cost", inst.operating_cost.size(),
                [&](std::size_t k) { return inst.operating_cost[k]; });
  ck.nonneg_grid("capacity_unit_cost", inst.capacity_unit_cost);
  if (!inst.capacity_cost_time_varying) {
    for (int i = 0; i < nI; ++i) {
      for (int t = 1; t < nT; ++t) {
        if (inst.capacity_unit_cost(i, t) != inst.capacity_unit_cost(i, 0)) {
          ck.issue("capacity_unit_cost[" + std::to_string(i) + "]",
                   "time-varying values require capacity_cost_time_varying");
          break;
        }
      }
    }
  }
  for (int i = 0; i < nI; ++i) {
    for (int j = 0; j < nJ; ++j) {
      for (int t = 0; t < nT; ++t) {
        if (!(inst.shipping_unit_cost(i, j, t) >= 0.0)) {
          ck.issue("shipping_unit_cost[" + std::to_string(i) + "][" + std::to_string(j) + "][" +
                       std::to_string(t) + "]",
                   "must be >= 0");
        }
      }
    }
  }
  ck.nonneg_grid("inventory_unit_cost", inst.inventory_unit_cost);
  ck.nonneg_grid("penalty_unit_cost", inst.penalty_unit_cost);
  ck.nonneg_vec("dc_capacity_limit", inst.dc_capacity_limit.size(),
                [&](std::size_t k) { return inst.dc_capacity_limit[k]; });
  ck.nonneg_vec("temporal_budget", inst.temporal_budget.size(),
                [&](std::size_t k) { return inst.temporal_budget[k]; });
  ck.nonneg_vec("initial_inventory", inst.initial_inventory.size(),
                [&](std::size_t k) { return inst.initial_inventory[k]; });
  ck.nonneg_vec("initial_backlog", inst.initial_backlog.size(),
                [&](std::size_t k) { return inst.initial_backlog[k]; });
  ck.nonneg_vec("initial_dc_inventory", inst.initial_dc_inventory.size(),
                [&](std::size_t k) { return inst.initial_dc_inventory[k]; });
  if (inst.dc_inventory_unit_cost) {
    ck.nonneg_grid("dc_inventory_unit_cost", *inst.dc_inventory_unit_cost);
  }
  if (inst.lead_time) {
    for (int i = 0; i < nI; ++i) {
      for (int j = 0; j < nJ; ++j) {
        const double L = (*inst.lead_time)(i, j);
        if (!(L >= 0.0) || L != std::floor(L)) {
          ck.issue("lead_time[" + std::to_string(i) + "][" + std::to_string(j) + "]",
                   "must be a nonnegative integer, got " + std::to_string(L));
        }
      }
    }
  }
  return report;
}

ValidationReport validate_typed_instance(const TypedInstance& inst) {
  ValidationReport report;
  Checker ck(report);

  const int nI = inst.num_dcs();
  const int nJ = inst.num_sites();
  const int nL = inst.num_types();
  const int nT = inst.periods;
  if (nI == 0) ck.issue("dc_sites", "must be nonempty");
  if (nJ == 0) ck.issue("demand_sites", "must be nonempty");
  if (nL == 0) ck.issue("resource_types", "must be nonempty");
  if (nT <= 0) ck.issue("periods", "must be >= 1, got " + std::to_string(nT));
  if (!report.ok()) return report;

  ck.grid_dims("operating_cost", inst.operating_cost, nI, nL);
  ck.grid_dims("capacity_unit_cost", inst.capacity_unit_cost, nI, nL);
  if (inst.shipping_unit_cost.dim0() != nI || inst.shipping_unit_cost.dim1() != nJ ||
      inst.shipping_unit_cost.dim2() != nT || inst.shipping_unit_cost.dim3() != nL) {
    ck.issue("shipping_unit_cost", "expected shape " + std::to_string(nI) + "x" +
                                       std::to_string(nJ) + "x" + std::to_string(nT) + "x" +
                                       std::to_string(nL));
  }
  if (inst.inventory_unit_cost.dim0() != nJ || inst.inventory_unit_cost.dim1() != nT ||
      inst.inventory_unit_cost.dim2() != nL) {
    ck.issue("inventory_unit_cost", "expected shape " + std::to_string(nJ) + "x" +
                                        std::to_string(nT) + "x" + std::to_string(nL));
  }
  if (inst.penalty_unit_cost.dim0() != nJ || inst.penalty_unit_cost.dim1() != nT ||
      inst.penalty_unit_cost.dim2() != nL) {
    ck.issue("penalty_unit_cost", "expected shape " + std::to_string(nJ) + "x" +
                                      std::to_string(nT) + "x" + std::to_string(nL));
  }
  ck.grid_dims("dc_capacity_limit", inst.dc_capacity_limit, nI, nL);
  ck.dims("temporal_budget", inst.temporal_budget.size(), nT);
  ck.dims("initial_inventory", inst.initial_inventory.size(), nJ);
  ck.dims("initial_backlog", inst.initial_backlog.size(), nJ);
  if (!report.ok()) return report;

  ck.nonneg_grid("operating_cost", inst.operating_cost);
  ck.nonneg_grid("capacity_unit_cost", inst.capacity_unit_cost);
  for (std::size_t k = 0; k < inst.shipping_unit_cost.data().size(); ++k) {
    if (!(inst.shipping_unit_cost.data()[k] >= 0.0)) {
      ck.issue("shipping_unit_cost", "entry " + std::to_string(k) + " must be >= 0");
    }
  }
  for (std::size_t k = 0; k < inst.inventory_unit_cost.data().size(); ++k) {
    if (!(inst.inventory_unit_cost.data()[k] >= 0.0)) {
      ck.issue("inventory_unit_cost", "entry " + std::to_string(k) + " must be >= 0");
    }
  }
  for (std::size_t k = 0; k < inst.penalty_unit_cost.data().size(); ++k) {
    if (!(inst.penalty_unit_cost.data()[k] >= 0.0)) {
      ck.issue("penalty_unit_cost", "entry " + std::to_string(k) + " must be >= 0");
    }
  }
  ck.nonneg_grid("dc_capacity_limit", inst.dc_capacity_limit);
  ck.nonneg_vec("temporal_budget", inst.temporal_budget.size(),
                [&](std::size_t k) { return inst.temporal_budget[k]; });
  ck.nonneg_vec("initial_inventory", inst.initial_inventory.size(),
                [&](std::size_t k) { return inst.initial_inventory[k]; });
  ck.nonneg_vec("initial_backlog", inst.initial_backlog.size(),
                [&](std::size_t k) { return inst.initial_backlog[k]; });
  return report;
}

ValidationReport validate_scenarios(const Instance& inst, const ScenarioSet& scen) {
  ValidationReport report;
  Checker ck(report);

  if (scen.count() == 0) {
    ck.issue("demand", "at least one scenario required");
    return report;
  }
  ck.dims("probabilities", scen.probabilities.size(), scen.demand.size());
  double mass = 0.0;
  for (std::size_t w = 0; w < scen.probabilities.size(); ++w) {
    if (!(scen.probabilities[w] >= 0.0)) {
      ck.issue("probabilities[" + std::to_string(w) + "]", "must be >= 0");
    }
    mass += scen.probabilities[w];
  }
  if (!scen.probabilities.empty() && std::abs(mass - 1.0) > 1e-9) {
    ck.issue("probabilities", "must sum to 1 within 1e-9, got " + std::to_string(mass));
  }
  for (int w = 0; w < scen.count(); ++w) {
    const Grid& d = scen.demand[w];
    if (d.rows() != inst.num_sites() || d.cols() != inst.periods) {
      ck.issue("demand[" + std::to_string(w) + "]",
               "expected shape " + std::to_string(inst.num_sites()) + "x" +
                   std::to_string(inst.periods) + ", got " + std::to_string(d.rows()) + "x" +
                   std::to_string(d.cols()));
      continue;
    }
    for (int j = 0; j < d.rows(); ++j) {
      for (int t = 0; t < d.cols(); ++t) {
        if (!(d(j, t) >= 0.0)) {
          ck.issue("demand[" + std::to_string(w) + "][" + std::to_string(j) + "][" +
                       std::to_string(t) + "]",
                   "must be >= 0, got " + std::to_string(d(j, t)));
        }
      }
    }
  }
  return report;
}

void require_valid(const ValidationReport& report, const std::string& context) {
  if (!report.ok()) {
    throw InputError(context + ":\n" + report.to_string());
  }
}

}  // namespace resplan
