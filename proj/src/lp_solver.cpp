#include "resplan/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace resplan {

namespace {

constexpr int kEtaLimit = 64;          // product-form updates between refreshes
constexpr double kEtaDropTol = 1e-13;  // entries below this are dropped from updates
constexpr double kProgressTol = 1e-12;

enum VSt : unsigned char { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFreeNb = 3 };

// Rank-one basis update: new basis column at slot `pos` is w = B^-1 a_q.
struct Eta {
  int pos = -1;
  double pivot = 0.0;
  std::vector<std::pair<int, double>> nz;  // entries of w excluding pos
};

struct Cand {
  int j = -1;
  int dir = 0;
  double score = 0.0;
};

struct RatioCand {
  double t = 0.0;
  int slot = -1;
  double target = 0.0;
  double apiv = 0.0;  // |w_slot|
};

double round_pow2(double s) {
  if (!(s > 0.0) || !std::isfinite(s)) return 1.0;
  return std::exp2(std::round(std::log2(s)));
}

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

struct LpEngine::Impl {
  LpOptions opt;
  int m = 0;      // rows
  int n = 0;      // structural columns
  int total = 0;  // n + m, logical column for row i is n + i

  // scaled structural matrix, compressed columns, rows ascending per column
  std::vector<int> col_ptr;
  std::vector<int> row_idx;
  std::vector<double> val;
  std::vector<Relation> rel;
  std::vector<double> cost;  // size total, logicals zero
  std::vector<double> lb, ub;
  std::vector<double> b;
  std::vector<double> row_scale;  // size m
  std::vector<double> col_scale;  // size n
  std::vector<int> cost_vars;     // columns with nonzero cost

  std::vector<unsigned char> vstat;  // size total
  std::vector<int> basic;            // size m, variable occupying each slot
  std::vector<double> xv;            // size total, scaled values
  // transpose() views in Eigen are non-const; solving does not mutate state
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  std::vector<Eta> etas;
  std::vector<RatioCand> rbuf;

  explicit Impl(const ModelIR& model, LpOptions options) : opt(options) {
    m = model.num_constraints();
    n = model.num_variables();
    total = n + m;
    build(model);
    cold_basis();
  }

  void build(const ModelIR& model) {
    rel.resize(m);
    b.assign(m, 0.0);
    cost.assign(total, 0.0);
    lb.assign(total, 0.0);
    ub.assign(total, 0.0);
    row_scale.assign(m, 1.0);
    col_scale.assign(n, 1.0);

    // column-wise assembly; constraints are visited in order, so row indices
    // stay ascending within each column
    std::vector<int> count(n, 0);
    for (int i = 0; i < m; ++i) {
      for (const LinTerm& t : model.constraint(i).terms) ++count[t.var];
    }
    col_ptr.assign(n + 1, 0);
    for (int j = 0; j < n; ++j) col_ptr[j + 1] = col_ptr[j] + count[j];
    row_idx.assign(col_ptr[n], 0);
    val.assign(col_ptr[n], 0.0);
    std::vector<int> fill(col_ptr.begin(), col_ptr.end() - 1);
    for (int i = 0; i < m; ++i) {
      const LinearConstraint& c = model.constraint(i);
      rel[i] = c.rel;
      b[i] = c.rhs;
      for (const LinTerm& t : c.terms) {
        int k = fill[t.var]++;
        row_idx[k] = i;
        val[k] = t.coef;
      }
    }

    if (opt.scale) equilibrate();

    for (int j = 0; j < n; ++j) {
      const Variable& v = model.variable(j);
      cost[j] = v.cost * col_scale[j];
      lb[j] = v.lb / col_scale[j];
      ub[j] = v.ub / col_scale[j];
      for (int k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
        val[k] *= row_scale[row_idx[k]] * col_scale[j];
      }
    }
    for (int i = 0; i < m; ++i) {
      b[i] *= row_scale[i];
      int j = n + i;
      switch (rel[i]) {
        case Relation::LE: lb[j] = 0.0; ub[j] = kInf; break;
        case Relation::GE: lb[j] = -kInf; ub[j] = 0.0; break;
        case Relation::EQ: lb[j] = 0.0; ub[j] = 0.0; break;
      }
    }
    cost_vars.clear();
    for (int j = 0; j < total; ++j) {
      if (cost[j] != 0.0) cost_vars.push_back(j);
    }
  }

  // Geometric-mean equilibration; power-of-two factors keep mantissas exact.
  void equilibrate() {
    std::vector<double> rs(m, 1.0), cs(n, 1.0);
    for (int pass = 0; pass < 6; ++pass) {
      std::vector<double> rmin(m, kInf), rmax(m, 0.0);
      for (int j = 0; j < n; ++j) {
        for (int k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
          double a = std::abs(val[k]) * rs[row_idx[k]] * cs[j];
          if (a == 0.0) continue;
          rmin[row_idx[k]] = std::min(rmin[row_idx[k]], a);
          rmax[row_idx[k]] = std::max(rmax[row_idx[k]], a);
        }
      }
      for (int i = 0; i < m; ++i) {
        if (rmax[i] > 0.0) rs[i] *= 1.0 / std::sqrt(rmin[i] * rmax[i]);
      }
      std::vector<double> cmin(n, kInf), cmax(n, 0.0);
      for (int j = 0; j < n; ++j) {
        for (int k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
          double a = std::abs(val[k]) * rs[row_idx[k]] * cs[j];
          if (a == 0.0) continue;
          cmin[j] = std::min(cmin[j], a);
          cmax[j] = std::max(cmax[j], a);
        }
      }
      for (int j = 0; j < n; ++j) {
        if (cmax[j] > 0.0) cs[j] *= 1.0 / std::sqrt(cmin[j] * cmax[j]);
      }
    }
    for (int i = 0; i < m; ++i) row_scale[i] = round_pow2(rs[i]);
    for (int j = 0; j < n; ++j) col_scale[j] = round_pow2(cs[j]);
  }

  double nb_value(int j) const {
    switch (vstat[j]) {
      case kAtLower: return lb[j];
      case kAtUpper: return ub[j];
      default: return 0.0;
    }
  }

  void cold_basis() {
    vstat.assign(total, kAtLower);
    for (int j = 0; j < n; ++j) {
      if (lb[j] > -kInf) vstat[j] = kAtLower;
      else if (ub[j] < kInf) vstat[j] = kAtUpper;
      else vstat[j] = kFreeNb;
    }
    basic.resize(m);
    for (int i = 0; i < m; ++i) {
      basic[i] = n + i;
      vstat[n + i] = kBasic;
    }
    etas.clear();
  }

  // Rebuilds the LU factors of the basis matrix; falls back to the all-logical
  // basis if the current one is numerically singular.
  void factorize() {
    etas.clear();
    if (m == 0) return;
    for (int attempt = 0; attempt < 2; ++attempt) {
      std::vector<Eigen::Triplet<double>> trips;
      trips.reserve(static_cast<size_t>(m) * 4);
      for (int s = 0; s < m; ++s) {
        int v = basic[s];
        if (v >= n) {
          trips.emplace_back(v - n, s, 1.0);
        } else {
          for (int k = col_ptr[v]; k < col_ptr[v + 1]; ++k) {
            trips.emplace_back(row_idx[k], s, val[k]);
          }
        }
      }
      Eigen::SparseMatrix<double> B(m, m);
      B.setFromTriplets(trips.begin(), trips.end());
      B.makeCompressed();
      lu.compute(B);
      if (lu.info() == Eigen::Success) return;
      cold_basis();
    }
    throw std::logic_error("lp_solver: basis factorization failed");
  }

  void ftran(Eigen::VectorXd& v) const {
    if (m == 0) return;
    Eigen::VectorXd t = lu.solve(v);
    v.swap(t);
    for (const Eta& e : etas) {
      double piv = v[e.pos] / e.pivot;
      if (piv != 0.0) {
        for (const auto& [i, w] : e.nz) v[i] -= w * piv;
      }
      v[e.pos] = piv;
    }
  }

  void btran(Eigen::VectorXd& c) const {
    if (m == 0) return;
    for (auto it = etas.rbegin(); it != etas.rend(); ++it) {
      double acc = c[it->pos];
      for (const auto& [i, w] : it->nz) acc -= w * c[i];
      c[it->pos] = acc / it->pivot;
    }
    Eigen::VectorXd t = lu.transpose().solve(c);
    c.swap(t);
  }

  // Recomputes basic values from the factorization; call right after
  // factorize() while no updates are pending.
  void recompute_values() {
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i) r[i] = b[i];
    for (int j = 0; j < total; ++j) {
      if (vstat[j] == kBasic) continue;
      double x = nb_value(j);
      xv[j] = x;
      if (x == 0.0) continue;
      if (j >= n) {
        r[j - n] -= x;
      } else {
        for (int k = col_ptr[j]; k < col_ptr[j + 1]; ++k) r[row_idx[k]] -= val[k] * x;
      }
    }
    ftran(r);
    for (int s = 0; s < m; ++s) xv[basic[s]] = r[s];
  }

  void refresh() {
    factorize();
    recompute_values();
  }

  double ftol(double bound) const { return opt.feas_tol * (1.0 + std::abs(bound)); }

  // -1 below lower bound, +1 above upper bound, 0 within bounds
  int viol_dir(int v) const {
    double x = xv[v];
    if (lb[v] > -kInf && x < lb[v] - ftol(lb[v])) return -1;
    if (ub[v] < kInf && x > ub[v] + ftol(ub[v])) return +1;
    return 0;
  }

  double infeasibility_sum() const {
    double s = 0.0;
    for (int slot = 0; slot < m; ++slot) {
      int v = basic[slot];
      if (lb[v] > -kInf) s += std::max(0.0, lb[v] - xv[v]);
      if (ub[v] < kInf) s += std::max(0.0, xv[v] - ub[v]);
    }
    return s;
  }

  double phase_objective(int phase) const {
    if (phase == 1) return infeasibility_sum();
    double s = 0.0;
    for (int j : cost_vars) s += cost[j] * xv[j];
    return s;
  }

  double dot_col(int j, const Eigen::VectorXd& y) const {
    if (j >= n) return y[j - n];
    double s = 0.0;
    for (int k = col_ptr[j]; k < col_ptr[j + 1]; ++k) s += val[k] * y[row_idx[k]];
    return s;
  }

  void scatter_col(int j, Eigen::VectorXd& v) const {
    v.setZero();
    if (j >= n) {
      v[j - n] = 1.0;
      return;
    }
    for (int k = col_ptr[j]; k < col_ptr[j + 1]; ++k) v[row_idx[k]] = val[k];
  }

  Cand price(const Eigen::VectorXd& y, int phase, bool bland) const {
    Cand best;
    for (int j = 0; j < total; ++j) {
      unsigned char st = vstat[j];
      if (st == kBasic) continue;
      if (lb[j] == ub[j]) continue;  // fixed columns never enter
      double cj = phase == 2 ? cost[j] : 0.0;
      double rc = cj - dot_col(j, y);
      double tol = opt.opt_tol * (1.0 + std::abs(cj));
      int dir = 0;
      if (st == kAtLower) {
        if (rc < -tol) dir = +1;
      } else if (st == kAtUpper) {
        if (rc > tol) dir = -1;
      } else {  // free at zero
        if (rc < -tol) dir = +1;
        else if (rc > tol) dir = -1;
      }
      if (dir == 0) continue;
      if (bland) return {j, dir, std::abs(rc)};  // lowest eligible index
      if (std::abs(rc) > best.score) best = {j, dir, std::abs(rc)};
    }
    return best;
  }

  // Returns the step length and blocking slot; slot -2 encodes a bound flip of
  // the entering variable, slot -1 an unblocked (unbounded) direction.
  RatioCand ratio_test(int q, int dir, const Eigen::VectorXd& w, bool bland) {
    rbuf.clear();
    double tmin = kInf;
    for (int slot = 0; slot < m; ++slot) {
      double wi = w[slot];
      if (std::abs(wi) <= opt.pivot_tol) continue;
      int v = basic[slot];
      double delta = -dir * wi;  // value change of this basic per unit step
      int vd = viol_dir(v);
      double t, target;
      if (delta > 0.0) {
        if (vd == +1) continue;  // moving away from a violated upper bound
        target = vd == -1 ? lb[v] : ub[v];
        if (target >= kInf) continue;
        t = std::max(0.0, (target - xv[v]) / delta);
      } else {
        if (vd == -1) continue;
        target = vd == +1 ? ub[v] : lb[v];
        if (target <= -kInf) continue;
        t = std::max(0.0, (xv[v] - target) / -delta);
      }
      rbuf.push_back({t, slot, target, std::abs(wi)});
      tmin = std::min(tmin, t);
    }

    double span = (lb[q] > -kInf && ub[q] < kInf) ? ub[q] - lb[q] : kInf;
    if (rbuf.empty()) {
      if (span == kInf) return {0.0, -1, 0.0, 0.0};
      return {span, -2, 0.0, 0.0};
    }
    double band = bland ? 1e-11 : 1e-9 * (1.0 + tmin);
    RatioCand chosen;
    chosen.slot = -1;
    for (const RatioCand& c : rbuf) {
      if (c.t > tmin + band) continue;
      if (chosen.slot < 0) {
        chosen = c;
      } else if (bland) {
        if (basic[c.slot] < basic[chosen.slot]) chosen = c;
      } else if (c.apiv > chosen.apiv ||
                 (c.apiv == chosen.apiv && basic[c.slot] < basic[chosen.slot])) {
        chosen = c;
      }
    }
    if (span <= chosen.t) return {span, -2, 0.0, 0.0};
    return chosen;
  }

  void apply_step(int q, int dir, double t, const Eigen::VectorXd& w) {
    if (t != 0.0) {
      for (int slot = 0; slot < m; ++slot) {
        double wi = w[slot];
        if (wi != 0.0) xv[basic[slot]] -= dir * t * wi;
      }
      xv[q] += dir * t;
    }
  }

  void apply_flip(int q, int dir, double span, const Eigen::VectorXd& w) {
    apply_step(q, dir, span, w);
    vstat[q] = dir > 0 ? kAtUpper : kAtLower;
    xv[q] = dir > 0 ? ub[q] : lb[q];
  }

  void apply_pivot(int q, int dir, const RatioCand& rc, const Eigen::VectorXd& w) {
    apply_step(q, dir, rc.t, w);
    int leave = basic[rc.slot];
    xv[leave] = rc.target;  // snap exactly onto the blocking bound
    vstat[leave] = (rc.target == ub[leave] && lb[leave] != ub[leave]) ? kAtUpper : kAtLower;
    vstat[q] = kBasic;
    basic[rc.slot] = q;
    Eta e;
    e.pos = rc.slot;
    e.pivot = w[rc.slot];
    for (int i = 0; i < m; ++i) {
      if (i != rc.slot && std::abs(w[i]) > kEtaDropTol) e.nz.emplace_back(i, w[i]);
    }
    etas.push_back(std::move(e));
  }

  LpSolution run(bool warm) {
    if (!warm || static_cast<int>(basic.size()) != m ||
        static_cast<int>(vstat.size()) != total) {
      cold_basis();
    }
    xv.assign(total, 0.0);
    refresh();

    LpSolution sol;
    long cap = std::max<long>(1000, static_cast<long>(opt.iteration_factor * (m + n)));
    long it = 0;
    int phase = infeasibility_sum() > 0.0 ? 1 : 2;
    bool bland = false;
    int stall = 0;
    double last_obj = phase_objective(phase);
    bool fresh = true;  // factorization is current and values recomputed
    Eigen::VectorXd y(m), w(m), d(m);

    while (true) {
      if (it >= cap) {
        sol.status = LpStatus::IterationLimit;
        break;
      }
      if (static_cast<int>(etas.size()) >= kEtaLimit) {
        refresh();
        fresh = true;
      }

      bool feas = true;
      if (m > 0) {
        for (int slot = 0; slot < m; ++slot) {
          d[slot] = viol_dir(basic[slot]);
          if (d[slot] != 0.0) feas = false;
        }
      }
      if (phase == 1 && feas) {
        refresh();
        fresh = true;
        phase = 2;
        bland = false;
        stall = 0;
        last_obj = phase_objective(2);
        continue;
      }
      if (phase == 2 && !feas) {
        phase = 1;
        bland = false;
        stall = 0;
        last_obj = phase_objective(1);
      }

      if (phase == 1) {
        y = d;
      } else {
        for (int slot = 0; slot < m; ++slot) y[slot] = cost[basic[slot]];
      }
      btran(y);

      Cand cand = price(y, phase, bland);
      if (cand.j < 0) {
        if (!fresh) {
          refresh();
          fresh = true;
          continue;
        }
        sol.status = phase == 1 ? LpStatus::Infeasible : LpStatus::Optimal;
        break;
      }

      scatter_col(cand.j, w);
      ftran(w);
      RatioCand step = ratio_test(cand.j, cand.dir, w, bland);
      if (step.slot == -1) {
        if (!fresh) {
          refresh();
          fresh = true;
          continue;
        }
        sol.status = phase == 2 ? LpStatus::Unbounded : LpStatus::IterationLimit;
        break;
      }

      if (step.slot == -2) {
        apply_flip(cand.j, cand.dir, step.t, w);
      } else {
        apply_pivot(cand.j, cand.dir, step, w);
      }
      ++it;
      fresh = false;

      double cur = phase_objective(phase);
      if (cur < last_obj - kProgressTol * (1.0 + std::abs(last_obj))) {
        last_obj = cur;
        stall = 0;
        bland = false;
      } else if (++stall >= opt.stall_limit) {
        bland = true;
      }
    }

    extract(sol, it);
    return sol;
  }

  void extract(LpSolution& sol, long it) const {
    sol.iterations = it;
    sol.x.assign(n, 0.0);
    sol.y.assign(m, 0.0);
    sol.reduced_cost.assign(n, 0.0);

    for (int j = 0; j < n; ++j) {
      double x = col_scale[j] * xv[j];
      double l = lb[j] * col_scale[j];
      double u = ub[j] * col_scale[j];
      sol.x[j] = std::min(std::max(x, l), u);
    }
    double primal = 0.0;
    for (int j = 0; j < n; ++j) primal += (cost[j] / col_scale[j]) * sol.x[j];
    sol.objective = primal;

    Eigen::VectorXd ys(m);
    for (int slot = 0; slot < m; ++slot) ys[slot] = cost[basic[slot]];
    btran(ys);
    for (int i = 0; i < m; ++i) sol.y[i] = row_scale[i] * ys[i];

    double dual = 0.0;
    for (int i = 0; i < m; ++i) dual += sol.y[i] * (b[i] / row_scale[i]);
    for (int j = 0; j < n; ++j) {
      double rc = (cost[j] - dot_col(j, ys)) / col_scale[j];
      sol.reduced_cost[j] = rc;
      if (vstat[j] == kAtLower && lb[j] > -kInf) dual += rc * lb[j] * col_scale[j];
      else if (vstat[j] == kAtUpper && ub[j] < kInf) dual += rc * ub[j] * col_scale[j];
    }
    if (sol.status == LpStatus::Optimal) {
      sol.dual_gap = std::abs(primal - dual) / (1.0 + std::abs(primal));
    }

    std::vector<double> act(m, 0.0);
    for (int j = 0; j < n; ++j) {
      double x = xv[j];
      if (x == 0.0) continue;
      for (int k = col_ptr[j]; k < col_ptr[j + 1]; ++k) act[row_idx[k]] += val[k] * x;
    }
    double worst = 0.0;
    for (int i = 0; i < m; ++i) {
      double a = act[i] / row_scale[i];
      double rhs = b[i] / row_scale[i];
      double viol = 0.0;
      switch (rel[i]) {
        case Relation::LE: viol = std::max(0.0, a - rhs); break;
        case Relation::GE: viol = std::max(0.0, rhs - a); break;
        case Relation::EQ: viol = std::abs(a - rhs); break;
      }
      worst = std::max(worst, viol / (1.0 + std::abs(rhs)));
    }
    sol.primal_residual = worst;
  }
};

LpEngine::LpEngine(const ModelIR& model, LpOptions options)
    : impl_(std::make_unique<Impl>(model, options)) {}

LpEngine::~LpEngine() = default;

int LpEngine::num_rows() const { return impl_->m; }
int LpEngine::num_cols() const { return impl_->n; }

void LpEngine::set_bounds(int var, double lb, double ub) {
  Impl& s = *impl_;
  if (var < 0 || var >= s.n) throw std::out_of_range("lp_solver: variable index");
  if (lb > ub) throw std::invalid_argument("lp_solver: lb > ub");
  s.lb[var] = lb / s.col_scale[var];
  s.ub[var] = ub / s.col_scale[var];
  if (s.vstat[var] == kBasic) return;
  // keep nonbasic columns resting on a bound that still exists
  if (s.vstat[var] == kAtLower && s.lb[var] <= -kInf) {
    s.vstat[var] = s.ub[var] < kInf ? kAtUpper : kFreeNb;
  } else if (s.vstat[var] == kAtUpper && s.ub[var] >= kInf) {
    s.vstat[var] = s.lb[var] > -kInf ? kAtLower : kFreeNb;
  }
}

void LpEngine::set_rhs(int row, double rhs) {
  Impl& s = *impl_;
  if (row < 0 || row >= s.m) throw std::out_of_range("lp_solver: row index");
  s.b[row] = rhs * s.row_scale[row];
}

LpSolution LpEngine::solve() { return impl_->run(false); }
LpSolution LpEngine::resolve() { return impl_->run(true); }

std::vector<unsigned char> LpEngine::basis() const { return impl_->vstat; }

void LpEngine::load_basis(const std::vector<unsigned char>& snapshot) {
  Impl& s = *impl_;
  if (static_cast<int>(snapshot.size()) != s.total) {
    throw std::logic_error("lp_solver: basis snapshot size mismatch");
  }
  int nb = 0;
  for (unsigned char v : snapshot) nb += v == kBasic;
  if (nb != s.m) throw std::logic_error("lp_solver: basis snapshot row count mismatch");
  s.vstat = snapshot;
  s.basic.clear();
  for (int j = 0; j < s.total; ++j) {
    if (s.vstat[j] == kBasic) {
      s.basic.push_back(j);
    } else if (s.vstat[j] == kAtLower && s.lb[j] <= -kInf) {
      s.vstat[j] = s.ub[j] < kInf ? kAtUpper : kFreeNb;
    } else if (s.vstat[j] == kAtUpper && s.ub[j] >= kInf) {
      s.vstat[j] = s.lb[j] > -kInf ? kAtLower : kFreeNb;
    }
  }
  s.etas.clear();
}

LpSolution solve_lp(const ModelIR& model, const LpOptions& options) {
  return LpEngine(model, options).solve();
}

}  // namespace resplan
