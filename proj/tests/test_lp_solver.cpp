#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "resplan/lp_solver.hpp"
#include "resplan/model_ir.hpp"

using namespace resplan;

namespace {

// xorshift mix, independent of the library rng on purpose
struct FuzzRng {
  uint64_t s;
  explicit FuzzRng(uint64_t seed) : s(seed * 2685821657736338717ULL + 1) {}
  uint64_t next() {
    s ^= s >> 12;
    s ^= s << 25;
    s ^= s >> 27;
    return s * 2685821657736338717ULL;
  }
  double uni() { return double(next() >> 11) * (1.0 / 9007199254740992.0); }
  int range(int lo, int hi) { return lo + int(next() % uint64_t(hi - lo + 1)); }
};

struct RandomLp {
  ModelIR model;
  bool feasible_mode = false;
  std::vector<double> x0;  // feasible point when feasible_mode
};

RandomLp make_random_lp(int seed) {
  FuzzRng rng(seed + 1);
  RandomLp out;
  out.feasible_mode = seed % 2 == 0;
  int m = rng.range(1, seed % 5 == 0 ? 60 : 40);
  int n = rng.range(1, seed % 5 == 0 ? 60 : 40);
  ModelIR& mdl = out.model;
  mdl.name = "fuzz";
  out.x0.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double lbv = 0, ubv = kInf;
    if (out.feasible_mode) {
      if (rng.uni() < 0.8) {
        lbv = rng.range(-6, 0);
        ubv = lbv + rng.range(1, 8);
      }
      out.x0[j] = lbv > -kInf && ubv < kInf ? lbv + (ubv - lbv) * rng.uni()
                                            : double(rng.range(0, 5));
      if (rng.uni() < 0.3) out.x0[j] = std::floor(out.x0[j]);  // degenerate corners
      out.x0[j] = std::clamp(out.x0[j], lbv, ubv);
    } else {
      int kind = rng.range(0, 5);
      if (kind == 0) {
        lbv = -kInf;
      } else if (kind == 1) {
        lbv = -rng.range(0, 5);
        ubv = rng.range(0, 5);
        if (lbv > ubv) std::swap(lbv, ubv);
      } else if (kind == 2) {
        lbv = rng.range(-3, 3);
        ubv = lbv;  // fixed variable
      } else if (kind == 3) {
        lbv = -kInf;
        ubv = rng.range(-2, 4);
      }
    }
    mdl.add_variable("x" + std::to_string(j), lbv, ubv, rng.range(-10, 10));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<LinTerm> terms;
    double act = 0;
    for (int j = 0; j < n; ++j) {
      if (rng.uni() < 0.35) {
        int c = rng.range(-3, 3);
        if (c != 0) {
          terms.push_back({j, double(c)});
          act += c * out.x0[j];
        }
      }
    }
    if (terms.empty()) {
      int j = rng.range(0, n - 1);
      terms.push_back({j, 1.0});
      act = out.x0[j];
    }
    Relation rel = i % 3 == 0 ? Relation::GE : (i % 3 == 1 ? Relation::LE : Relation::EQ);
    double rhs;
    if (out.feasible_mode) {
      double slack = rng.uni() < 0.5 ? 0.0 : rng.range(0, 4);  // zero forces degeneracy
      rhs = rel == Relation::LE ? act + slack : (rel == Relation::GE ? act - slack : act);
    } else {
      rhs = rng.range(-8, 8);
    }
    mdl.add_constraint("c" + std::to_string(i), terms, rel, rhs);
  }
  return out;
}

// Independent optimality certificate from (x, y) alone: primal feasibility,
// dual sign conditions on recomputed reduced costs, complementary slackness,
// and the resulting primal/dual objective agreement.
std::string certify_optimal(const ModelIR& mdl, const LpSolution& s) {
  int n = mdl.num_variables();
  int m = mdl.num_constraints();
  if (mdl.max_violation(s.x) > 1e-6) return "primal infeasible";

  std::vector<double> reduced(n);
  for (int j = 0; j < n; ++j) reduced[j] = mdl.variable(j).cost;
  double ynorm = 1.0;
  for (int i = 0; i < m; ++i) {
    ynorm = std::max(ynorm, std::abs(s.y[i]));
    for (const LinTerm& term : mdl.constraint(i).terms) {
      reduced[term.var] -= s.y[i] * term.coef;
    }
  }
  double tol = 1e-6 * ynorm;

  for (int i = 0; i < m; ++i) {
    const LinearConstraint& con = mdl.constraint(i);
    // constraint_activity already subtracts the rhs: zero residual = binding
    double resid = mdl.constraint_activity(i, s.x);
    if (con.rel == Relation::LE && s.y[i] > tol) return "LE row with positive price";
    if (con.rel == Relation::GE && s.y[i] < -tol) return "GE row with negative price";
    bool binding = std::abs(resid) <= 1e-6 * (1.0 + std::abs(con.rhs));
    if (con.rel != Relation::EQ && !binding && std::abs(s.y[i]) > tol)
      return "price on a slack row";
  }

  double dual_obj = 0.0;
  for (int i = 0; i < m; ++i) dual_obj += s.y[i] * mdl.constraint(i).rhs;
  for (int j = 0; j < n; ++j) {
    const Variable& v = mdl.variable(j);
    bool at_lb = v.lb > -kInf && s.x[j] <= v.lb + 1e-7;
    bool at_ub = v.ub < kInf && s.x[j] >= v.ub - 1e-7;
    if (!at_lb && reduced[j] > tol) return "positive reduced cost off the lower bound";
    if (!at_ub && reduced[j] < -tol) return "negative reduced cost off the upper bound";
    if (reduced[j] > tol) dual_obj += reduced[j] * v.lb;
    if (reduced[j] < -tol) dual_obj += reduced[j] * v.ub;
  }
  double gap = std::abs(s.objective - dual_obj);
  if (gap > 1e-6 * (1.0 + std::abs(s.objective)) + tol) return "duality gap";
  return "";
}

}  // namespace

TEST_SUITE("lp_solver") {

TEST_CASE("one-variable floor") {
  ModelIR mdl;
  int x = mdl.add_variable("x", 0, kInf, 1.0);
  mdl.add_constraint("c", {{x, 1.0}}, Relation::GE, 3.0);
  LpSolution s = solve_lp(mdl);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(s.x[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(s.y[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infeasibility and unboundedness are detected") {
  ModelIR a;
  int x = a.add_variable("x", 0, kInf, 1.0);
  a.add_constraint("c", {{x, 1.0}}, Relation::LE, -1.0);
  CHECK(solve_lp(a).status == LpStatus::Infeasible);

  ModelIR b;
  b.add_variable("x", 0, kInf, -1.0);
  CHECK(solve_lp(b).status == LpStatus::Unbounded);
}

TEST_CASE("recourse-shaped toy: ship exactly the demand") {
  ModelIR mdl;
  int ship = mdl.add_variable("ship", 0, kInf, 1.0);
  int unmet = mdl.add_variable("unmet", 0, kInf, 10.0);
  mdl.add_constraint("dem", {{ship, 1.0}, {unmet, 1.0}}, Relation::GE, 7.0);
  mdl.add_constraint("cap", {{ship, 1.0}}, Relation::LE, 9.0);
  LpSolution s = solve_lp(mdl);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(s.x[ship] == doctest::Approx(7.0).epsilon(1e-9));
  CHECK(s.x[unmet] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("classic cycling model terminates at its optimum") {
  ModelIR mdl;
  int x1 = mdl.add_variable("x1", 0, kInf, -0.75);
  int x2 = mdl.add_variable("x2", 0, kInf, 150.0);
  int x3 = mdl.add_variable("x3", 0, kInf, -0.02);
  int x4 = mdl.add_variable("x4", 0, kInf, 6.0);
  mdl.add_constraint("r1", {{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}}, Relation::LE, 0.0);
  mdl.add_constraint("r2", {{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}}, Relation::LE, 0.0);
  mdl.add_constraint("r3", {{x3, 1.0}}, Relation::LE, 1.0);
  LpSolution s = solve_lp(mdl);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("duals and reduced costs at a bounded optimum") {
  ModelIR mdl;
  int a = mdl.add_variable("a", 0, 4.0, 2.0);
  int b = mdl.add_variable("b", 0, kInf, 3.0);
  mdl.add_constraint("sum", {{a, 1.0}, {b, 1.0}}, Relation::EQ, 10.0);
  LpSolution s = solve_lp(mdl);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(26.0).epsilon(1e-9));
  CHECK(s.x[a] == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(s.x[b] == doctest::Approx(6.0).epsilon(1e-9));
  CHECK(s.y[0] == doctest::Approx(3.0).epsilon(1e-9));           // marginal unit met by b
  CHECK(s.reduced_cost[a] == doctest::Approx(-1.0).epsilon(1e-9));  // pinned at its cap
}

TEST_CASE("free variables") {
  ModelIR mdl;
  int x = mdl.add_variable("x", -kInf, kInf, 1.0);
  mdl.add_constraint("c", {{x, 1.0}}, Relation::GE, -5.0);
  LpSolution s = solve_lp(mdl);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-5.0).epsilon(1e-9));
}

TEST_CASE("negative bounds both sides") {
  ModelIR mdl;
  int x = mdl.add_variable("x", -10.0, 10.0, 1.0);
  int z = mdl.add_variable("z", -10.0, 10.0, -2.0);
  mdl.add_constraint("c1", {{x, 1.0}, {z, 1.0}}, Relation::LE, 4.0);
  mdl.add_constraint("c2", {{x, 1.0}, {z, -1.0}}, Relation::GE, -8.0);
  LpSolution s = solve_lp(mdl);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-14.0).epsilon(1e-9));
  CHECK(s.x[x] == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(s.x[z] == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("warm starts track bound and rhs edits") {
  ModelIR mdl;
  int a = mdl.add_variable("a", 0, kInf, 1.0);
  mdl.add_variable("b", 0, kInf, 2.0);
  mdl.add_constraint("dem", {{0, 1.0}, {1, 1.0}}, Relation::GE, 5.0);
  LpEngine eng(mdl);
  LpSolution s1 = eng.solve();
  REQUIRE(s1.status == LpStatus::Optimal);
  CHECK(s1.objective == doctest::Approx(5.0).epsilon(1e-9));

  eng.set_bounds(a, 0.0, 2.0);  // cap the cheap source
  LpSolution s2 = eng.resolve();
  REQUIRE(s2.status == LpStatus::Optimal);
  CHECK(s2.objective == doctest::Approx(8.0).epsilon(1e-9));

  eng.set_rhs(0, 8.0);
  LpSolution s3 = eng.resolve();
  REQUIRE(s3.status == LpStatus::Optimal);
  CHECK(s3.objective == doctest::Approx(14.0).epsilon(1e-9));
}

TEST_CASE("basis snapshots restore a previous solve state") {
  ModelIR mdl;
  mdl.add_variable("a", 0, kInf, 1.5);
  mdl.add_variable("b", 0, kInf, 2.5);
  mdl.add_constraint("dem", {{0, 1.0}, {1, 1.0}}, Relation::GE, 4.0);
  mdl.add_constraint("mix", {{0, 1.0}, {1, -1.0}}, Relation::LE, 1.0);
  LpEngine eng(mdl);
  LpSolution base = eng.solve();
  REQUIRE(base.status == LpStatus::Optimal);
  std::vector<unsigned char> snapshot = eng.basis();

  eng.set_rhs(0, 9.0);
  LpSolution moved = eng.resolve();
  REQUIRE(moved.status == LpStatus::Optimal);
  CHECK(moved.objective > base.objective);

  eng.set_rhs(0, 4.0);
  eng.load_basis(snapshot);
  LpSolution back = eng.resolve();
  REQUIRE(back.status == LpStatus::Optimal);
  CHECK(back.objective == doctest::Approx(base.objective).epsilon(1e-12));
}

TEST_CASE("degenerate corpus terminates inside the iteration cap") {
  for (int seed = 0; seed < 10; ++seed) {
    FuzzRng rng(seed + 31);
    ModelIR mdl;
    int n = 6 + seed % 5;
    for (int j = 0; j < n; ++j) mdl.add_variable("x" + std::to_string(j), 0.0, 4.0, 0.0);
    std::vector<LinTerm> terms;
    for (int j = 0; j < n; ++j) terms.push_back({j, double(rng.range(1, 3))});
    for (int i = 0; i < 8; ++i) {  // the same row over and over
      mdl.add_constraint("dup" + std::to_string(i), terms, Relation::LE, 6.0);
    }
    mdl.add_constraint("floor", {{0, 1.0}}, Relation::GE, 0.0);
    LpSolution s = solve_lp(mdl);
    CHECK(s.status == LpStatus::Optimal);
    CHECK(s.iterations <= 50 * (mdl.num_constraints() + mdl.num_variables()));
  }
}

TEST_CASE("random LPs carry a full optimality certificate") {
  int optimal = 0, infeasible = 0, unbounded = 0;
  for (int seed = 0; seed < 140; ++seed) {
    RandomLp lp = make_random_lp(seed);
    LpSolution s = solve_lp(lp.model);
    if (lp.feasible_mode) {
      // a feasible point exists by construction
      CHECK(s.status != LpStatus::Infeasible);
      if (s.status == LpStatus::Optimal) {
        double at_x0 = lp.model.objective_value(lp.x0);
        CHECK(s.objective <= at_x0 + 1e-6 * (1.0 + std::abs(at_x0)));
      }
    }
    if (s.status == LpStatus::Optimal) {
      ++optimal;
      std::string verdict = certify_optimal(lp.model, s);
      if (!verdict.empty()) {
        CAPTURE(seed);
        CAPTURE(verdict);
        CHECK(verdict.empty());
      }
    } else if (s.status == LpStatus::Infeasible) {
      ++infeasible;
    } else if (s.status == LpStatus::Unbounded) {
      ++unbounded;
    } else {
      CAPTURE(seed);
      CHECK(s.status != LpStatus::IterationLimit);
    }
  }
  // the generator must exercise all three outcomes
  CHECK(optimal > 40);
  CHECK(infeasible > 5);
  CHECK(unbounded > 5);
}

}  // TEST_SUITE
