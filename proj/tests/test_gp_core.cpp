#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "macpower/error.hpp"
#include "macpower/gp_core.hpp"
#include "support.hpp"

using namespace macpower;
using doctest::Approx;

namespace {

Monomial x0(double c = 1.0, double e = 1.0) { return Monomial(c, {{0, e}}); }

}  // namespace

TEST_CASE("monomial and posynomial evaluation") {
  const std::vector<double> x{2.0, 3.0};
  const Monomial m(1.5, {{0, 2.0}, {1, -1.0}});
  CHECK(m.eval(x) == Approx(2.0));
  const std::vector<double> lx{std::log(2.0), std::log(3.0)};
  CHECK(m.log_eval(lx) == Approx(std::log(2.0)));
  CHECK(m.pow(0.5).eval(x) == Approx(std::sqrt(2.0)));
  CHECK((m * m).eval(x) == Approx(4.0));
  CHECK((m / m).eval(x) == Approx(1.0));
  const Posynomial p = Posynomial{Monomial(1.0), x0()} * Posynomial{x0()};
  CHECK(p.eval(x) == Approx(6.0));
}

TEST_CASE("condensation examples") {
  const Posynomial p{Monomial(1.0), x0()};
  const std::vector<double> one{1.0}, four{4.0};
  const Monomial m = condense_posynomial(p, one);
  CHECK(m.coeff == Approx(2.0));
  CHECK(m.exponents.at(0) == Approx(0.5));
  CHECK(m.eval(one) == Approx(2.0).epsilon(1e-15));
  CHECK(m.eval(four) == Approx(4.0));
  CHECK(m.eval(four) <= p.eval(four));

  const Monomial single(3.0, {{0, 1.5}});
  const Monomial same = condense_posynomial(Posynomial{single}, four);
  CHECK(same.coeff == single.coeff);
  CHECK(same.exponents == single.exponents);

  const std::vector<double> bad{0.0};
  try {
    condense_posynomial(p, bad);
    FAIL("expected NonPositiveAnchor");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveAnchor);
  }
}

TEST_CASE("condensation soundness on random posynomials") {
  testing_support::Draw draw(43);
  for (int k = 0; k < 1000; ++k) {
    const int n = draw.integer(1, 4);
    const Posynomial p = testing_support::random_posynomial(draw, n);
    std::vector<double> anchor, probe;
    for (int v = 0; v < n; ++v) {
      anchor.push_back(draw.log_uniform(1e-2, 1e2));
      probe.push_back(draw.log_uniform(1e-2, 1e2));
    }
    const Monomial m = condense_posynomial(p, anchor);
    CHECK(std::abs(m.eval(anchor) - p.eval(anchor)) <= 1e-12 * p.eval(anchor));
    CHECK(m.eval(probe) <= p.eval(probe) * (1.0 + 1e-12));
    // log-gradients agree at the anchor
    for (int v = 0; v < n; ++v) {
      double g = 0.0;
      for (const auto& t : p.terms) {
        auto it = t.exponents.find(v);
        if (it != t.exponents.end()) g += it->second * t.eval(anchor);
      }
      g /= p.eval(anchor);
      auto it = m.exponents.find(v);
      const double gm = it == m.exponents.end() ? 0.0 : it->second;
      CHECK(gm == Approx(g).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("problem validation") {
  GpProblem gp;
  const VarId x = gp.add_variable("x");
  gp.objective = Monomial(1.0, {{x, 1.0}});
  CHECK_NOTHROW(gp.validate());
  GpProblem undeclared = gp;
  undeclared.objective = Monomial(1.0, {{3, 1.0}});
  CHECK_THROWS_AS(undeclared.validate(), Error);
  GpProblem negative = gp;
  negative.constraints.push_back(SignomialConstraint::leq_one(Monomial(-1.0, {{x, 1.0}})));
  CHECK_THROWS_AS(negative.validate(), Error);
  GpProblem frac = gp;
  SignomialConstraint c = SignomialConstraint::leq(Monomial(1.0), Monomial(1.0, {{x, 1.0}}));
  c.rhs_factors.push_back({Posynomial{Monomial(1.0, {{x, 1.0}})}, 1.5});
  frac.constraints.push_back(c);
  CHECK_THROWS_AS(frac.validate(), Error);
  GpProblem empty = gp;
  empty.objective = Posynomial{};
  CHECK_THROWS_AS(empty.validate(), Error);
}

TEST_CASE("GP examples") {
  {
    GpProblem gp;
    const VarId x = gp.add_variable("x");
    gp.objective = Monomial(1.0, {{x, 1.0}});
    gp.constraints.push_back(SignomialConstraint::leq_one(Monomial(2.0, {{x, -1.0}})));
    const std::vector<double> init{10.0};
    const SolveReport r = solve_gp(gp, init);
    CHECK(r.status == SolveStatus::Converged);
    CHECK(r.x_star[0] == Approx(2.0).epsilon(1e-7));
  }
  {
    GpProblem gp;
    const VarId x = gp.add_variable("x"), y = gp.add_variable("y");
    gp.objective = Posynomial{Monomial(1.0, {{x, 1.0}}), Monomial(1.0, {{y, 1.0}})};
    gp.constraints.push_back(SignomialConstraint::leq_one(Monomial(1.0, {{x, -1.0}, {y, -1.0}})));
    for (double start : {5.0, 0.1}) {
      const std::vector<double> init{start, start * 3};
      const SolveReport r = solve_gp(gp, init);
      CHECK(r.status == SolveStatus::Converged);
      CHECK(r.objective_value == Approx(2.0).epsilon(1e-7));
      CHECK(r.x_star[0] == Approx(1.0).epsilon(1e-6));
      CHECK(r.x_star[1] == Approx(1.0).epsilon(1e-6));
      CHECK(gp.max_violation(r.x_star) <= 1.0 + 1e-8);
    }
  }
  {
    GpProblem gp;
    const VarId x = gp.add_variable("x");
    gp.objective = Monomial(1.0, {{x, 1.0}});
    gp.constraints.push_back(SignomialConstraint::leq_one(Monomial(1.0, {{x, 1.0}})));
    gp.constraints.push_back(SignomialConstraint::leq_one(Monomial(2.0, {{x, -1.0}})));
    const std::vector<double> init{1.0};
    CHECK(solve_gp(gp, init).status == SolveStatus::Infeasible);
  }
}

TEST_CASE("GP respects variable bounds") {
  GpProblem gp;
  const VarId x = gp.add_variable("x", 3.0, 10.0);
  gp.objective = Monomial(1.0, {{x, 1.0}});
  const std::vector<double> init{5.0};
  const SolveReport r = solve_gp(gp, init);
  CHECK(r.status == SolveStatus::Converged);
  CHECK(r.x_star[0] == Approx(3.0).epsilon(1e-7));
}

TEST_CASE("signomial examples") {
  GpProblem pure;
  const VarId a = pure.add_variable("x"), b = pure.add_variable("y");
  pure.objective = Posynomial{Monomial(1.0, {{a, 1.0}}), Monomial(1.0, {{b, 1.0}})};
  pure.constraints.push_back(SignomialConstraint::leq_one(Monomial(1.0, {{a, -1.0}, {b, -1.0}})));
  const std::vector<double> init2{4.0, 4.0};
  const SolveReport g = solve_gp(pure, init2);
  const SolveReport s = solve_signomial(pure, init2);
  CHECK(s.outer_iterations == 1);
  CHECK(s.objective_value == Approx(g.objective_value).epsilon(1e-12));

  GpProblem sp;
  const VarId x = sp.add_variable("x");
  sp.objective = Monomial(1.0, {{x, 1.0}});
  sp.constraints.push_back(SignomialConstraint::leq(Monomial(1.0), Posynomial{x0(), Monomial(0.5)}));
  const std::vector<double> init{3.0};
  const SolveReport r = solve_signomial(sp, init);
  CHECK(r.status == SolveStatus::Converged);
  CHECK(r.x_star[0] == Approx(0.5).epsilon(1e-6));
  for (std::size_t k = 1; k < r.objective_history.size(); ++k) {
    CHECK(r.objective_history[k] <= r.objective_history[k - 1]);
  }
}

TEST_CASE("fractional power factors") {
  // min x s.t. 1 <= (x + 1)^0.5 * 0.5 i.e. x >= 3
  GpProblem sp;
  const VarId x = sp.add_variable("x");
  sp.objective = Monomial(1.0, {{x, 1.0}});
  SignomialConstraint c = SignomialConstraint::leq(Monomial(2.0), Monomial(1.0));
  c.rhs_factors.push_back({Posynomial{x0(), Monomial(1.0)}, 0.5});
  sp.constraints.push_back(c);
  const std::vector<double> init{20.0};
  const SolveReport r = solve_signomial(sp, init);
  CHECK(r.status == SolveStatus::Converged);
  CHECK(r.x_star[0] == Approx(3.0).epsilon(1e-6));

  // min x s.t. (x^-1 + 1)^0.5 <= 1.25 i.e. x >= 1/(1.5625 - 1)
  GpProblem lf;
  const VarId y = lf.add_variable("y");
  lf.objective = Monomial(1.0, {{y, 1.0}});
  SignomialConstraint d = SignomialConstraint::leq(Monomial(1.0 / 1.25), Monomial(1.0));
  d.kind = ConstraintKind::PosyLeqPosy;
  d.lhs_factors.push_back({Posynomial{Monomial(1.0, {{y, -1.0}}), Monomial(1.0)}, 0.5});
  lf.constraints.push_back(d);
  const SolveReport q = solve_signomial(lf, init);
  CHECK(q.status == SolveStatus::Converged);
  CHECK(q.x_star[0] == Approx(1.0 / 0.5625).epsilon(1e-6));
}

TEST_CASE("random signomial programs: monotone and truly feasible") {
  testing_support::Draw draw(47);
  int converged = 0;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> init;
    const GpProblem gp = testing_support::random_signomial_problem(draw, init);
    const SolveReport r = solve_signomial(gp, init);
    CHECK(r.status != SolveStatus::Infeasible);
    for (std::size_t t = 1; t < r.objective_history.size(); ++t) {
      CHECK(r.objective_history[t] <= r.objective_history[t - 1]);
    }
    CHECK(r.rejected_increase <= 1e-8);
    if (r.status == SolveStatus::Converged) {
      ++converged;
      CHECK(gp.max_violation(r.x_star) <= 1.0 + 1e-6);
    }
  }
  CHECK(converged >= 95);
}

TEST_CASE("debug dump writes one monomial per line") {
  GpProblem sp;
  const VarId x = sp.add_variable("x");
  sp.objective = Monomial(1.0, {{x, 1.0}});
  sp.constraints.push_back(SignomialConstraint::leq(Monomial(1.0), Posynomial{x0(), Monomial(0.5)}, "reach"));
  std::ostringstream dump;
  SolverOptions opts;
  opts.debug = &dump;
  const std::vector<double> init{3.0};
  solve_signomial(sp, init, opts);
  const std::string text = dump.str();
  CHECK(text.find("outer 0") != std::string::npos);
  CHECK(text.find("constraint reach") != std::string::npos);
  std::ostringstream one;
  write_monomial(one, Monomial(2.5, {{0, 0.5}, {1, -1.0}}));
  CHECK(one.str() == "2.5 0:0.5 1:-1");
}
