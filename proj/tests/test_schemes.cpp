#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "macpower/error.hpp"
#include "macpower/gaussian_info.hpp"
#include "macpower/schemes.hpp"
#include "macpower/verify.hpp"
#include "support.hpp"

using namespace macpower;
using doctest::Approx;

TEST_CASE("uncoded distortion") {
  const NetworkConfig cfg = testing_support::b1();
  const std::vector<double> zero{0, 0}, one{1, 1};
  CHECK(uncoded_mse(cfg, zero) == 1.0);
  CHECK(uncoded_mse(cfg, one) == Approx(0.5).epsilon(1e-14));
  const NetworkConfig clean = make_network(1, 1, {1}, {1e-12});
  const std::vector<double> huge{1e12};
  CHECK(uncoded_mse(clean, huge) < 1e-9);
}

TEST_CASE("symmetric closed forms, reference instance") {
  const SymmetricPowers p = symmetric_closed_forms(2, 1.0, 1.0, 0.5);
  CHECK(p.p_s == Approx(3.5).epsilon(1e-14));
  CHECK(p.p_j == Approx(2.625).epsilon(1e-14));
  CHECK(p.p_a == Approx(1.0).epsilon(1e-14));
  CHECK(p.p_lob == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(p.p_j_alt == Approx(7.0 / 3.0).epsilon(1e-14));
  CHECK(p.rho_tilde == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(p.q_l == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(p.r == Approx(0.5).epsilon(1e-14));
  const SymmetricCrossCheck c = symmetric_cross_check(2, 1.0, 1.0, 0.5);
  CHECK(c.p_a_via_q == Approx(1.0).epsilon(1e-12));
  CHECK(c.p_j_via_q == Approx(2.625).epsilon(1e-12));
}

TEST_CASE("symmetric closed forms, edge cases") {
  const SymmetricPowers one = symmetric_closed_forms(1, 1.0, 0.5, 0.5);
  CHECK(one.p_s == Approx(one.p_j).epsilon(1e-14));
  const SymmetricPowers near = symmetric_closed_forms(3, 1.0, 1.0, 1.0 - 1e-9);
  CHECK(near.p_s < 1e-8);
  CHECK(near.p_j < 1e-8);
  CHECK(near.p_a < 1e-8);
  CHECK(near.p_lob < 1e-8);
  try {
    symmetric_closed_forms(2, 1.0, 1.0, 0.3);
    FAIL("expected InfeasibleSymmetric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleSymmetric);
  }
  CHECK_THROWS_AS(symmetric_closed_forms(2, 1.0, 1.0, 1.0), Error);
}

TEST_CASE("symmetric ordering and route agreement on random draws") {
  testing_support::Draw draw(83);
  int n = 0;
  while (n < 1000) {
    const std::size_t l = static_cast<std::size_t>(draw.integer(2, 10));
    const double s2 = draw.log_uniform(0.1, 10.0);
    const double n2 = s2 * draw.log_uniform(1e-3, 1e2);
    const double d = s2 * draw.uniform(0.01, 0.99);
    if (n2 / static_cast<double>(l) * (1.0 / d - 1.0 / s2) >= 1.0) continue;
    ++n;
    const SymmetricPowers p = symmetric_closed_forms(l, s2, n2, d);
    CHECK(p.p_lob < p.p_a);
    CHECK(p.p_a < p.p_j);
    CHECK(p.p_j < p.p_s);
    const SymmetricCrossCheck c = symmetric_cross_check(l, s2, n2, d);
    CHECK(std::abs(c.p_a_via_q - p.p_a) <= 1e-12 * std::max(1.0, p.p_a) * 1e2);
    CHECK(c.p_j_via_q == Approx(p.p_j).epsilon(1e-9));
  }
}

TEST_CASE("uncoded solver") {
  const NetworkConfig cfg = testing_support::b1();
  const SchemeSolution s = minimize_power_uncoded(cfg, 0.5);
  CHECK(s.converged());
  CHECK(s.total_power == Approx(2.0).epsilon(1e-6));
  CHECK(s.powers[0] == Approx(1.0).epsilon(1e-5));
  CHECK(s.powers[1] == Approx(1.0).epsilon(1e-5));
  CHECK(s.rates.empty());

  const NetworkConfig single = make_network(1, 1, {2, 1}, {1e-9, 1e12});
  const SchemeSolution u = minimize_power_uncoded(single, 0.5);
  CHECK(u.total_power == Approx(1.0 * (1.0 / 0.5 - 1.0) / 2.0).epsilon(1e-5));

  const NetworkConfig asym = make_network(1, 1, {4, 1}, {1, 2});
  const double floor = uncoded_high_power_limit(asym);
  const SchemeSolution edge = minimize_power_uncoded(asym, floor * (1.0 + 1e-3));
  CHECK(edge.converged());
  CHECK(std::isfinite(edge.total_power));
  CHECK(edge.total_power > 10.0 * minimize_power_uncoded(asym, 0.6).total_power);

  try {
    minimize_power_uncoded(asym, floor * 0.999);
    FAIL("expected Infeasible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Infeasible);
  }
  CHECK(minimize_power_uncoded(asym, 1.0).total_power == 0.0);
}

TEST_CASE("uncoded solver matches the closed form on symmetric networks") {
  testing_support::Draw draw(89);
  for (int k = 0; k < 20; ++k) {
    const std::size_t l = static_cast<std::size_t>(draw.integer(2, 5));
    const double g = draw.log_uniform(0.2, 5.0), n2 = draw.log_uniform(0.2, 3.0);
    const NetworkConfig cfg = make_network(1.0, draw.log_uniform(0.5, 2.0), std::vector<double>(l, g),
                                           std::vector<double>(l, n2));
    const double lo = std::max(min_distortion(cfg), uncoded_high_power_limit(cfg));
    const double d = lo + (1.0 - lo) * draw.uniform(0.1, 0.9);
    const SchemeSolution s = minimize_power_uncoded(cfg, d);
    const double closed = static_cast<double>(l) * symmetric_closed_forms(l, 1.0, n2, d).p_a * cfg.sigma_w2 / g;
    CHECK(s.total_power == Approx(closed).epsilon(1e-5));
    CHECK(s.achieved_d == Approx(d).epsilon(1e-6));
  }
}

TEST_CASE("separate coding on the reference instance") {
  const NetworkConfig cfg = testing_support::b1();
  const SchemeSolution s = minimize_power_sscc(cfg, 0.5);
  CHECK(s.converged());
  CHECK(s.total_power == Approx(7.0).epsilon(0.01));
  CHECK(s.achieved_d <= 0.5 + 1e-9);
  const FeasibilityVerdict v = check_feasible(cfg, s.powers, s.r, 0.5, CodingScheme::Separate);
  CHECK(v.feasible);
  const SchemeSolution g = minimize_power_sscc_general(cfg, 0.5);
  CHECK(g.total_power == Approx(7.0).epsilon(0.01));
  CHECK(solve_scheme(cfg, 0.5, Scheme::SSCC).total_power == Approx(7.0).epsilon(0.01));
}

TEST_CASE("separate coding time share") {
  const NetworkConfig cfg = make_network(1, 1, {4, 1}, {1, 1});
  const SchemeSolution a0 = minimize_power_sscc_alpha(cfg, 0.5, 0.0);
  const SchemeSolution a1 = minimize_power_sscc_alpha(cfg, 0.5, 1.0);
  CHECK(std::abs(a0.total_power - a1.total_power) > 1e-3 * a0.total_power);
  const SchemeSolution best = minimize_power_sscc(cfg, 0.5);
  CHECK(best.total_power <= std::min(a0.total_power, a1.total_power) * (1.0 + 1e-9));
  CHECK(best.alpha >= 0.0);
  CHECK(best.alpha <= 1.0);
  const OracleResult vertex = sscc_vertex_oracle(cfg, 0.5);
  CHECK(best.total_power == Approx(vertex.value).epsilon(0.01));
  const SchemeSolution gen = minimize_power_sscc_general(cfg, 0.5);
  CHECK(gen.total_power == Approx(vertex.value).epsilon(0.01));
}

TEST_CASE("separate coding for more sensors meets every subset constraint") {
  testing_support::Draw draw(97);
  for (int k = 0; k < 5; ++k) {
    const std::size_t l = static_cast<std::size_t>(draw.integer(3, 4));
    const NetworkConfig cfg = draw.network(l);
    const double d = min_distortion(cfg) + (cfg.sigma_s2 - min_distortion(cfg)) * draw.uniform(0.3, 0.8);
    const SchemeSolution s = minimize_power_sscc_general(cfg, d);
    CHECK(s.status != SolveStatus::Infeasible);
    CHECK(check_feasible(cfg, s.powers, s.r, d, CodingScheme::Separate).feasible);
    CHECK(s.achieved_d == Approx(d).epsilon(1e-6));
  }
}

TEST_CASE("joint coding on the reference instance") {
  const NetworkConfig cfg = testing_support::b1();
  const SchemeSolution s = minimize_power_jscc(cfg, 0.5);
  CHECK(s.converged());
  CHECK(s.total_power == Approx(5.25).epsilon(0.01));
  CHECK(check_feasible(cfg, s.powers, s.r, 0.5, CodingScheme::Joint).feasible);
  CHECK(s.rates.size() == 2);
  CHECK(s.rates[0] >= s.r[0]);

  SchemeOptions zero;
  zero.jscc_zero_rho = true;
  const SchemeSolution z = minimize_power_jscc(cfg, 0.5, zero);
  CHECK(z.total_power == Approx(7.0).epsilon(0.01));
}

TEST_CASE("joint coding on a far-apart sensor pair") {
  const NetworkConfig cfg = make_network(1, 1, {1, 1.0 / 81.0}, {81, 1});
  const SchemeSolution s = minimize_power_jscc(cfg, 0.8);
  CHECK(check_feasible(cfg, s.powers, s.r, 0.8, CodingScheme::Joint).feasible);
  const OracleResult grid = grid_oracle(cfg, 0.8, Scheme::JSCC);
  CHECK(s.total_power == Approx(grid.value).epsilon(0.02));
}

TEST_CASE("distortion constraint is active at the optimum") {
  testing_support::Draw draw(101);
  for (int k = 0; k < 6; ++k) {
    const NetworkConfig cfg = draw.network(2);
    const double lo = std::max(min_distortion(cfg), uncoded_high_power_limit(cfg));
    const double d = lo + (cfg.sigma_s2 - lo) * draw.uniform(0.2, 0.8);
    for (Scheme sc : {Scheme::Uncoded, Scheme::JSCC}) {
      const SchemeSolution s = solve_scheme(cfg, d, sc);
      if (!s.converged()) continue;
      CHECK(s.achieved_d == Approx(d).epsilon(1e-6));
    }
    const SchemeSolution g = minimize_power_sscc_general(cfg, d);
    CHECK(g.achieved_d == Approx(d).epsilon(1e-6));
  }
}

TEST_CASE("joint per-sensor constraints are tighter and the sum constraint looser") {
  testing_support::Draw draw(103);
  for (int k = 0; k < 500; ++k) {
    const NetworkConfig cfg = draw.network(2);
    const std::vector<double> p = draw.rates(2, 0.01, 10.0), r = draw.rates(2, 0.01, 3.0);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    for (const SensorSet s : {SensorSet{0}, SensorSet{1}}) {
      CHECK(mac_rhs_correlated(cfg, p, r, s) <= mac_rhs_independent(cfg, p, s) + 1e-15);
    }
    CHECK(mac_rhs_correlated(cfg, p, r, SensorSet{0, 1}) >=
          mac_rhs_independent(cfg, p, SensorSet{0, 1}) - 1e-15);
    (void)eye;
  }
}

TEST_CASE("lower bound") {
  const NetworkConfig cfg = testing_support::b1();
  const SchemeSolution lb = lower_bound_power(cfg, 0.5);
  CHECK(lb.total_power == Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(solve_scheme(cfg, 0.5, Scheme::LowerBound).total_power == Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("infeasible targets") {
  const NetworkConfig cfg = make_network(1, 1, {1}, {1});
  for (Scheme sc : {Scheme::SSCC, Scheme::Uncoded}) {
    try {
      solve_scheme(cfg, 0.4, sc);
      FAIL("expected Infeasible");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Infeasible);
      CHECK(std::string(e.what()).find("d_min") != std::string::npos);
    }
  }
  CHECK(solve_scheme(cfg, 1.5, Scheme::JSCC).total_power == 0.0);
}

TEST_CASE("objective histories are non-increasing") {
  const NetworkConfig cfg = make_network(1, 1, {4, 1}, {1, 2});
  for (Scheme sc : {Scheme::SSCC, Scheme::JSCC, Scheme::Uncoded}) {
    const SchemeSolution s = solve_scheme(cfg, 0.6, sc);
    CHECK_FALSE(s.objective_history.empty());
    for (std::size_t k = 1; k < s.objective_history.size(); ++k) {
      CHECK(s.objective_history[k] <= s.objective_history[k - 1]);
    }
    CHECK(s.rejected_increase <= 1e-8);
  }
}
