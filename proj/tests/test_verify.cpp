#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "macpower/error.hpp"
#include "macpower/gaussian_info.hpp"
#include "macpower/ordering.hpp"
#include "macpower/schemes.hpp"
#include "macpower/verify.hpp"
#include "support.hpp"

using namespace macpower;
using doctest::Approx;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Unsupported;
}

// Instance with a target strictly between the uncoded floor and the prior.
struct Instance {
  NetworkConfig cfg;
  double d;
};

Instance draw_instance(testing_support::Draw& draw) {
  Instance in{draw.network(2), 0.0};
  const double f = uncoded_high_power_limit(in.cfg);
  in.d = f + draw.uniform(0.1, 0.9) * (in.cfg.sigma_s2 - f);
  return in;
}

}  // namespace

TEST_CASE("splitmix64 reference value") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(1) != splitmix64(2));
}

TEST_CASE("Monte Carlo uncoded MSE on the reference instance") {
  const NetworkConfig cfg = testing_support::b1();
  const std::vector<double> p{1, 1};
  const OracleResult mc = simulate_uncoded(cfg, p, 1'000'000, 7);
  CHECK(uncoded_mse(cfg, p) == Approx(0.5));
  CHECK(mc.uncertainty > 0.0);
  CHECK(mc.uncertainty < 1e-3);
  CHECK(std::abs(mc.value - 0.5) < 3.0 * mc.uncertainty);
  CHECK(mc.evaluations == 1'000'000);

  const std::vector<double> zero{0, 0};
  const OracleResult prior = simulate_uncoded(cfg, zero, 200'000, 8);
  CHECK(std::abs(prior.value - cfg.sigma_s2) < 3.0 * prior.uncertainty);
}

TEST_CASE("Monte Carlo is reproducible and independent of Exec") {
  const NetworkConfig cfg = make_network(1.3, 0.7, {2.0, 0.4, 1.1}, {0.5, 2.0, 1.0});
  const std::vector<double> p{0.3, 1.7, 0.9};
  const OracleResult a = simulate_uncoded(cfg, p, 300'001, 11);
  const OracleResult b = simulate_uncoded(cfg, p, 300'001, 11);
  const OracleResult c = simulate_uncoded(cfg, p, 300'001, 11, Exec::Parallel);
  CHECK(a.value == b.value);
  CHECK(a.value == c.value);
  CHECK(a.uncertainty == c.uncertainty);
  CHECK(simulate_uncoded(cfg, p, 300'001, 12).value != a.value);
}

TEST_CASE("Monte Carlo matches the closed form on random instances") {
  testing_support::Draw draw(81);
  for (int k = 0; k < 10; ++k) {
    const NetworkConfig cfg = draw.network(static_cast<std::size_t>(draw.integer(1, 4)));
    std::vector<double> p;
    for (std::size_t i = 0; i < cfg.size(); ++i) p.push_back(draw.log_uniform(0.1, 10.0));
    const OracleResult mc = simulate_uncoded(cfg, p, 200'000, 100 + k);
    CHECK(std::abs(mc.value - uncoded_mse(cfg, p)) < 3.0 * mc.uncertainty);
  }
}

TEST_CASE("averaging seeds tightens Monte Carlo agreement") {
  const NetworkConfig cfg = make_network(1, 1, {2.0, 0.5}, {0.8, 1.5});
  const std::vector<double> p{1.2, 0.6};
  const double exact = uncoded_mse(cfg, p);
  constexpr int kSeeds = 20;
  constexpr std::int64_t kN = 20'000;
  std::vector<double> est;
  double se = 0.0;
  for (int s = 0; s < kSeeds; ++s) {
    const OracleResult r = simulate_uncoded(cfg, p, kN, 1000 + s);
    est.push_back(r.value);
    se = r.uncertainty;
  }
  const double mean = std::accumulate(est.begin(), est.end(), 0.0) / kSeeds;
  double var = 0.0;
  for (double e : est) var += (e - mean) * (e - mean);
  const double spread = std::sqrt(var / (kSeeds - 1));
  // The reported standard error describes the seed-to-seed spread.
  CHECK(spread > 0.5 * se);
  CHECK(spread < 2.0 * se);
  CHECK(std::abs(mean - exact) < 3.0 * se / std::sqrt(static_cast<double>(kSeeds)));
}

TEST_CASE("grid oracle on the reference instance") {
  const NetworkConfig cfg = testing_support::b1();
  const OracleResult a = grid_oracle(cfg, 0.5, Scheme::Uncoded);
  const OracleResult s = grid_oracle(cfg, 0.5, Scheme::SSCC);
  const OracleResult j = grid_oracle(cfg, 0.5, Scheme::JSCC);
  CHECK(a.value == Approx(2.0).epsilon(1e-4));
  CHECK(s.value == Approx(7.0).epsilon(1e-4));
  CHECK(j.value == Approx(5.25).epsilon(1e-4));
  for (const OracleResult* o : {&a, &s, &j}) {
    CHECK(o->uncertainty > 0.0);
    CHECK(o->evaluations > 0);
  }
  CHECK(a.value >= 2.0 - a.uncertainty);
  CHECK(s.value >= 7.0 - s.uncertainty);
  CHECK(j.value >= 5.25 - j.uncertainty);
  REQUIRE(s.argmin.size() == 4);
  const std::vector<double> rs{s.argmin[2], s.argmin[3]};
  CHECK(distortion_from_r(cfg, rs) <= 0.5 * (1.0 + 1e-9));
  CHECK(s.argmin[0] + s.argmin[1] == Approx(s.value).epsilon(1e-12));
  CHECK(a.argmin.size() == 2);
}

TEST_CASE("grid oracle is independent of Exec") {
  GridSpec coarse;
  coarse.power_points = 21;
  coarse.rate_points = 31;
  coarse.refine = 4;
  const NetworkConfig cfg = make_network(1.2, 0.8, {3.0, 0.7}, {0.6, 1.4});
  for (Scheme sc : {Scheme::Uncoded, Scheme::SSCC, Scheme::JSCC}) {
    const OracleResult a = grid_oracle(cfg, 0.45, sc, coarse, Exec::Serial);
    const OracleResult b = grid_oracle(cfg, 0.45, sc, coarse, Exec::Parallel);
    CHECK(a.value == b.value);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.argmin == b.argmin);
  }
}

TEST_CASE("grid oracle input checks") {
  const NetworkConfig three = make_network(1, 1, {1, 1, 1}, {1, 1, 1});
  CHECK(code_of([&] { grid_oracle(three, 0.5, Scheme::SSCC); }) == ErrorCode::InvalidConfig);
  const NetworkConfig cfg = testing_support::b1();
  CHECK(code_of([&] { grid_oracle(cfg, 0.5, Scheme::LowerBound); }) == ErrorCode::Unsupported);
  GridSpec bad;
  bad.rate_points = 2;
  CHECK(code_of([&] { grid_oracle(cfg, 0.5, Scheme::SSCC, bad); }) == ErrorCode::InvalidConfig);
  CHECK(grid_oracle(cfg, 1.0, Scheme::JSCC).value == 0.0);
}

TEST_CASE("solvers never beat the grid oracle") {
  testing_support::Draw draw(91);
  for (int k = 0; k < 3; ++k) {
    const Instance in = draw_instance(draw);
    for (Scheme sc : {Scheme::Uncoded, Scheme::SSCC, Scheme::JSCC}) {
      CAPTURE(k);
      CAPTURE(to_string(sc));
      const OracleResult o = grid_oracle(in.cfg, in.d, sc);
      const SchemeSolution s = solve_scheme(in.cfg, in.d, sc);
      CHECK(s.total_power >= o.value - o.uncertainty);
      CHECK(s.total_power == Approx(o.value).epsilon(0.02));
    }
  }
}

TEST_CASE("permutation oracle") {
  const NetworkConfig cfg = make_network(1, 1, {4, 1}, {1, 1});
  const std::vector<double> r{1, 1};
  const OracleResult o = permutation_oracle(cfg, r);
  CHECK(o.value == Approx(6.0));
  CHECK(o.argmin == std::vector<double>{1, 0});
  CHECK(o.evaluations == 2);

  const NetworkConfig eq = make_network(1, 1, {2, 2, 2}, {1, 3, 0.5});
  const std::vector<double> r3{0.4, 1.1, 0.7};
  const OracleResult t = permutation_oracle(eq, r3);
  std::vector<std::size_t> perm{0, 1, 2};
  do {
    CHECK(vertex_total_power(eq, r3, perm) == Approx(t.value).epsilon(1e-12));
  } while (std::next_permutation(perm.begin(), perm.end()));

  testing_support::Draw draw(97);
  for (int k = 0; k < 50; ++k) {
    const NetworkConfig c = draw.network(3);
    const std::vector<double> rr = draw.rates(3, 0.0, 2.0);
    const OracleResult b = permutation_oracle(c, rr);
    const auto expect = optimal_permutation(c);
    CHECK(b.argmin == std::vector<double>(expect.begin(), expect.end()));
    CHECK(b.value == Approx(vertex_total_power(c, rr, expect)).epsilon(1e-12));
  }

  const NetworkConfig eight = make_network(1, 1, std::vector<double>(8, 1.0), std::vector<double>(8, 1.0));
  const std::vector<double> r8(8, 0.5);
  CHECK(code_of([&] { permutation_oracle(eight, r8); }) == ErrorCode::TooManySensors);
}

TEST_CASE("direct JSCC minimum matches the ellipse analysis") {
  testing_support::Draw draw(101);
  int checked = 0;
  for (int k = 0; k < 300; ++k) {
    const NetworkConfig cfg = draw.network(2);
    const std::vector<double> r = draw.rates(2, 0.0, 3.0);
    const double rho = codeword_correlation(cfg, 0, 1, r[0], r[1]);
    const std::vector<double> rt{quantizer_rate_from_r(cfg, 0, r[0]), quantizer_rate_from_r(cfg, 1, r[1])};
    if (std::exp2(2.0 * std::min(rt[0], rt[1])) * (1.0 - rho * rho) <= 1.0 + 1e-9) continue;
    ++checked;
    const OracleResult o = jscc_direct_minimum(cfg, rt, rho);
    const OrderSolution s = jscc_two_sensor_order(cfg, rt, rho);
    CHECK(s.total_power == Approx(o.value).epsilon(1e-6));
    CHECK(o.argmin[0] == Approx(s.powers[0]).epsilon(1e-4).scale(s.total_power));
  }
  CHECK(checked > 100);
}

TEST_CASE("uncoded eigen oracle matches the solver") {
  const NetworkConfig cfg = testing_support::b1();
  CHECK(uncoded_eigen_oracle(cfg, 0.5).value == Approx(2.0).epsilon(1e-12));
  CHECK(uncoded_eigen_oracle(cfg, 2.0).value == 0.0);

  testing_support::Draw draw(103);
  for (int k = 0; k < 30; ++k) {
    const NetworkConfig c = draw.network(static_cast<std::size_t>(draw.integer(2, 4)));
    const double f = uncoded_high_power_limit(c);
    const double d = f + draw.uniform(0.05, 0.9) * (c.sigma_s2 - f);
    const OracleResult o = uncoded_eigen_oracle(c, d);
    const SchemeSolution s = minimize_power_uncoded(c, d);
    CHECK(s.total_power == Approx(o.value).epsilon(1e-5));
    CHECK(uncoded_mse(c, o.argmin) == Approx(d).epsilon(1e-9));
    CHECK(code_of([&] { uncoded_eigen_oracle(c, 0.9 * f); }) == ErrorCode::Infeasible);
  }
  const NetworkConfig c = make_network(1, 1, {2.0, 0.5}, {0.4, 2.0});
  const double near = uncoded_high_power_limit(c) * (1.0 + 1e-3);
  CHECK(minimize_power_uncoded(c, near).total_power ==
        Approx(uncoded_eigen_oracle(c, near).value).epsilon(1e-4));
}

TEST_CASE("separate-coding vertex oracle") {
  const NetworkConfig cfg = testing_support::b1();
  const OracleResult o = sscc_vertex_oracle(cfg, 0.5);
  CHECK(o.value == Approx(7.0).epsilon(1e-9));
  CHECK(o.argmin[2] == Approx(o.argmin[3]).epsilon(1e-6));
  CHECK(code_of([&] { sscc_vertex_oracle(cfg, 0.3); }) == ErrorCode::Infeasible);
}
