#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "macpower/error.hpp"
#include "macpower/ordering.hpp"
#include "support.hpp"

using namespace macpower;
using doctest::Approx;

namespace {

bool has(const std::vector<std::string>& v, const char* s) { return std::find(v.begin(), v.end(), s) != v.end(); }

}  // namespace

TEST_CASE("decoding order follows channel gains") {
  const NetworkConfig three = make_network(1, 1, {1, 4, 2}, {1, 1, 1});
  CHECK(optimal_channel_decoding_order(three) == std::vector<std::size_t>{1, 2, 0});
  CHECK(optimal_permutation(three) == std::vector<std::size_t>{0, 2, 1});
  const NetworkConfig tie = make_network(1, 1, {1, 1}, {1, 1});
  CHECK(optimal_channel_decoding_order(tie) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("decoding order ignores measurement noise") {
  testing_support::Draw draw(53);
  for (int k = 0; k < 200; ++k) {
    NetworkConfig cfg = draw.network(static_cast<std::size_t>(draw.integer(2, 7)));
    const auto order = optimal_channel_decoding_order(cfg);
    std::shuffle(cfg.noise_vars.begin(), cfg.noise_vars.end(), draw.engine());
    CHECK(optimal_channel_decoding_order(cfg) == order);
  }
}

TEST_CASE("vertex allocation examples") {
  const NetworkConfig cfg = make_network(1, 1, {4, 1}, {1, 1});
  const std::vector<double> r{1, 1};
  const OrderSolution best = vertex_power_allocation(cfg, r);
  CHECK(best.permutation == std::vector<std::size_t>{1, 0});
  CHECK(best.decode_order == std::vector<std::size_t>{0, 1});
  CHECK(best.powers[0] == Approx(3.0));
  CHECK(best.powers[1] == Approx(3.0));
  CHECK(best.total_power == Approx(6.0));
  CHECK(vertex_total_power(cfg, r, best.permutation) == Approx(6.0).epsilon(1e-14));

  const std::vector<std::size_t> rev{0, 1};
  const OrderSolution worse = vertex_power_allocation(cfg, r, rev);
  CHECK(worse.total_power == Approx(12.75));
  CHECK(vertex_total_power(cfg, r, rev) == Approx(12.75).epsilon(1e-14));

  const std::vector<double> zero{0, 0};
  const OrderSolution none = vertex_power_allocation(cfg, zero);
  CHECK(none.total_power == 0.0);
  const std::vector<double> neg{-1, 0};
  CHECK_THROWS_AS(vertex_power_allocation(cfg, neg), Error);
}

TEST_CASE("contra-polymatroid rank axioms") {
  testing_support::Draw draw(59);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = static_cast<std::size_t>(draw.integer(1, 5));
    const std::vector<double> r = draw.rates(n, 0.0, 2.0);
    CHECK(contra_polymatroid_rank(r, SensorSet{}) == 0.0);
    const std::uint32_t full = (1u << n) - 1u;
    for (std::uint32_t a = 0; a <= full; ++a) {
      for (std::uint32_t b = 0; b <= full; ++b) {
        const double fa = contra_polymatroid_rank(r, SensorSet(a));
        const double fb = contra_polymatroid_rank(r, SensorSet(b));
        const double fu = contra_polymatroid_rank(r, SensorSet(a | b));
        const double fi = contra_polymatroid_rank(r, SensorSet(a & b));
        if ((a & b) == a) CHECK(fa <= fb + 1e-12);
        CHECK(fu + fi >= fa + fb - 1e-9 * std::max(1.0, fu));
      }
    }
  }
}

TEST_CASE("vertex lies in the contra-polymatroid, tight on its chain") {
  testing_support::Draw draw(61);
  for (int k = 0; k < 200; ++k) {
    const std::size_t n = static_cast<std::size_t>(draw.integer(1, 5));
    const NetworkConfig cfg = draw.network(n);
    const std::vector<double> r = draw.rates(n, 0.0, 2.0);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), draw.engine());
    const OrderSolution sol = vertex_power_allocation(cfg, r, perm);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = sol.powers[i] * cfg.gains[i] / cfg.sigma_w2;
    CHECK(in_contra_polymatroid(x, r, 1e-9));
    std::uint32_t chain = 0;
    double sum = 0.0;
    for (std::size_t i : perm) {
      chain |= 1u << i;
      sum += x[i];
      CHECK(sum == Approx(contra_polymatroid_rank(r, SensorSet(chain))).epsilon(1e-12));
    }
    CHECK(vertex_total_power(cfg, r, perm) == Approx(sol.total_power).epsilon(1e-12));
    CHECK(sol.active_constraints.size() == n);
  }
}

TEST_CASE("ascending-gain vertex beats every other permutation") {
  testing_support::Draw draw(67);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = static_cast<std::size_t>(draw.integer(2, 5));
    const NetworkConfig cfg = draw.network(n);
    const std::vector<double> r = draw.rates(n, 0.05, 2.0);
    const double best = vertex_power_allocation(cfg, r).total_power;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const auto opt = optimal_permutation(cfg);
    do {
      if (perm == opt) continue;
      CHECK(vertex_power_allocation(cfg, r, perm).total_power > best);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("ellipse analysis identities") {
  testing_support::Draw draw(71);
  int checked = 0;
  while (checked < 300) {
    NetworkConfig cfg = draw.network(2);
    if (cfg.gains[0] < cfg.gains[1]) std::swap(cfg.gains[0], cfg.gains[1]);
    if (cfg.gains[0] == cfg.gains[1]) continue;
    const double rho = draw.uniform(0.01, 0.95);
    const std::vector<double> rt = draw.rates(2, 0.0, 3.0);
    EllipseAnalysis e;
    try {
      e = ellipse_analysis(cfg, rt, rho);
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::DegenerateRates);
      continue;
    }
    ++checked;
    const double g1 = cfg.gains[0], g2 = cfg.gains[1];
    CHECK(e.lambda[0] + e.lambda[1] == Approx(g1 + g2).epsilon(1e-12));
    CHECK(e.lambda[0] > g1);
    CHECK(g1 > g2);
    CHECK(g2 > e.lambda[1]);
    CHECK(e.q[0] > std::abs(e.q[1]));
    CHECK(e.q[2] < e.q[3]);
    CHECK(e.corner_inside);
    // sqrt(b) A sqrt(b)^T - b3 = -sigma_w2/(1-rho^2) [sqrt((Z1-1)(Z2-1)) - rho]^2
    const double gap = std::sqrt((e.z[0] - 1.0) * (e.z[1] - 1.0)) - rho;
    CHECK(e.corner_quadratic - e.b[2] ==
          Approx(-cfg.sigma_w2 / (1.0 - rho * rho) * gap * gap).epsilon(1e-9).scale(e.b[2]));
  }
}

TEST_CASE("two-sensor JSCC order reference instance") {
  const NetworkConfig cfg = make_network(1, 1, {4, 1}, {1, 1});
  const std::vector<double> rt{1, 1};
  const OrderSolution s = jscc_two_sensor_order(cfg, rt, 1.0 / 3.0);
  CHECK(s.decode_order.front() == 0);
  CHECK(has(s.active_constraints, "b2"));
  CHECK(has(s.active_constraints, "b3"));
  CHECK_FALSE(has(s.active_constraints, "b1"));
  const EllipseAnalysis e = ellipse_analysis(cfg, rt, 1.0 / 3.0);
  CHECK(s.powers[0] > e.b[0]);
  CHECK(s.powers[1] == Approx(e.b[1]).epsilon(1e-12));
  const double c = std::sqrt(4.0) / 3.0;
  CHECK(4.0 * s.powers[0] + s.powers[1] + 2.0 * c * std::sqrt(s.powers[0] * s.powers[1]) ==
        Approx(e.b[2]).epsilon(1e-12));
  const auto corner = jscc_weak_corner(cfg, rt, 1.0 / 3.0);
  CHECK(corner[0] == Approx(s.powers[0]).epsilon(1e-12));
  CHECK(corner[1] == Approx(s.powers[1]).epsilon(1e-12));
}

TEST_CASE("two-sensor JSCC order edge cases") {
  const std::vector<double> rt{1.0, 0.7};
  const NetworkConfig eq = make_network(1, 1, {2, 2}, {1, 3});
  const NetworkConfig sw = make_network(1, 1, {2, 2}, {3, 1});
  const std::vector<double> rs{0.7, 1.0};
  CHECK(jscc_two_sensor_order(eq, rt, 0.3).total_power ==
        Approx(jscc_two_sensor_order(sw, rs, 0.3).total_power).epsilon(1e-9));

  testing_support::Draw draw(73);
  for (int k = 0; k < 100; ++k) {
    const NetworkConfig cfg = draw.network(2);
    const std::vector<double> r = draw.rates(2, 0.01, 3.0);
    const OrderSolution j = jscc_two_sensor_order(cfg, r, 0.0);
    const OrderSolution v = vertex_power_allocation(cfg, r);
    CHECK(j.total_power == Approx(v.total_power).epsilon(1e-9));
  }

  const NetworkConfig cfg = make_network(1, 1, {4, 1}, {1, 1});
  const std::vector<double> tiny{1.0, 0.01};
  try {
    jscc_two_sensor_order(cfg, tiny, 0.5);
    FAIL("expected DegenerateRates");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateRates);
  }
}

TEST_CASE("weak corner is optimal exactly when its KKT condition holds") {
  testing_support::Draw draw(79);
  int corner = 0, axis = 0;
  for (int k = 0; k < 1000; ++k) {
    NetworkConfig cfg = draw.network(2);
    if (cfg.gains[0] < cfg.gains[1]) std::swap(cfg.gains[0], cfg.gains[1]);
    const double rho = draw.uniform(0.01, 0.9);
    const std::vector<double> rt = draw.rates(2, 0.0, 3.0);
    OrderSolution s;
    try {
      s = jscc_two_sensor_order(cfg, rt, rho);
    } catch (const Error&) {
      continue;
    }
    const auto wc = jscc_weak_corner(cfg, rt, rho);
    const double t = std::sqrt(wc[1] / wc[0]);
    const double g1 = cfg.gains[0], g2 = cfg.gains[1];
    const double lhs = (g1 - g2) * t, rhs = rho * std::sqrt(g1 * g2) * (1.0 - t * t);
    if (std::abs(lhs - rhs) < 1e-6 * std::max(lhs, rhs)) continue;
    if (lhs > rhs) {
      ++corner;
      CHECK(has(s.active_constraints, "b2"));
      CHECK(has(s.active_constraints, "b3"));
      CHECK(s.total_power == Approx(wc[0] + wc[1]).epsilon(1e-9));
    } else {
      ++axis;
      CHECK(s.total_power < wc[0] + wc[1]);
    }
  }
  CHECK(corner > 0);
  MESSAGE("weak corner optimal on " << corner << " draws, interior axis point on " << axis);
}
