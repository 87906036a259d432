#include "macpower/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "macpower/error.hpp"

namespace macpower {

namespace {

constexpr double kLn4 = 1.3862943611198906;  // ln 2^2

void check_rates(const NetworkConfig& cfg, std::span<const double> rates) {
  if (rates.size() != cfg.size()) throw Error(ErrorCode::IndexOutOfRange, "rate vector length != L");
  for (double r : rates) {
    if (!(r >= 0.0)) throw Error(ErrorCode::NegativeRate, "rates must be >= 0");
  }
}

std::string chain_label(std::span<const std::size_t> perm, std::size_t upto) {
  std::ostringstream os;
  os << "S{";
  for (std::size_t k = 0; k < upto; ++k) os << (k ? "," : "") << perm[k];
  os << "}";
  return os.str();
}

}  // namespace

std::vector<std::size_t> optimal_permutation(const NetworkConfig& cfg) {
  std::vector<std::size_t> p(cfg.size());
  std::iota(p.begin(), p.end(), 0);
  std::stable_sort(p.begin(), p.end(),
                   [&](std::size_t a, std::size_t b) { return cfg.gains[a] < cfg.gains[b]; });
  return p;
}

std::vector<std::size_t> optimal_channel_decoding_order(const NetworkConfig& cfg) {
  std::vector<std::size_t> p(cfg.size());
  std::iota(p.begin(), p.end(), 0);
  std::stable_sort(p.begin(), p.end(),
                   [&](std::size_t a, std::size_t b) { return cfg.gains[a] > cfg.gains[b]; });
  return p;
}

double contra_polymatroid_rank(std::span<const double> rates, SensorSet s) {
  double sum = 0.0;
  for (std::size_t i : s.indices()) sum += rates[i];
  return std::expm1(kLn4 * sum);
}

bool in_contra_polymatroid(std::span<const double> x, std::span<const double> rates, double tol) {
  const std::size_t n = rates.size();
  if (n > kMaxSubsetSensors) throw Error(ErrorCode::TooManySensors, "L <= 20 required");
  for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
    const SensorSet s(bits);
    double sum = 0.0;
    for (std::size_t i : s.indices()) sum += x[i];
    if (sum < contra_polymatroid_rank(rates, s) - tol) return false;
  }
  return true;
}

OrderSolution vertex_power_allocation(const NetworkConfig& cfg, std::span<const double> rates,
                                      std::span<const std::size_t> permutation) {
  check_rates(cfg, rates);
  if (permutation.size() != cfg.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "permutation length != L");
  }
  OrderSolution sol;
  sol.permutation.assign(permutation.begin(), permutation.end());
  sol.decode_order.assign(permutation.rbegin(), permutation.rend());
  sol.powers.assign(cfg.size(), 0.0);
  double log_f = 0.0;
  for (std::size_t k = 0; k < permutation.size(); ++k) {
    const std::size_t i = permutation[k];
    if (i >= cfg.size()) throw Error(ErrorCode::IndexOutOfRange, "bad permutation entry");
    const double x = std::exp(log_f) * std::expm1(kLn4 * rates[i]);
    log_f += kLn4 * rates[i];
    sol.powers[i] = cfg.sigma_w2 * x / cfg.gains[i];
    sol.total_power += sol.powers[i];
    sol.active_constraints.push_back(chain_label(permutation, k + 1));
  }
  return sol;
}

OrderSolution vertex_power_allocation(const NetworkConfig& cfg, std::span<const double> rates) {
  const auto perm = optimal_permutation(cfg);
  return vertex_power_allocation(cfg, rates, perm);
}

double vertex_total_power(const NetworkConfig& cfg, std::span<const double> rates,
                          std::span<const std::size_t> permutation) {
  check_rates(cfg, rates);
  const std::size_t n = permutation.size();
  double total = 0.0;
  double log_f = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    log_f += kLn4 * rates[permutation[k]];
    const double inv = 1.0 / cfg.gains[permutation[k]];
    const double next = k + 1 < n ? 1.0 / cfg.gains[permutation[k + 1]] : 0.0;
    total += (inv - next) * std::exp(log_f);
  }
  total -= 1.0 / cfg.gains[permutation[0]];
  return cfg.sigma_w2 * total;
}

EllipseAnalysis ellipse_analysis(const NetworkConfig& cfg, std::span<const double> r_tilde,
                                 double rho_tilde) {
  if (cfg.size() != 2 || r_tilde.size() != 2) {
    throw Error(ErrorCode::InvalidConfig, "two-sensor analysis needs L = 2");
  }
  if (!(rho_tilde >= 0.0 && rho_tilde < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "codeword correlation must lie in [0,1)");
  }
  EllipseAnalysis e;
  const double one_m = 1.0 - rho_tilde * rho_tilde;
  for (std::size_t i = 0; i < 2; ++i) {
    if (!(r_tilde[i] >= 0.0)) throw Error(ErrorCode::NegativeRate, "rates must be >= 0");
    e.z[i] = std::exp(kLn4 * r_tilde[i]) * one_m;
    if (!(e.z[i] > 1.0)) {
      throw Error(ErrorCode::DegenerateRates, "2^{2R~}(1 - rho~^2) must exceed 1");
    }
    e.b[i] = (e.z[i] - 1.0) * cfg.sigma_w2 / (one_m * cfg.gains[i]);
  }
  e.b[2] = cfg.sigma_w2 * (std::exp(kLn4 * (r_tilde[0] + r_tilde[1])) * one_m - 1.0);

  const double g1 = cfg.gains[0];
  const double g2 = cfg.gains[1];
  const double c = rho_tilde * std::sqrt(g1 * g2);
  const double mid = 0.5 * (g1 + g2);
  const double rad = std::sqrt(0.25 * (g1 - g2) * (g1 - g2) + c * c);
  e.lambda = {mid + rad, mid - rad};
  // Principal vector has nonnegative entries; the second is its rotation by +90 degrees.
  double v1 = c;
  double v2 = e.lambda[0] - g1;
  if (std::abs(v1) + std::abs(v2) == 0.0) {
    v1 = g1 >= g2 ? 1.0 : 0.0;
    v2 = g1 >= g2 ? 0.0 : 1.0;
  }
  const double nrm = std::hypot(v1, v2);
  v1 /= nrm;
  v2 /= nrm;
  e.q = {v1, -v2, v2, v1};
  const double s1 = std::sqrt(e.b[0]);
  const double s2 = std::sqrt(e.b[1]);
  e.corner_quadratic = g1 * e.b[0] + g2 * e.b[1] + 2.0 * c * s1 * s2;
  e.corner_inside = e.corner_quadratic < e.b[2];
  return e;
}

namespace {

// Positive root u of a u^2 + 2 h u + k = 0 with a > 0, or 0 when k >= 0.
double positive_root(double a, double h, double k) {
  if (k >= 0.0) return 0.0;
  return (-h + std::sqrt(h * h - a * k)) / a;
}

}  // namespace

std::array<double, 2> jscc_weak_corner(const NetworkConfig& cfg, std::span<const double> r_tilde,
                                       double rho_tilde) {
  const EllipseAnalysis e = ellipse_analysis(cfg, r_tilde, rho_tilde);
  const std::size_t weak = cfg.gains[0] < cfg.gains[1] ? 0 : 1;
  const std::size_t strong = 1 - weak;
  const double c = rho_tilde * std::sqrt(cfg.gains[0] * cfg.gains[1]);
  const double v = std::sqrt(e.b[weak]);
  const double u = positive_root(cfg.gains[strong], c * v, cfg.gains[weak] * e.b[weak] - e.b[2]);
  std::array<double, 2> p{};
  p[weak] = v * v;
  p[strong] = u * u;
  return p;
}

OrderSolution jscc_two_sensor_order(const NetworkConfig& cfg, std::span<const double> r_tilde,
                                    double rho_tilde) {
  const EllipseAnalysis e = ellipse_analysis(cfg, r_tilde, rho_tilde);
  const double g[2] = {cfg.gains[0], cfg.gains[1]};
  const double c = rho_tilde * std::sqrt(g[0] * g[1]);
  const double sb[2] = {std::sqrt(e.b[0]), std::sqrt(e.b[1])};
  const double slack = 1e-12 * std::max(1.0, e.b[2]);

  struct Candidate {
    double u, v;
    std::vector<std::string> active;
  };
  std::vector<Candidate> cands;
  if (e.corner_quadratic >= e.b[2] - slack) cands.push_back({sb[0], sb[1], {"b1", "b2"}});
  {
    const double scale = std::sqrt(e.b[2] / e.lambda[0]);
    const double u = scale * e.q[0];
    const double v = scale * e.q[2];
    if (u >= sb[0] && v >= sb[1]) cands.push_back({u, v, {"b3"}});
  }
  {
    const double u = positive_root(g[0], c * sb[1], g[1] * e.b[1] - e.b[2]);
    if (u >= sb[0]) cands.push_back({u, sb[1], {"b2", "b3"}});
  }
  {
    const double v = positive_root(g[1], c * sb[0], g[0] * e.b[0] - e.b[2]);
    if (v >= sb[1]) cands.push_back({sb[0], v, {"b1", "b3"}});
  }
  if (cands.empty()) throw Error(ErrorCode::NoFeasiblePoint, "no candidate point on the region");
  const auto best = std::min_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
    return a.u * a.u + a.v * a.v < b.u * b.u + b.v * b.v;
  });

  OrderSolution sol;
  sol.permutation = optimal_permutation(cfg);
  sol.decode_order = optimal_channel_decoding_order(cfg);
  sol.powers = {best->u * best->u, best->v * best->v};
  sol.total_power = sol.powers[0] + sol.powers[1];
  sol.active_constraints = best->active;
  return sol;
}

}  // namespace macpower
