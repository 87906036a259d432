#include "macpower/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "macpower/error.hpp"
#include "macpower/gaussian_info.hpp"
#include "macpower/ordering.hpp"

namespace macpower {

namespace {

constexpr double kLn4 = 1.3862943611198906;
constexpr double kPowerFloor = 1e-10;

void check_distortion(double sigma_s2, double d) {
  if (!(d > 0.0 && d < sigma_s2)) {
    throw Error(ErrorCode::InvalidDistortion, "distortion must lie in (0, sigma_s2)");
  }
}

void require_feasible(const NetworkConfig& cfg, double d) {
  const FeasibilityReport rep = validate_feasibility(cfg, DistortionTarget{d});
  if (!rep.feasible) {
    std::ostringstream os;
    os << "target D=" << d << " is not above d_min=" << rep.d_min;
    throw Error(ErrorCode::Infeasible, os.str());
  }
}

// Per-sensor rate that meets D with equal rates on every sensor.
double equal_rate(const NetworkConfig& cfg, double d) {
  double info = 0.0;
  for (double n : cfg.noise_vars) info += 1.0 / n;
  const double frac = (1.0 / d - 1.0 / cfg.sigma_s2) / info;
  return -0.5 * std::log2(1.0 - frac);
}

Monomial var(VarId id, double e = 1.0, double c = 1.0) { return Monomial(c, {{id, e}}); }

double sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

SchemeSolution finish(Scheme scheme, const SolveReport& rep) {
  SchemeSolution sol;
  sol.scheme = scheme;
  sol.status = rep.status;
  sol.outer_iterations = rep.outer_iterations;
  sol.inner_iterations = rep.inner_iterations;
  sol.objective_history = rep.objective_history;
  sol.rejected_increase = rep.rejected_increase;
  return sol;
}

}  // namespace

SymmetricPowers symmetric_closed_forms(std::size_t sensors, double sigma_s2, double sigma_n2,
                                       double d) {
  if (sensors == 0) throw Error(ErrorCode::InvalidConfig, "at least one sensor is required");
  if (!(sigma_s2 > 0.0) || !(sigma_n2 > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "variances must be > 0");
  }
  check_distortion(sigma_s2, d);
  const double l = static_cast<double>(sensors);
  SymmetricPowers p;
  p.lambda = sigma_n2 / l * (1.0 / d - 1.0 / sigma_s2);
  if (!(p.lambda < 1.0)) {
    throw Error(ErrorCode::InfeasibleSymmetric, "(sigma_n2/L)(1/D - 1/sigma_s2) must be < 1");
  }
  const double a = sigma_s2 / d;
  const double z_l = std::exp(-l * std::log1p(-p.lambda));  // (2^{2r})^L
  p.r = -0.5 * std::log1p(-p.lambda) / std::log(2.0);
  p.p_s = -1.0 / l + a * z_l / l;
  p.p_j = (a * z_l - 1.0) * (l + a - 1.0) / (l * l * a);
  p.rho_tilde = (a - 1.0) / (l + a - 1.0);
  p.p_j_alt = (a * z_l - 1.0) / (l * (1.0 + (l - 1.0 / l) * p.rho_tilde));
  const double w = sigma_s2 + sigma_n2;
  p.p_a = (a - 1.0) / (l * l * sigma_s2 / w - l * (a - 1.0) * sigma_n2 / w);
  p.p_lob = (a - 1.0) / (l + (l * l - l) * sigma_s2 / w);
  p.q_l = 1.0 - w * p.rho_tilde / sigma_s2;
  return p;
}

SymmetricCrossCheck symmetric_cross_check(std::size_t sensors, double sigma_s2, double sigma_n2,
                                          double d) {
  const SymmetricPowers p = symmetric_closed_forms(sensors, sigma_s2, sigma_n2, d);
  const double l = static_cast<double>(sensors);
  const double a = sigma_s2 / d;
  SymmetricCrossCheck c;
  c.p_a_via_q = (1.0 / p.q_l - 1.0) / l;
  c.p_j_via_q = (std::pow((1.0 - p.rho_tilde) / p.q_l, l - 1.0) / p.q_l - (l - 1.0 + a) / (l * a)) / l;
  return c;
}

double uncoded_mse(const NetworkConfig& cfg, std::span<const double> powers) {
  const std::size_t n = cfg.size();
  if (powers.size() != n) throw Error(ErrorCode::IndexOutOfRange, "powers length != L");
  double num = cfg.sigma_w2;
  double den = cfg.sigma_w2;
  for (std::size_t i = 0; i < n; ++i) {
    const double pg = powers[i] * cfg.gains[i];
    num += pg * cfg.noise_vars[i] / (cfg.sigma_s2 + cfg.noise_vars[i]);
    den += pg;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) den += measurement_correlation(cfg, i, j) * std::sqrt(pg * powers[j] * cfg.gains[j]);
    }
  }
  return cfg.sigma_s2 * num / den;
}

namespace {

// mse(c s) -> sigma_s2 s'Ks / s'Ms in the amplitudes s_i = sqrt(P_i); the infimum is
// sigma_s2 / lambda_max(K^-1/2 M K^-1/2), reached along s = K^-1/2 e_max.
struct UncodedLimit {
  double mse = 0.0;
  std::vector<double> amplitude;
};

UncodedLimit uncoded_limit(const NetworkConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(cfg.size());
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd k_isqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k_isqrt(i) = 1.0 / std::sqrt(cfg.gains[i] * cfg.noise_vars[i] / (cfg.sigma_s2 + cfg.noise_vars[i]));
    for (Eigen::Index j = 0; j < n; ++j) {
      const double rho = i == j ? 1.0 : measurement_correlation(cfg, i, j);
      m(i, j) = rho * std::sqrt(cfg.gains[i] * cfg.gains[j]);
    }
  }
  const Eigen::MatrixXd s = k_isqrt.asDiagonal() * m * k_isqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s);
  UncodedLimit out;
  out.mse = cfg.sigma_s2 / eig.eigenvalues()(n - 1);
  const Eigen::VectorXd e = eig.eigenvectors().col(n - 1);
  const double sign = e.sum() < 0.0 ? -1.0 : 1.0;
  for (Eigen::Index i = 0; i < n; ++i) out.amplitude.push_back(std::abs(sign * e(i) * k_isqrt(i)));
  return out;
}

}  // namespace

double uncoded_high_power_limit(const NetworkConfig& cfg) { return uncoded_limit(cfg).mse; }

SchemeSolution minimize_power_uncoded(const NetworkConfig& cfg, double d,
                                      const SchemeOptions& opts) {
  cfg.validate();
  if (d >= cfg.sigma_s2) return degenerate_solution(cfg, Scheme::Uncoded);
  require_feasible(cfg, d);
  const UncodedLimit limit = uncoded_limit(cfg);
  if (!(d > limit.mse)) {
    std::ostringstream os;
    os << "uncoded distortion cannot go below " << limit.mse;
    throw Error(ErrorCode::Infeasible, os.str());
  }
  const std::size_t n = cfg.size();

  // Start: equal powers scaled until the target is met, then 10x.
  std::vector<double> dir(n, 1.0);
  std::vector<double> p(n);
  double scale = 1.0;
  auto mse_at = [&](double c) {
    for (std::size_t i = 0; i < n; ++i) p[i] = c * dir[i];
    return uncoded_mse(cfg, p);
  };
  int doubling = 0;
  while (mse_at(scale) > d && doubling < 200) {
    scale *= 2.0;
    ++doubling;
  }
  if (mse_at(scale) > d) {
    // Equal powers cannot reach D; follow the limiting direction instead.
    for (std::size_t i = 0; i < n; ++i) dir[i] = limit.amplitude[i] * limit.amplitude[i];
    scale = 1.0;
    for (doubling = 0; mse_at(scale) > d && doubling < 400; ++doubling) scale *= 2.0;
  }

  GpProblem gp;
  std::vector<VarId> s(n);
  for (std::size_t i = 0; i < n; ++i) {
    s[i] = gp.add_variable("s" + std::to_string(i + 1), std::sqrt(kPowerFloor));
    gp.objective.terms.push_back(var(s[i], 2.0));
  }
  const double a = cfg.sigma_s2 / d;
  Posynomial lhs{Monomial(a)};
  Posynomial rhs{Monomial(1.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double k = cfg.gains[i] * cfg.noise_vars[i] /
                     ((cfg.sigma_s2 + cfg.noise_vars[i]) * cfg.sigma_w2);
    lhs.terms.push_back(var(s[i], 2.0, a * k));
    rhs.terms.push_back(var(s[i], 2.0, cfg.gains[i] / cfg.sigma_w2));
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = 2.0 * measurement_correlation(cfg, i, j) *
                       std::sqrt(cfg.gains[i] * cfg.gains[j]) / cfg.sigma_w2;
      rhs.terms.push_back(Monomial(c, {{s[i], 1.0}, {s[j], 1.0}}));
    }
  }
  gp.constraints.push_back(SignomialConstraint::leq(lhs, rhs, "mse"));

  std::vector<double> init(n);
  for (std::size_t i = 0; i < n; ++i) init[i] = std::sqrt(std::max(10.0 * scale * dir[i], kPowerFloor));
  const SolveReport rep = solve_signomial(gp, init, opts.solver);

  SchemeSolution sol = finish(Scheme::Uncoded, rep);
  sol.powers.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.powers[i] = rep.x_star[i] * rep.x_star[i];
  sol.total_power = sum(sol.powers);
  sol.achieved_d = uncoded_mse(cfg, sol.powers);
  return sol;
}

namespace {

struct SsccStart {
  std::vector<double> z;
  double y = 1.0;
  std::vector<double> p;
};

SsccStart coded_start(const NetworkConfig& cfg, double d) {
  SsccStart s;
  const double r = equal_rate(cfg, d);
  // A little extra rate keeps the distortion constraint strictly slack.
  const double r0 = std::min(r * 1.1 + 0.05, r + 2.0);
  double prod = 1.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    s.z.push_back(std::exp(kLn4 * r0));
    prod *= s.z.back();
  }
  s.y = 2.0 * prod * cfg.sigma_s2 / d;
  const double need = 10.0 * std::pow(s.y, static_cast<double>(cfg.size()));
  for (std::size_t i = 0; i < cfg.size(); ++i) s.p.push_back(need * cfg.sigma_w2 / cfg.gains[i]);
  return s;
}

// D^{-1} + sum sigma_N^{-2} z^{-1} <= sigma_s^{-2} + sum sigma_N^{-2}
SignomialConstraint distortion_constraint(const NetworkConfig& cfg, double d,
                                          std::span<const VarId> z) {
  double rhs = 1.0 / cfg.sigma_s2;
  for (double n : cfg.noise_vars) rhs += 1.0 / n;
  Posynomial p{Monomial(1.0 / (d * rhs))};
  for (std::size_t i = 0; i < z.size(); ++i) {
    p.terms.push_back(var(z[i], -1.0, 1.0 / (cfg.noise_vars[i] * rhs)));
  }
  return SignomialConstraint::leq_one(std::move(p), "distortion");
}

std::vector<double> rates_from_z(std::span<const double> x, std::span<const VarId> z) {
  std::vector<double> r;
  for (VarId id : z) r.push_back(std::max(0.0, 0.5 * std::log2(x[id])));
  return r;
}

void check_two(const NetworkConfig& cfg) {
  if (cfg.size() != 2) throw Error(ErrorCode::InvalidConfig, "this solver needs L = 2");
}

}  // namespace

SchemeSolution minimize_power_sscc_alpha(const NetworkConfig& cfg, double d, double alpha,
                                         const SchemeOptions& opts) {
  cfg.validate();
  check_two(cfg);
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidConfig, "alpha outside [0,1]");
  if (d >= cfg.sigma_s2) return degenerate_solution(cfg, Scheme::SSCC);
  require_feasible(cfg, d);

  GpProblem gp;
  const VarId p1 = gp.add_variable("P1", kPowerFloor);
  const VarId p2 = gp.add_variable("P2", kPowerFloor);
  const VarId y1 = gp.add_variable("y1", 1.0);
  const VarId y2 = gp.add_variable("y2", 1.0);
  const VarId z1 = gp.add_variable("z1", 1.0);
  const VarId z2 = gp.add_variable("z2", 1.0);
  gp.objective = Posynomial{var(p1), var(p2)};

  const double k1 = cfg.gains[0] / cfg.sigma_w2;
  const double k2 = cfg.gains[1] / cfg.sigma_w2;
  const Posynomial one_p1{Monomial(1.0), var(p1, 1.0, k1)};
  const Posynomial one_p2{Monomial(1.0), var(p2, 1.0, k2)};
  const Posynomial one_both{Monomial(1.0), var(p1, 1.0, k1), var(p2, 1.0, k2)};

  SignomialConstraint c11 = SignomialConstraint::leq(var(y1), Monomial(1.0), "(1,1)");
  c11.lhs_factors = {{one_p2, 1.0 - alpha}};
  c11.rhs_factors = {{one_p1, alpha}, {one_both, 1.0 - alpha}};
  SignomialConstraint c12 = SignomialConstraint::leq(var(y2), Monomial(1.0), "(1,2)");
  c12.lhs_factors = {{one_p1, alpha}};
  c12.rhs_factors = {{one_p2, 1.0 - alpha}, {one_both, alpha}};
  gp.constraints.push_back(std::move(c11));
  gp.constraints.push_back(std::move(c12));

  const double s = cfg.sigma_s2;
  const double n1 = cfg.noise_vars[0];
  const double n2 = cfg.noise_vars[1];
  gp.constraints.push_back(SignomialConstraint::leq_one(
      Posynomial{var(z2, -1.0, s / (n2 + s)),
                 Monomial(s * n2 / (d * (n2 + s)), {{y1, -1.0}, {z1, 1.0}})},
      "(1,3)"));
  gp.constraints.push_back(SignomialConstraint::leq_one(
      Posynomial{var(z1, -1.0, s / (n1 + s)),
                 Monomial(s * n1 / (d * (n1 + s)), {{y2, -1.0}, {z2, 1.0}})},
      "(1,4)"));
  gp.constraints.push_back(SignomialConstraint::leq_one(
      Monomial(s / d, {{z1, 1.0}, {z2, 1.0}, {y1, -1.0}, {y2, -1.0}}), "(1,5)"));
  const VarId zs[2] = {z1, z2};
  gp.constraints.push_back(distortion_constraint(cfg, d, zs));

  const SsccStart st = coded_start(cfg, d);
  const std::vector<double> init{st.p[0], st.p[1], st.y, st.y, st.z[0], st.z[1]};
  const SolveReport rep = solve_signomial(gp, init, opts.solver);

  SchemeSolution sol = finish(Scheme::SSCC, rep);
  sol.alpha = alpha;
  sol.powers = {rep.x_star[p1], rep.x_star[p2]};
  sol.total_power = sol.powers[0] + sol.powers[1];
  sol.r = rates_from_z(rep.x_star, zs);
  sol.rates = {0.5 * std::log2(rep.x_star[y1]), 0.5 * std::log2(rep.x_star[y2])};
  sol.achieved_d = distortion_from_r(cfg, sol.r);
  return sol;
}

SchemeSolution minimize_power_sscc(const NetworkConfig& cfg, double d, const SchemeOptions& opts) {
  cfg.validate();
  check_two(cfg);
  if (d >= cfg.sigma_s2) return degenerate_solution(cfg, Scheme::SSCC);
  require_feasible(cfg, d);
  const int n = std::max(2, opts.alpha_grid);

  SchemeSolution best;
  best.total_power = std::numeric_limits<double>::infinity();
  best.status = SolveStatus::Infeasible;
  int best_k = -1;
  int outer = 0;
  int inner = 0;
  auto eval = [&](double alpha) {
    SchemeSolution s = minimize_power_sscc_alpha(cfg, d, alpha, opts);
    outer += s.outer_iterations;
    inner += s.inner_iterations;
    const double v = s.status == SolveStatus::Infeasible ? std::numeric_limits<double>::infinity()
                                                         : s.total_power;
    if (v < best.total_power) best = std::move(s);
    return v;
  };
  std::vector<double> grid(n);
  for (int k = 0; k < n; ++k) {
    const double before = best.total_power;
    grid[k] = eval(static_cast<double>(k) / (n - 1));
    if (best.total_power < before) best_k = k;
  }
  if (opts.refine_alpha && best_k >= 0) {
    double lo = static_cast<double>(std::max(0, best_k - 1)) / (n - 1);
    double hi = static_cast<double>(std::min(n - 1, best_k + 1)) / (n - 1);
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double fa = eval(a);
    double fb = eval(b);
    while (hi - lo > 1e-3) {
      if (fa < fb) {
        hi = b;
        b = a;
        fb = fa;
        a = hi - phi * (hi - lo);
        fa = eval(a);
      } else {
        lo = a;
        a = b;
        fa = fb;
        b = lo + phi * (hi - lo);
        fb = eval(b);
      }
    }
  }
  best.outer_iterations = outer;
  best.inner_iterations = inner;
  return best;
}

SchemeSolution minimize_power_sscc_general(const NetworkConfig& cfg, double d,
                                           const SchemeOptions& opts) {
  cfg.validate();
  const std::size_t n = cfg.size();
  if (n > 12) throw Error(ErrorCode::TooManySensors, "subset-constrained SSCC supports L <= 12");
  if (d >= cfg.sigma_s2) return degenerate_solution(cfg, Scheme::SSCC);
  require_feasible(cfg, d);

  GpProblem gp;
  std::vector<VarId> p(n), z(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = gp.add_variable("P" + std::to_string(i + 1), kPowerFloor);
  for (std::size_t i = 0; i < n; ++i) z[i] = gp.add_variable("z" + std::to_string(i + 1), 1.0);
  for (VarId id : p) gp.objective.terms.push_back(var(id));

  for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
    const SensorSet s(bits);
    Posynomial cap{Monomial(1.0)};
    Monomial prod(1.0);
    double c = 1.0 / cfg.sigma_s2;
    for (std::size_t i = 0; i < n; ++i) {
      if (s.contains(i)) {
        cap.terms.push_back(var(p[i], 1.0, cfg.gains[i] / cfg.sigma_w2));
        prod = prod * var(z[i]);
      } else {
        c += 1.0 / cfg.noise_vars[i];
      }
    }
    Posynomial lhs{prod};
    for (std::size_t j = 0; j < n; ++j) {
      if (!s.contains(j)) lhs = lhs + cap * var(z[j], -1.0, d / cfg.noise_vars[j]);
    }
    Posynomial rhs = cap * Monomial(d * c);
    std::ostringstream label;
    label << "S" << bits;
    gp.constraints.push_back(SignomialConstraint::leq(std::move(lhs), std::move(rhs), label.str()));
  }
  gp.constraints.push_back(distortion_constraint(cfg, d, z));

  const SsccStart st = coded_start(cfg, d);
  std::vector<double> init = st.p;
  init.insert(init.end(), st.z.begin(), st.z.end());
  const SolveReport rep = solve_signomial(gp, init, opts.solver);

  SchemeSolution sol = finish(Scheme::SSCC, rep);
  for (VarId id : p) sol.powers.push_back(rep.x_star[id]);
  sol.total_power = sum(sol.powers);
  sol.r = rates_from_z(rep.x_star, z);
  sol.achieved_d = distortion_from_r(cfg, sol.r);
  // Source rates at the vertex of the Slepian-Wolf region along ascending gains.
  const auto perm = optimal_permutation(cfg);
  sol.rates.assign(n, 0.0);
  double prev = 0.0;
  std::uint32_t bits = 0;
  for (std::size_t k = 0; k < n; ++k) {
    bits |= 1u << perm[k];
    const double cur = ceo_rate_lhs(cfg, sol.r, SensorSet(bits), sol.achieved_d,
                                    DistortionCheck::Override);
    sol.rates[perm[k]] = std::max(0.0, cur - prev);
    prev = cur;
  }
  return sol;
}

SchemeSolution minimize_power_jscc(const NetworkConfig& cfg, double d, const SchemeOptions& opts) {
  cfg.validate();
  check_two(cfg);
  if (d >= cfg.sigma_s2) return degenerate_solution(cfg, Scheme::JSCC);
  require_feasible(cfg, d);

  const double s = cfg.sigma_s2;
  const double w = cfg.sigma_w2;
  const double g[2] = {cfg.gains[0], cfg.gains[1]};
  const double nv[2] = {cfg.noise_vars[0], cfg.noise_vars[1]};

  const SsccStart st = coded_start(cfg, d);
  std::vector<double> x{st.p[0], st.p[1], st.z[0], st.z[1]};
  auto rho_at = [&](const std::vector<double>& v) {
    if (opts.jscc_zero_rho) return 0.0;
    const double r[2] = {std::max(0.0, 0.5 * std::log2(v[2])), std::max(0.0, 0.5 * std::log2(v[3]))};
    return codeword_correlation(cfg, 0, 1, r[0], r[1]);
  };

  SchemeSolution sol;
  sol.scheme = Scheme::JSCC;
  sol.status = SolveStatus::MaxIter;
  double rho = rho_at(x);
  for (int round = 0; round < opts.jscc_max_rounds; ++round) {
    GpProblem gp;
    const VarId p[2] = {gp.add_variable("P1", kPowerFloor), gp.add_variable("P2", kPowerFloor)};
    const VarId z[2] = {gp.add_variable("z1", 1.0), gp.add_variable("z2", 1.0)};
    gp.objective = Posynomial{var(p[0]), var(p[1])};
    const double one_m = 1.0 - rho * rho;
    for (int i = 0; i < 2; ++i) {
      const int j = 1 - i;
      const double k = g[i] * one_m / w;
      const double c = 1.0 / s + 1.0 / nv[j];
      const Posynomial cap{Monomial(1.0), var(p[i], 1.0, k)};
      Posynomial lhs = Posynomial{var(z[i])} + cap * var(z[j], -1.0, d / nv[j]);
      gp.constraints.push_back(SignomialConstraint::leq(std::move(lhs), cap * Monomial(d * c),
                                                        i == 0 ? "(1)" : "(2)"));
    }
    Posynomial sum_rhs{Monomial(1.0), var(p[0], 1.0, g[0] / w), var(p[1], 1.0, g[1] / w)};
    if (rho > 0.0) {
      sum_rhs.terms.push_back(
          Monomial(2.0 * rho * std::sqrt(g[0] * g[1]) / w, {{p[0], 0.5}, {p[1], 0.5}}));
    }
    gp.constraints.push_back(SignomialConstraint::leq(
        Monomial(s / d, {{z[0], 1.0}, {z[1], 1.0}}), std::move(sum_rhs), "(3)"));
    gp.constraints.push_back(distortion_constraint(cfg, d, z));

    const SolveReport rep = solve_signomial(gp, x, opts.solver);
    sol.outer_iterations += rep.outer_iterations;
    sol.inner_iterations += rep.inner_iterations;
    sol.objective_history = rep.objective_history;
    sol.rejected_increase = rep.rejected_increase;
    if (rep.status == SolveStatus::Infeasible) {
      sol.status = SolveStatus::Infeasible;
      break;
    }
    x = rep.x_star;
    const double next = rho_at(x);
    const bool settled = std::abs(next - rho) < opts.jscc_rho_tol;
    rho = next;
    if (settled) {
      sol.status = rep.status;
      break;
    }
  }

  sol.powers = {x[0], x[1]};
  const VarId zid[2] = {2, 3};
  sol.r = rates_from_z(x, zid);
  for (std::size_t i = 0; i < 2; ++i) sol.rates.push_back(quantizer_rate_from_r(cfg, i, sol.r[i]));
  sol.achieved_d = distortion_from_r(cfg, sol.r);

  if (!opts.jscc_zero_rho && sol.status != SolveStatus::Infeasible) {
    auto ok = [&](double f) {
      const std::vector<double> pp{x[0] * f, x[1] * f};
      return check_feasible(cfg, pp, sol.r, d, CodingScheme::Joint).feasible;
    };
    if (!ok(1.0)) {
      double hi = 1.0 + 1e-9;
      while (!ok(hi) && hi < 1e6) hi = 1.0 + 2.0 * (hi - 1.0);
      double lo = 1.0;
      for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
      }
      sol.powers = {x[0] * hi, x[1] * hi};
      std::ostringstream os;
      os << "powers scaled by " << hi << " to pass the subset check";
      sol.note = os.str();
    }
  }
  sol.total_power = sol.powers[0] + sol.powers[1];

  // One silent sensor gives rho~ = 0; the fixed point only reaches that face asymptotically.
  if (!opts.jscc_zero_rho && sol.status != SolveStatus::Infeasible) {
    const double need = 1.0 / d - 1.0 / s;
    for (std::size_t i = 0; i < 2; ++i) {
      const double keep = 1.0 - nv[i] * need;
      if (!(keep > 0.0)) continue;
      std::vector<double> r(2, 0.0);
      r[i] = -0.5 * std::log2(keep);
      std::vector<double> pw(2, 0.0);
      pw[i] = w * std::expm1(kLn4 * quantizer_rate_from_r(cfg, i, r[i])) / g[i];
      for (int bump = 0; bump < 60 && !check_feasible(cfg, pw, r, d, CodingScheme::Joint).feasible;
           ++bump) {
        pw[i] *= 1.0 + 1e-12 * std::ldexp(1.0, bump);
      }
      if (!check_feasible(cfg, pw, r, d, CodingScheme::Joint).feasible) continue;
      if (pw[i] < sol.total_power) {
        sol.powers = pw;
        sol.r = r;
        sol.rates = {quantizer_rate_from_r(cfg, 0, r[0]), quantizer_rate_from_r(cfg, 1, r[1])};
        sol.achieved_d = distortion_from_r(cfg, r);
        sol.total_power = pw[i];
        sol.status = SolveStatus::Converged;
        sol.note = "single active sensor";
      }
    }
  }
  return sol;
}

SchemeSolution lower_bound_power(const NetworkConfig& cfg, double d) {
  cfg.validate();
  if (d >= cfg.sigma_s2) return degenerate_solution(cfg, Scheme::LowerBound);
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidDistortion, "distortion must be > 0");
  const auto n = static_cast<Eigen::Index>(cfg.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = (i == j ? 1.0 : measurement_correlation(cfg, i, j)) *
                std::sqrt(cfg.gains[i] * cfg.gains[j]) / cfg.sigma_w2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const double top = eig.eigenvalues()(n - 1);
  const Eigen::VectorXd v = eig.eigenvectors().col(n - 1);
  SchemeSolution sol;
  sol.scheme = Scheme::LowerBound;
  sol.total_power = (cfg.sigma_s2 / d - 1.0) / top;
  for (Eigen::Index i = 0; i < n; ++i) sol.powers.push_back(sol.total_power * v(i) * v(i));
  sol.achieved_d = d;
  return sol;
}

SchemeSolution solve_scheme(const NetworkConfig& cfg, double d, Scheme scheme,
                            const SchemeOptions& opts) {
  cfg.validate();
  if (d >= cfg.sigma_s2) return degenerate_solution(cfg, scheme);
  switch (scheme) {
    case Scheme::LowerBound:
      return lower_bound_power(cfg, d);
    case Scheme::Uncoded:
      return minimize_power_uncoded(cfg, d, opts);
    case Scheme::SSCC:
      return cfg.size() == 2 ? minimize_power_sscc(cfg, d, opts)
                             : minimize_power_sscc_general(cfg, d, opts);
    case Scheme::JSCC: {
      if (cfg.size() == 2) return minimize_power_jscc(cfg, d, opts);
      if (!cfg.is_symmetric()) {
        throw Error(ErrorCode::Unsupported, "JSCC optimizer needs L = 2 or a symmetric network");
      }
      require_feasible(cfg, d);
      const SymmetricPowers sp =
          symmetric_closed_forms(cfg.size(), cfg.sigma_s2, cfg.noise_vars[0], d);
      SchemeSolution sol;
      sol.scheme = Scheme::JSCC;
      sol.powers.assign(cfg.size(), sp.p_j * cfg.sigma_w2 / cfg.gains[0]);
      sol.r.assign(cfg.size(), sp.r);
      sol.rates.assign(cfg.size(), quantizer_rate_from_r(cfg, 0, sp.r));
      sol.total_power = sum(sol.powers);
      sol.achieved_d = distortion_from_r(cfg, sol.r);
      sol.note = "symmetric closed form";
      return sol;
    }
  }
  throw Error(ErrorCode::Unsupported, "unknown scheme");
}

}  // namespace macpower
