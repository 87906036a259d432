#include "macpower/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "macpower/error.hpp"
#include "macpower/gaussian_info.hpp"
#include "macpower/ordering.hpp"
#include "macpower/schemes.hpp"

namespace macpower {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLn4 = 1.3862943611198906;
constexpr std::int64_t kBlock = 65536;

double unit_open(std::mt19937_64& eng) {
  // (0,1]: 53 random bits
  return (static_cast<double>(eng() >> 11) + 1.0) * 0x1.0p-53;
}

class Normal {
 public:
  explicit Normal(std::uint64_t seed) : eng_(seed) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = unit_open(eng_);
    const double u2 = unit_open(eng_);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    spare_ = rad * std::sin(ang);
    has_spare_ = true;
    return rad * std::cos(ang);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

struct BlockSums {
  double e = 0.0;
  double e2 = 0.0;
};

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

OracleResult simulate_uncoded(const NetworkConfig& cfg, std::span<const double> powers,
                              std::int64_t n_samples, std::uint64_t seed, Exec exec) {
  cfg.validate();
  const std::size_t n = cfg.size();
  if (powers.size() != n) throw Error(ErrorCode::IndexOutOfRange, "powers length != L");
  if (n_samples < 1) throw Error(ErrorCode::InvalidConfig, "n_samples must be positive");

  // Y_j = a_j X_j, Z = sum sqrt(g_j) Y_j + W.
  std::vector<double> amp(n), sd_n(n);
  double cov_xz = 0.0;
  double sum_amp = 0.0;
  double var_noise = cfg.sigma_w2;
  for (std::size_t j = 0; j < n; ++j) {
    if (powers[j] < 0.0) throw Error(ErrorCode::InvalidConfig, "powers must be >= 0");
    amp[j] = std::sqrt(cfg.gains[j] * powers[j] / (cfg.sigma_s2 + cfg.noise_vars[j]));
    sd_n[j] = std::sqrt(cfg.noise_vars[j]);
    sum_amp += amp[j];
    var_noise += amp[j] * amp[j] * cfg.noise_vars[j];
  }
  cov_xz = cfg.sigma_s2 * sum_amp;
  const double var_z = cfg.sigma_s2 * sum_amp * sum_amp + var_noise;
  const double gamma = cov_xz / var_z;
  const double sd_s = std::sqrt(cfg.sigma_s2);
  const double sd_w = std::sqrt(cfg.sigma_w2);

  const std::int64_t blocks = (n_samples + kBlock - 1) / kBlock;
  std::vector<BlockSums> sums(static_cast<std::size_t>(blocks));
  auto run_block = [&](std::int64_t b) {
    Normal normal(splitmix64(seed + static_cast<std::uint64_t>(b)));
    const std::int64_t count = std::min(kBlock, n_samples - b * kBlock);
    BlockSums s;
    for (std::int64_t k = 0; k < count; ++k) {
      const double x0 = sd_s * normal();
      double z = sd_w * normal();
      for (std::size_t j = 0; j < n; ++j) z += amp[j] * (x0 + sd_n[j] * normal());
      const double e = x0 - gamma * z;
      s.e += e;
      s.e2 += e * e;
    }
    sums[static_cast<std::size_t>(b)] = s;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    for (std::int64_t b = 0; b < blocks; ++b) run_block(b);
  }

  BlockSums tot;
  for (const auto& s : sums) {
    tot.e += s.e;
    tot.e2 += s.e2;
  }
  const double nn = static_cast<double>(n_samples);
  OracleResult out;
  out.value = tot.e2 / nn;
  // Standard error of the mean of e^2, with E[e^4] = 3 E[e^2]^2 for Gaussian e.
  const double var_e2 = 2.0 * out.value * out.value;
  out.uncertainty = std::sqrt(var_e2 / nn);
  out.evaluations = n_samples;
  out.argmin = {gamma};
  return out;
}

namespace {

struct Best {
  double total = kInf;
  double p1 = 0.0, p2 = 0.0, r1 = 0.0, r2 = 0.0;
};

std::vector<double> axis(double lo, double hi, int points) {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    v[static_cast<std::size_t>(k)] = points == 1 ? lo : lo + (hi - lo) * k / (points - 1);
  }
  return v;
}

// Smallest x in [lo, hi] with pred(x), given pred(hi) and monotone pred.
template <class Pred>
double bisect_range(Pred&& pred, double lo, double hi, std::int64_t& evals) {
  if (lo <= 0.0) {
    ++evals;
    if (pred(0.0)) return 0.0;
    lo = 0.0;
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    ++evals;
    (pred(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Lower bound of a convex function on [a, d] from its values at a < b < c < d.
double convex_lower_bound(double a, double fa, double b, double fb, double c, double fc, double d,
                          double fd) {
  const double s_ab = (fb - fa) / (b - a);
  const double s_bc = (fc - fb) / (c - b);
  const double s_cd = (fd - fc) / (d - c);
  // Outside [b, c] the function lies above the b-c secant.
  double lb = std::min({fb, fc, fb + s_bc * (a - b), fc + s_bc * (d - c)});
  // Inside, above both outer secants; their maximum is smallest where they cross.
  auto left = [&](double x) { return fb + s_ab * (x - b); };
  auto right = [&](double x) { return fc + s_cd * (x - c); };
  double inner = std::min(std::max(left(b), right(b)), std::max(left(c), right(c)));
  if (s_ab != s_cd) {
    const double x = (fc - s_cd * c - fb + s_ab * b) / (s_ab - s_cd);
    if (x > b && x < c) inner = std::min(inner, left(x));
  }
  return std::min(lb, inner);
}

// Minimum of P1 + P2 over the feasible power set for fixed rates. For both coded
// schemes the set is convex in (P1, P2) and upward closed, so P1 + P2min(P1) is
// convex and a golden-section search over P1 finds its minimum.
template <class Feasible>
Best min_power_at_rates(Feasible&& feas, double pmax, double bound, std::int64_t& evals) {
  Best b;
  ++evals;
  if (!feas(pmax, pmax)) return b;
  const double floor2 = bisect_range([&](double x) { return feas(pmax, x); }, 0.0, pmax, evals);
  const double floor1 = bisect_range([&](double x) { return feas(x, pmax); }, 0.0, pmax, evals);
  if (floor1 + floor2 > bound) return b;

  // P2min is non-increasing in P1; keep evaluated points to bracket each bisection.
  std::vector<std::pair<double, double>> seen{{floor1, pmax}, {pmax, floor2}};
  auto p2_at = [&](double p1) {
    double lo = 0.0, hi = pmax;
    for (const auto& [x, y] : seen) {
      if (x <= p1) hi = std::min(hi, y);
      if (x >= p1) lo = std::max(lo, y * (1.0 - 1e-9));
    }
    ++evals;
    if (!feas(p1, hi)) hi = pmax;
    const double p2 = bisect_range([&](double x) { return feas(p1, x); }, std::min(lo, hi), hi, evals);
    seen.push_back({p1, p2});
    return p2;
  };
  auto total = [&](double p1) { return p1 + p2_at(p1); };

  double lo = floor1;
  double hi = std::min(pmax, bound - floor2);
  if (hi <= lo) hi = lo;
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = total(x1);
  double f2 = total(x2);
  double flo = total(lo);
  double fhi = hi > lo ? total(hi) : flo;
  auto keep = [&](double x, double f) {
    if (f < b.total) b = {f, x, f - x, 0.0, 0.0};
  };
  keep(lo, flo);
  keep(hi, fhi);
  keep(x1, f1);
  keep(x2, f2);
  while (hi - lo > 1e-9 * std::max(hi, 1e-12)) {
    if (convex_lower_bound(lo, flo, x1, f1, x2, f2, hi, fhi) > bound) break;
    if (f1 <= f2) {
      hi = x2;
      fhi = f2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = total(x1);
      keep(x1, f1);
    } else {
      lo = x1;
      flo = f1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = total(x2);
      keep(x2, f2);
    }
  }
  return b;
}

using RatePair = std::pair<double, double>;

// Pairs are evaluated in fixed chunks; the pruning bound only changes between
// chunks, so results and evaluation counts do not depend on Exec.
std::vector<Best> search_coded(const NetworkConfig& cfg, double d, CodingScheme cs,
                               const std::vector<RatePair>& pairs, double pmax, double& bound,
                               Exec exec, std::int64_t& evals) {
  constexpr std::size_t kChunk = 64;
  std::vector<Best> per(pairs.size());
  std::vector<std::int64_t> ev(pairs.size(), 0);
  auto cell = [&](std::size_t k, double bnd) {
    const std::vector<double> r{pairs[k].first, pairs[k].second};
    if (distortion_from_r(cfg, r) > d * (1.0 + kDistortionTolerance)) return;
    auto feas = [&](double p1, double p2) {
      const std::vector<double> p{p1, p2};
      return check_feasible(cfg, p, r, d, cs).feasible;
    };
    Best b = min_power_at_rates(feas, pmax, bnd, ev[k]);
    b.r1 = r[0];
    b.r2 = r[1];
    per[k] = b;
  };
  for (std::size_t start = 0; start < pairs.size(); start += kChunk) {
    const std::size_t stop = std::min(pairs.size(), start + kChunk);
    const double bnd = bound;
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
      for (std::size_t k = start; k < stop; ++k) cell(k, bnd);
    } else {
      for (std::size_t k = start; k < stop; ++k) cell(k, bnd);
    }
    for (std::size_t k = start; k < stop; ++k) bound = std::min(bound, per[k].total);
  }
  for (auto e : ev) evals += e;
  return per;
}

// Smallest P2 on the grid segment where the uncoded MSE first meets d,
// refined by bisection between neighbouring grid points.
Best search_uncoded(const NetworkConfig& cfg, double d, std::span<const double> p1_grid,
                    std::span<const double> p2_grid, Exec exec, std::int64_t& evals) {
  std::vector<Best> per(p1_grid.size());
  std::vector<std::int64_t> ev(p1_grid.size(), 0);
  auto row = [&](std::size_t k) {
    const double p1 = p1_grid[k];
    auto ok = [&](double p2) {
      const std::vector<double> p{p1, p2};
      return uncoded_mse(cfg, p) <= d;
    };
    for (std::size_t j = 0; j < p2_grid.size(); ++j) {
      ++ev[k];
      if (!ok(p2_grid[j])) continue;
      double hi = p2_grid[j];
      double lo = j ? p2_grid[j - 1] : hi;
      while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        ++ev[k];
        (ok(mid) ? hi : lo) = mid;
      }
      per[k] = {p1 + hi, p1, hi, 0.0, 0.0};
      return;
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < p1_grid.size(); ++k) row(k);
  } else {
    for (std::size_t k = 0; k < p1_grid.size(); ++k) row(k);
  }
  Best best;
  for (std::size_t k = 0; k < per.size(); ++k) {
    evals += ev[k];
    if (per[k].total < best.total) best = per[k];
  }
  return best;
}

std::vector<double> window(double centre, double step, double lo, double hi, int factor) {
  const double a = std::max(lo, centre - step);
  const double b = std::min(hi, centre + step);
  return axis(a, b, 2 * factor + 1);
}

// Rate axis: r = 0, then points uniform in t = ln(2^{2r} - 1) from rate_min to
// rate_max, so that one step changes 2^{2r} - 1 by a fixed factor. Fine index
// i maps to coarse index i / refine.
struct RateAxis {
  explicit RateAxis(const GridSpec& g)
      : refine(g.refine),
        coarse(g.rate_points),
        r_lo(g.rate_min),
        t_lo(std::log(std::expm1(kLn4 * g.rate_min))),
        dt((std::log(std::expm1(kLn4 * g.rate_max)) - t_lo) / (g.rate_points - 2)) {}

  long fine_size() const { return static_cast<long>(coarse - 1) * refine; }

  long fine_index(double r) const {
    if (r < r_lo) return std::lround(r / r_lo * refine);
    const double t = std::log(std::expm1(kLn4 * r));
    return refine + std::lround((t - t_lo) / dt * refine);
  }

  double r_at(long i) const {
    if (i >= refine) {
      const double t = t_lo + dt * static_cast<double>(i - refine) / refine;
      return std::log1p(std::exp(t)) / kLn4;
    }
    return r_lo * static_cast<double>(i) / refine;
  }

  int refine;
  int coarse;
  double r_lo;
  double t_lo;
  double dt;
};

// Smallest rate of sensor `which` meeting the distortion target with the other
// rate fixed, or a negative value when none up to r_max does.
double boundary_rate(const NetworkConfig& cfg, double d, std::size_t which, double other,
                     double r_max) {
  std::vector<double> r(2);
  r[1 - which] = other;
  auto ok = [&](double x) {
    r[which] = x;
    return distortion_from_r(cfg, r) <= d;
  };
  if (!ok(r_max)) return -1.0;
  if (ok(0.0)) return 0.0;
  double lo = 0.0;
  double hi = r_max;
  while (hi - lo > 1e-13 * r_max) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

// Grid pairs plus, for each listed r1 (r2), the pair completed on the distortion boundary.
void add_boundary_pairs(const NetworkConfig& cfg, double d, double r_max,
                        const std::vector<double>& r1s, const std::vector<double>& r2s,
                        std::vector<RatePair>& pairs) {
  for (double a : r1s) {
    const double b = boundary_rate(cfg, d, 1, a, r_max);
    if (b >= 0.0) pairs.push_back({a, b});
  }
  for (double b : r2s) {
    const double a = boundary_rate(cfg, d, 0, b, r_max);
    if (a >= 0.0) pairs.push_back({a, b});
  }
}

}  // namespace

OracleResult grid_oracle(const NetworkConfig& cfg, double d, Scheme scheme, const GridSpec& spec,
                         Exec exec) {
  cfg.validate();
  if (cfg.size() != 2) throw Error(ErrorCode::InvalidConfig, "grid oracle needs L = 2");
  if (spec.power_points < 2 || spec.rate_points < 3 || spec.refine < 1 ||
      !(spec.rate_min > 0.0 && spec.rate_min < spec.rate_max)) {
    throw Error(ErrorCode::InvalidConfig, "grid needs at least two points per axis");
  }
  if (scheme == Scheme::LowerBound) {
    throw Error(ErrorCode::Unsupported, "no grid oracle for the lower bound");
  }
  OracleResult out;
  if (d >= cfg.sigma_s2) {
    out.uncertainty = std::numeric_limits<double>::min();
    out.argmin = {0.0, 0.0};
    return out;
  }

  const bool uncoded = scheme == Scheme::Uncoded;
  const CodingScheme cs = scheme == Scheme::JSCC ? CodingScheme::Joint : CodingScheme::Separate;
  const RateAxis rax(spec);
  std::vector<double> r_axis;
  for (int k = 0; k < spec.rate_points; ++k) r_axis.push_back(rax.r_at(static_cast<long>(k) * spec.refine));
  std::int64_t evals = 0;

  // Equal-power level that is feasible on the coarse grid bounds every optimal power.
  auto equal_ok = [&](double c) {
    if (uncoded) {
      for (int t = 0; t <= 20; ++t) {
        const std::vector<double> p{c * t / 20.0, c * (20 - t) / 20.0};
        ++evals;
        if (uncoded_mse(cfg, p) <= d) return true;
      }
      return false;
    }
    const std::vector<double> p{c, c};
    for (double a : r_axis) {
      for (double b : r_axis) {
        const std::vector<double> r{a, b};
        ++evals;
        if (check_feasible(cfg, p, r, d, cs).feasible) return true;
      }
    }
    return false;
  };
  double pmax = spec.power_max;
  if (pmax <= 0.0) {
    double c = 1e-3 * cfg.sigma_w2 / std::max(cfg.gains[0], cfg.gains[1]);
    while (!equal_ok(c)) {
      c *= 2.0;
      if (c > 1e12) throw Error(ErrorCode::NoFeasiblePoint, "no feasible equal-power point");
    }
    pmax = uncoded ? c : 2.0 * c;
  }

  Best best;
  if (uncoded) {
    // Coarse passes; shrink the power box while the optimum sits in its lower half.
    for (int pass = 0; pass < 8; ++pass) {
      best = search_uncoded(cfg, d, axis(0.0, pmax, spec.power_points),
                            axis(0.0, pmax, spec.power_points), exec, evals);
      if (!std::isfinite(best.total)) throw Error(ErrorCode::NoFeasiblePoint, "no feasible grid point");
      if (best.total >= 0.5 * pmax) break;
      pmax = best.total;
    }
    const double p_step = pmax / (spec.power_points - 1);
    const Best fine = search_uncoded(cfg, d, window(best.p1, p_step, 0.0, pmax, spec.refine),
                                     axis(0.0, pmax, spec.power_points * spec.refine), exec, evals);
    if (fine.total < best.total) best = fine;
    out.uncertainty = p_step / spec.refine;
  } else {
    std::vector<RatePair> coarse;
    for (double a : r_axis)
      for (double b : r_axis) coarse.push_back({a, b});
    add_boundary_pairs(cfg, d, spec.rate_max, r_axis, r_axis, coarse);
    double bound = pmax * 2.0;
    const auto per = search_coded(cfg, d, cs, coarse, pmax, bound, exec, evals);
    for (const auto& c : per)
      if (c.total < best.total) best = c;
    if (!std::isfinite(best.total)) throw Error(ErrorCode::NoFeasiblePoint, "no feasible grid point");

    // Refine around every coarse cell that could hold the optimum: one coarse
    // step on both axes scales the required power by about e^{2 dt}.
    const double band = best.total * std::exp(2.0 * rax.dt);
    std::vector<std::size_t> order(per.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return per[a].total < per[b].total; });
    const long fine_n = rax.fine_size();
    std::vector<char> mark(static_cast<std::size_t>((fine_n + 1) * (fine_n + 1)), 0);
    std::vector<RatePair> fine_pairs;
    std::vector<char> row1(static_cast<std::size_t>(fine_n + 1), 0);
    std::vector<char> row2(static_cast<std::size_t>(fine_n + 1), 0);
    for (std::size_t k : order) {
      if (!(per[k].total <= band)) break;
      const long c1 = std::min(fine_n, rax.fine_index(per[k].r1));
      const long c2 = std::min(fine_n, rax.fine_index(per[k].r2));
      for (long i = std::max(0L, c1 - spec.refine); i <= std::min(fine_n, c1 + spec.refine); ++i) {
        row1[static_cast<std::size_t>(i)] = 1;
        for (long j = std::max(0L, c2 - spec.refine); j <= std::min(fine_n, c2 + spec.refine); ++j) {
          row2[static_cast<std::size_t>(j)] = 1;
          char& m = mark[static_cast<std::size_t>(i * (fine_n + 1) + j)];
          if (m) continue;
          m = 1;
          fine_pairs.push_back({rax.r_at(i), rax.r_at(j)});
        }
      }
    }
    std::vector<double> r1s, r2s;
    for (long i = 0; i <= fine_n; ++i) {
      if (row1[static_cast<std::size_t>(i)]) r1s.push_back(rax.r_at(i));
      if (row2[static_cast<std::size_t>(i)]) r2s.push_back(rax.r_at(i));
    }
    add_boundary_pairs(cfg, d, spec.rate_max, r1s, r2s, fine_pairs);
    const auto per_fine = search_coded(cfg, d, cs, fine_pairs, pmax, bound, exec, evals);
    for (const auto& c : per_fine)
      if (c.total < best.total) best = c;
    out.uncertainty = best.total * std::expm1(2.0 * rax.dt / spec.refine);
  }

  out.value = best.total;
  out.evaluations = evals;
  out.argmin = uncoded ? std::vector<double>{best.p1, best.p2}
                       : std::vector<double>{best.p1, best.p2, best.r1, best.r2};
  return out;
}

OracleResult permutation_oracle(const NetworkConfig& cfg, std::span<const double> rates) {
  cfg.validate();
  if (cfg.size() > 7) throw Error(ErrorCode::TooManySensors, "permutation oracle needs L <= 7");
  if (rates.size() != cfg.size()) throw Error(ErrorCode::IndexOutOfRange, "rate vector length != L");
  std::vector<std::size_t> perm(cfg.size());
  std::iota(perm.begin(), perm.end(), 0);
  OracleResult out;
  out.value = kInf;
  double worst = 0.0;
  do {
    // Direct vertex: X_pi(k) = F_k - F_{k-1}.
    double total = 0.0;
    double log_f = 0.0;
    for (std::size_t i : perm) {
      total += cfg.sigma_w2 * std::exp(log_f) * std::expm1(kLn4 * rates[i]) / cfg.gains[i];
      log_f += kLn4 * rates[i];
    }
    ++out.evaluations;
    worst = std::max(worst, total);
    if (total < out.value) {
      out.value = total;
      out.argmin.assign(perm.begin(), perm.end());
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  out.uncertainty = std::max(1e-15, 1e-12 * worst);
  return out;
}

OracleResult jscc_direct_minimum(const NetworkConfig& cfg, std::span<const double> r_tilde,
                                 double rho_tilde) {
  cfg.validate();
  if (cfg.size() != 2 || r_tilde.size() != 2) {
    throw Error(ErrorCode::InvalidConfig, "direct minimum needs L = 2");
  }
  const double one_m = 1.0 - rho_tilde * rho_tilde;
  const double g1 = cfg.gains[0];
  const double g2 = cfg.gains[1];
  const double c = rho_tilde * std::sqrt(g1 * g2);
  // g_i P_i (1 - rho~^2) >= sigma_w2 (2^{2R~_i}(1 - rho~^2) - 1), and the sum-rate
  // quadratic g1 P1 + g2 P2 + 2c sqrt(P1 P2) >= sigma_w2 (2^{2(R~_1 + R~_2)}(1 - rho~^2) - 1).
  const double b1 = std::max(0.0, cfg.sigma_w2 * (std::exp(kLn4 * r_tilde[0]) * one_m - 1.0) / (one_m * g1));
  const double b2 = std::max(0.0, cfg.sigma_w2 * (std::exp(kLn4 * r_tilde[1]) * one_m - 1.0) / (one_m * g2));
  const double b3 = std::max(0.0, cfg.sigma_w2 * (std::exp(kLn4 * (r_tilde[0] + r_tilde[1])) * one_m - 1.0));

  std::int64_t evals = 0;
  auto radius = [&](double th) {
    ++evals;
    const double ct = std::cos(th);
    const double st = std::sin(th);
    double rad = 0.0;
    if (b1 > 0.0) rad = std::max(rad, ct > 0.0 ? std::sqrt(b1) / ct : kInf);
    if (b2 > 0.0) rad = std::max(rad, st > 0.0 ? std::sqrt(b2) / st : kInf);
    const double quad = g1 * ct * ct + g2 * st * st + 2.0 * c * ct * st;
    if (b3 > 0.0) rad = std::max(rad, std::sqrt(b3 / quad));
    return rad * rad;
  };
  const double half_pi = 0.5 * std::numbers::pi;
  constexpr int kScan = 20000;
  int arg = 0;
  double val = kInf;
  for (int k = 0; k <= kScan; ++k) {
    const double v = radius(half_pi * k / kScan);
    if (v < val) {
      val = v;
      arg = k;
    }
  }
  double lo = half_pi * std::max(0, arg - 1) / kScan;
  double hi = half_pi * std::min(kScan, arg + 1) / kScan;
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = radius(x1);
  double f2 = radius(x2);
  while (hi - lo > 1e-13) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = radius(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = radius(x2);
    }
  }
  double th = 0.5 * (lo + hi);
  double best = radius(th);
  if (val < best) {
    best = val;
    th = half_pi * arg / kScan;
  }
  OracleResult out;
  out.value = best;
  out.uncertainty = std::max(1e-15, 1e-12 * best);
  out.evaluations = evals;
  out.argmin = {best * std::cos(th) * std::cos(th), best * std::sin(th) * std::sin(th)};
  return out;
}

OracleResult sscc_vertex_oracle(const NetworkConfig& cfg, double d) {
  cfg.validate();
  if (cfg.size() != 2) throw Error(ErrorCode::InvalidConfig, "vertex oracle needs L = 2");
  OracleResult out;
  if (d >= cfg.sigma_s2) {
    out.uncertainty = std::numeric_limits<double>::min();
    out.argmin = {0.0, 0.0, 0.0, 0.0};
    return out;
  }
  const double need = 1.0 / d - 1.0 / cfg.sigma_s2;
  const double n1 = cfg.noise_vars[0];
  const double n2 = cfg.noise_vars[1];
  if (!(need < 1.0 / n1 + 1.0 / n2)) {
    throw Error(ErrorCode::Infeasible, "target below the minimum distortion");
  }
  const std::size_t weak = cfg.gains[0] <= cfg.gains[1] ? 0 : 1;
  const std::size_t strong = 1 - weak;
  std::int64_t evals = 0;
  // r1 range where the remaining requirement for sensor 2 lies in [0, 1/n2).
  const double lo_frac = std::max(0.0, (need - 1.0 / n2) * n1);
  const double hi_frac = std::min(1.0, need * n1);
  auto at = [&](double f1, std::array<double, 4>* arg) {
    ++evals;
    f1 = std::clamp(f1, lo_frac, hi_frac);
    const double f2 = std::clamp((need - f1 / n1) * n2, 0.0, 1.0);
    const std::vector<double> r{-0.5 * std::log2(1.0 - f1), -0.5 * std::log2(1.0 - f2)};
    if (!std::isfinite(r[0]) || !std::isfinite(r[1])) return kInf;
    const double first = ceo_rate_lhs(cfg, r, SensorSet{weak});
    const double all = ceo_rate_lhs(cfg, r, SensorSet::full(2));
    const double x_weak = std::expm1(kLn4 * first);
    const double x_strong = std::exp(kLn4 * first) * std::expm1(kLn4 * (all - first));
    std::array<double, 2> p{};
    p[weak] = cfg.sigma_w2 * x_weak / cfg.gains[weak];
    p[strong] = cfg.sigma_w2 * x_strong / cfg.gains[strong];
    if (arg) *arg = {p[0], p[1], r[0], r[1]};
    return p[0] + p[1];
  };
  constexpr int kScan = 4000;
  const double step = (hi_frac - lo_frac) / kScan;
  int best_k = 0;
  double best = kInf;
  for (int k = 0; k <= kScan; ++k) {
    const double v = at(lo_frac + step * k, nullptr);
    if (v < best) {
      best = v;
      best_k = k;
    }
  }
  double a = lo_frac + step * std::max(0, best_k - 1);
  double b = lo_frac + step * std::min(kScan, best_k + 1);
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = at(x1, nullptr);
  double f2 = at(x2, nullptr);
  while (b - a > 1e-14) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = at(x1, nullptr);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = at(x2, nullptr);
    }
  }
  std::array<double, 4> arg{};
  double mid = at(0.5 * (a + b), &arg);
  if (best < mid) mid = at(lo_frac + step * best_k, &arg);
  out.value = mid;
  out.uncertainty = std::max(1e-15, 1e-9 * out.value);
  out.evaluations = evals;
  out.argmin.assign(arg.begin(), arg.end());
  return out;
}

OracleResult uncoded_eigen_oracle(const NetworkConfig& cfg, double d) {
  cfg.validate();
  OracleResult out;
  const auto n = static_cast<Eigen::Index>(cfg.size());
  if (d >= cfg.sigma_s2) {
    out.uncertainty = std::numeric_limits<double>::min();
    out.argmin.assign(cfg.size(), 0.0);
    return out;
  }
  // mse <= d  <=>  s^T (M - a K) s >= a - 1 with s_i = sqrt(P_i), a = sigma_s2/d.
  const double a = cfg.sigma_s2 / d;
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double rho = i == j ? 1.0 : measurement_correlation(cfg, static_cast<std::size_t>(i),
                                                                static_cast<std::size_t>(j));
      b(i, j) = rho * std::sqrt(cfg.gains[i] * cfg.gains[j]) / cfg.sigma_w2;
    }
    b(i, i) -= a * cfg.gains[i] * cfg.noise_vars[i] /
               ((cfg.sigma_s2 + cfg.noise_vars[i]) * cfg.sigma_w2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b);
  const double top = eig.eigenvalues()(n - 1);
  if (!(top > 0.0)) throw Error(ErrorCode::Infeasible, "uncoded scheme cannot reach the target");
  out.value = (a - 1.0) / top;
  out.uncertainty = std::max(1e-15, 1e-12 * out.value);
  out.evaluations = 1;
  const Eigen::VectorXd v = eig.eigenvectors().col(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) out.argmin.push_back(out.value * v(i) * v(i));
  return out;
}

}  // namespace macpower
