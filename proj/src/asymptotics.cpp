#include "macpower/asymptotics.hpp"

#include <cmath>
#include <limits>

#include "macpower/error.hpp"
#include "macpower/schemes.hpp"

namespace macpower {

LargeLLimits large_l_limits(double sigma_s2, double sigma_n2, double d) {
  if (!(sigma_s2 > 0.0) || !(sigma_n2 > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "variances must be > 0");
  }
  if (!(d > 0.0 && d < sigma_s2)) throw Error(ErrorCode::InvalidDistortion, "need 0 < D < sigma_s2");
  const double excess = 1.0 / d - 1.0 / sigma_s2;
  const double ec = std::exp(sigma_n2 * excess);
  LargeLLimits out;
  out.limit_s = sigma_s2 / d * ec - 1.0;
  out.limit_j = ec - d / sigma_s2;
  out.limit_a = excess * (sigma_s2 + sigma_n2);
  out.limit_lob = out.limit_a;
  return out;
}

HighSnrRatios high_snr_ratios(std::size_t sensors, double gamma_star) {
  if (sensors == 0) throw Error(ErrorCode::InvalidConfig, "at least one sensor is required");
  if (!(gamma_star >= 0.0 && gamma_star <= 1.0)) {
    throw Error(ErrorCode::InvalidExponent, "gamma* must lie in [0,1]");
  }
  const double l = static_cast<double>(sensors);
  HighSnrRatios h;
  h.lambda_star = gamma_star < 1.0 ? 0.0 : 1.0 / l;
  const double one_m = 1.0 - h.lambda_star;
  if (one_m <= 0.0) {
    h.degenerate = true;
    h.ratio_s = h.ratio_j = h.ratio_a = std::numeric_limits<double>::infinity();
    return h;
  }
  const double pw = std::pow(one_m, l);
  h.ratio_s = 1.0 / (l * pw);
  h.ratio_j = 1.0 / (l * l * pw);
  h.ratio_a = 1.0 / (l * l * one_m);
  return h;
}

AsymptoticReport asymptotic_report(std::size_t sensors, double sigma_s2, double sigma_n2, double d,
                                   double gamma_star) {
  const LargeLLimits lim = large_l_limits(sigma_s2, sigma_n2, d);
  const HighSnrRatios h = high_snr_ratios(sensors, gamma_star);
  AsymptoticReport r;
  r.limit_s = lim.limit_s;
  r.limit_j = lim.limit_j;
  r.limit_a = lim.limit_a;
  r.limit_lob = lim.limit_lob;
  r.lambda_star = h.lambda_star;
  r.gamma_star = gamma_star;
  r.ratio_s = h.ratio_s;
  r.ratio_j = h.ratio_j;
  r.ratio_a = h.ratio_a;
  r.eta = h.eta;
  r.degenerate = h.degenerate;
  return r;
}

std::vector<LargeLRow> large_l_trace(double sigma_s2, double sigma_n2, double d,
                                     std::span<const std::size_t> sensors) {
  std::vector<LargeLRow> rows;
  for (std::size_t n : sensors) {
    LargeLRow row;
    row.sensors = n;
    try {
      const SymmetricPowers p = symmetric_closed_forms(n, sigma_s2, sigma_n2, d);
      const double l = static_cast<double>(n);
      row.feasible = true;
      row.scaled_s = l * p.p_s;
      row.scaled_j = l * p.p_j;
      row.scaled_a = l * l * p.p_a;
      row.scaled_lob = l * l * p.p_lob;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleSymmetric) throw;
    }
    rows.push_back(row);
  }
  return rows;
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::InvalidConfig, "regression needs two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw Error(ErrorCode::InvalidConfig, "regression abscissae are all equal");
  return sxy / sxx;
}

HighSnrSweep high_snr_sweep(std::size_t sensors, double sigma_s2, double gamma_star,
                            std::span<const double> sigma_n2_values) {
  if (!(gamma_star > 0.0 && gamma_star <= 1.0)) {
    throw Error(ErrorCode::InvalidExponent, "sweep needs gamma* in (0,1] so that D -> 0");
  }
  HighSnrSweep sw;
  sw.limits = high_snr_ratios(sensors, gamma_star);
  std::vector<double> ln_inv_d, ln_s, ln_j, ln_a;
  for (double n2 : sigma_n2_values) {
    HighSnrPoint pt;
    pt.sigma_n2 = n2;
    pt.d = sigma_s2 * std::pow(n2 / sigma_s2, gamma_star);
    const SymmetricPowers p = symmetric_closed_forms(sensors, sigma_s2, n2, pt.d);
    const double a = sigma_s2 / pt.d;
    pt.p_s = p.p_s;
    pt.p_j = p.p_j;
    pt.p_a = p.p_a;
    pt.ratio_s = p.p_s / a;
    pt.ratio_j = p.p_j / a;
    pt.ratio_a = p.p_a / a;
    sw.points.push_back(pt);
    ln_inv_d.push_back(-std::log(pt.d));
    ln_s.push_back(std::log(p.p_s));
    ln_j.push_back(std::log(p.p_j));
    ln_a.push_back(std::log(p.p_a));
  }
  if (sw.points.size() >= 2) {
    sw.eta_s = regression_slope(ln_s, ln_inv_d);
    sw.eta_j = regression_slope(ln_j, ln_inv_d);
    sw.eta_a = regression_slope(ln_a, ln_inv_d);
  }
  return sw;
}

}  // namespace macpower
