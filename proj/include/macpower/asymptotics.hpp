#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace macpower {

struct AsymptoticReport {
  double limit_s = 0.0;    // L   * gP/sigma_w2, separate coding
  double limit_j = 0.0;    // L   * gP/sigma_w2, joint coding
  double limit_a = 0.0;    // L^2 * gP/sigma_w2, uncoded
  double limit_lob = 0.0;  // L^2 * gP/sigma_w2, lower bound
  double lambda_star = 0.0;
  double gamma_star = 0.0;
  double ratio_s = 0.0;  // (gP/sigma_w2) / (sigma_s2/D) as sigma_n2 -> 0
  double ratio_j = 0.0;
  double ratio_a = 0.0;
  double eta = 1.0;
  bool degenerate = false;  // lambda* = 1 (L = 1 on the gamma* = 1 track): ratios diverge
};

struct LargeLLimits {
  double limit_s = 0.0;
  double limit_j = 0.0;
  double limit_a = 0.0;
  double limit_lob = 0.0;
};

/// With c = sigma_n2 (1/D - 1/sigma_s2):
/// limit_s = (sigma_s2/D) e^c - 1, limit_j = e^c - D/sigma_s2,
/// limit_a = limit_lob = (1/D - 1/sigma_s2)(sigma_s2 + sigma_n2).
LargeLLimits large_l_limits(double sigma_s2, double sigma_n2, double d);

struct HighSnrRatios {
  double lambda_star = 0.0;
  double ratio_s = 0.0;
  double ratio_j = 0.0;
  double ratio_a = 0.0;
  double eta = 1.0;
  bool degenerate = false;
};

/// lambda* = 0 for gamma* < 1, 1/L for gamma* = 1; ratios 1/(L(1-l*)^L),
/// 1/(L^2(1-l*)^L), 1/(L^2(1-l*)). Throws InvalidExponent outside [0,1].
HighSnrRatios high_snr_ratios(std::size_t sensors, double gamma_star);

AsymptoticReport asymptotic_report(std::size_t sensors, double sigma_s2, double sigma_n2, double d,
                                   double gamma_star);

/// Finite-L closed forms scaled by L (coded) or L^2 (uncoded, bound).
struct LargeLRow {
  std::size_t sensors = 0;
  bool feasible = false;
  double scaled_s = 0.0;
  double scaled_j = 0.0;
  double scaled_a = 0.0;
  double scaled_lob = 0.0;
};

std::vector<LargeLRow> large_l_trace(double sigma_s2, double sigma_n2, double d,
                                     std::span<const std::size_t> sensors);

struct HighSnrPoint {
  double sigma_n2 = 0.0;
  double d = 0.0;
  double p_s = 0.0;  // per-sensor gP/sigma_w2
  double p_j = 0.0;
  double p_a = 0.0;
  double ratio_s = 0.0;
  double ratio_j = 0.0;
  double ratio_a = 0.0;
};

struct HighSnrSweep {
  std::vector<HighSnrPoint> points;
  HighSnrRatios limits;
  double eta_s = 0.0;  // slope of ln(1/D) against ln(gP/sigma_w2)
  double eta_j = 0.0;
  double eta_a = 0.0;
};

/// Symmetric closed forms along D = sigma_s2 (sigma_n2/sigma_s2)^gamma_star for
/// each sigma_n2. gamma_star must lie in (0, 1] so that D -> 0.
HighSnrSweep high_snr_sweep(std::size_t sensors, double sigma_s2, double gamma_star,
                            std::span<const double> sigma_n2_values);

/// Least-squares slope of y on x.
double regression_slope(std::span<const double> x, std::span<const double> y);

}  // namespace macpower
