#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "macpower/gp_core.hpp"
#include "macpower/model.hpp"

namespace macpower {

/// Per-sensor normalized powers P g / sigma_w2 in a symmetric network.
struct SymmetricPowers {
  double p_s = 0.0;    // separate coding
  double p_j = 0.0;    // joint coding, variance L P + (L^2 - L) rho~ P
  double p_a = 0.0;    // uncoded
  double p_lob = 0.0;  // lower bound
  double p_j_alt = 0.0;  // joint coding with the (1 + (L - 1/L) rho~) denominator
  double r = 0.0;        // per-sensor conditional rate, bits
  double rho_tilde = 0.0;
  double q_l = 0.0;      // 1 - (sigma_s2 + sigma_n2) rho~ / sigma_s2
  double lambda = 0.0;   // (sigma_n2 / L)(1/D - 1/sigma_s2)
};

/// Throws InfeasibleSymmetric when lambda >= 1 and InvalidDistortion unless 0 < D < sigma_s2.
SymmetricPowers symmetric_closed_forms(std::size_t sensors, double sigma_s2, double sigma_n2,
                                       double d);

/// Same quantities computed through alternative algebraic routes
/// (uncoded via Q~_L, joint via the 2^{2r} = (1 - rho~)/Q~_L substitution).
struct SymmetricCrossCheck {
  double p_a_via_q = 0.0;
  double p_j_via_q = 0.0;
};
SymmetricCrossCheck symmetric_cross_check(std::size_t sensors, double sigma_s2, double sigma_n2,
                                          double d);

/// sigma_s2 [sum P g sigma_N^2/(sigma_s2 + sigma_N^2) + sigma_w2] / [sum P g + B + sigma_w2].
double uncoded_mse(const NetworkConfig& cfg, std::span<const double> powers);

/// Infimum of uncoded_mse as the powers grow without bound along the best direction.
double uncoded_high_power_limit(const NetworkConfig& cfg);

struct SchemeOptions {
  SolverOptions solver;
  int alpha_grid = 11;        // time-share grid points over [0,1]
  bool refine_alpha = true;   // golden-section refinement around the grid argmin
  bool jscc_zero_rho = false; // diagnostic: treat codewords as uncorrelated
  int jscc_max_rounds = 50;
  double jscc_rho_tol = 1e-7;
};

SchemeSolution minimize_power_uncoded(const NetworkConfig& cfg, double d,
                                      const SchemeOptions& opts = {});

/// Two-sensor SSCC with a fixed time-share alpha.
SchemeSolution minimize_power_sscc_alpha(const NetworkConfig& cfg, double d, double alpha,
                                         const SchemeOptions& opts = {});
/// Two-sensor SSCC, alpha searched over a grid.
SchemeSolution minimize_power_sscc(const NetworkConfig& cfg, double d,
                                   const SchemeOptions& opts = {});
/// SSCC for any L with every subset constraint of the independent-input MAC.
SchemeSolution minimize_power_sscc_general(const NetworkConfig& cfg, double d,
                                           const SchemeOptions& opts = {});

SchemeSolution minimize_power_jscc(const NetworkConfig& cfg, double d,
                                   const SchemeOptions& opts = {});

/// min sum P subject to the data-processing bound with maximally correlated inputs.
SchemeSolution lower_bound_power(const NetworkConfig& cfg, double d);

/// Dispatch by scheme; symmetric networks with L > 2 use the closed forms for JSCC.
SchemeSolution solve_scheme(const NetworkConfig& cfg, double d, Scheme scheme,
                            const SchemeOptions& opts = {});

}  // namespace macpower
