#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "macpower/exec.hpp"
#include "macpower/model.hpp"

namespace macpower {

struct OracleResult {
  double value = 0.0;
  double uncertainty = 0.0;  // standard error, or grid resolution bound
  std::int64_t evaluations = 0;
  std::vector<double> argmin;
};

/// splitmix64 step; used to derive per-block seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Empirical MSE of the LMMSE estimate gamma Z of X_0 under amplify-and-forward.
/// Samples are drawn in fixed blocks of 65536 from mt19937_64 engines seeded by
/// splitmix64(seed + block); normals by Box-Muller. Results do not depend on Exec.
OracleResult simulate_uncoded(const NetworkConfig& cfg, std::span<const double> powers,
                              std::int64_t n_samples, std::uint64_t seed,
                              Exec exec = Exec::Serial);

struct GridSpec {
  int power_points = 41;  // per power axis
  int rate_points = 81;   // per rate axis: 0, then log-spaced in 2^{2r} - 1
  double rate_min = 1e-3; // smallest positive rate, bits
  double rate_max = 4.0;  // bits
  int refine = 10;        // one local refinement round with this factor
  double power_max = 0.0; // 0: found by doubling
};

/// Brute-force minimum total power over a grid for L = 2.
/// Uncoded: 2-D power grid with bisection onto the constraint boundary.
/// SSCC/JSCC: grid over (r_1, r_2); for each rate pair the feasible power set is
/// convex, so P_1 is found by golden section and P_2 by bisection (feasibility is
/// monotone in P_2). Refinement covers every coarse cell within one step of the best.
/// argmin holds {P1, P2} or {P1, P2, r1, r2}.
OracleResult grid_oracle(const NetworkConfig& cfg, double d, Scheme scheme,
                         const GridSpec& spec = {}, Exec exec = Exec::Serial);

/// Exhaustive search of vertex allocations over all L! orders (L <= 7).
/// argmin holds the best permutation as doubles.
OracleResult permutation_oracle(const NetworkConfig& cfg, std::span<const double> rates);

/// Direct minimum of P_1 + P_2 over the two-sensor JSCC region for fixed
/// quantization rates, by a radial scan in (sqrt P_1, sqrt P_2). argmin = {P1, P2}.
OracleResult jscc_direct_minimum(const NetworkConfig& cfg, std::span<const double> r_tilde,
                                 double rho_tilde);

/// Two-sensor SSCC minimum by a 1-D search over r_1 on the distortion surface,
/// with source rates at the Slepian-Wolf vertex and powers at the MAC vertex along
/// ascending gains. argmin = {P1, P2, r1, r2}.
OracleResult sscc_vertex_oracle(const NetworkConfig& cfg, double d);

/// Uncoded minimum from the Rayleigh quotient of the constraint quadratic form.
OracleResult uncoded_eigen_oracle(const NetworkConfig& cfg, double d);

}  // namespace macpower
