#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "macpower/gaussian_info.hpp"
#include "macpower/model.hpp"

namespace macpower {

/// Sensor indices are 0-based throughout.
struct OrderSolution {
  std::vector<std::size_t> permutation;   // pi*: ascending gains
  std::vector<std::size_t> decode_order;  // reverse of permutation
  std::vector<double> powers;
  double total_power = 0.0;
  std::vector<std::string> active_constraints;
};

/// Ascending gains, ties by ascending index.
std::vector<std::size_t> optimal_permutation(const NetworkConfig& cfg);

/// Successive-cancellation order: descending gains, equal gains by ascending index.
std::vector<std::size_t> optimal_channel_decoding_order(const NetworkConfig& cfg);

/// f(S) = prod_{i in S} 2^{2 R_i} - 1.
double contra_polymatroid_rank(std::span<const double> rates, SensorSet s);

/// True when sum_{i in S} x_i >= f(S) - tol for every subset S.
bool in_contra_polymatroid(std::span<const double> x, std::span<const double> rates,
                           double tol = 1e-9);

/// Vertex of the contra-polymatroid along `permutation`:
/// X_{pi(i)} = F_i - F_{i-1}, F_i = prod_{j<=i} 2^{2 R_{pi(j)}}, P = sigma_w2 X / g.
OrderSolution vertex_power_allocation(const NetworkConfig& cfg, std::span<const double> rates,
                                      std::span<const std::size_t> permutation);
OrderSolution vertex_power_allocation(const NetworkConfig& cfg, std::span<const double> rates);

/// Total vertex power by Abel summation:
/// sigma_w2 [sum_{i<L} (1/g_pi(i) - 1/g_pi(i+1)) F_i + F_L / g_pi(L) - 1/g_pi(1)].
double vertex_total_power(const NetworkConfig& cfg, std::span<const double> rates,
                          std::span<const std::size_t> permutation);

/// Ellipse geometry of the two-sensor correlated MAC in (sqrt P_1, sqrt P_2).
struct EllipseAnalysis {
  std::array<double, 3> b{};        // P_1 >= b1, P_2 >= b2, w^T A w >= b3
  std::array<double, 2> z{};        // 2^{2 R~_i}(1 - rho~^2)
  std::array<double, 2> lambda{};   // eigenvalues of A, descending
  std::array<double, 4> q{};        // eigenvectors, row-major [q11 q12; q21 q22], columns = vectors
  double corner_quadratic = 0.0;    // [sqrt b1, sqrt b2] A [..]^T
  bool corner_inside = false;       // corner_quadratic < b3
};

EllipseAnalysis ellipse_analysis(const NetworkConfig& cfg, std::span<const double> r_tilde,
                                 double rho_tilde);

/// Minimum-power point of the two-sensor JSCC region for fixed quantization rates.
/// Active constraints are reported as "b1", "b2" (per-sensor, by index) and "b3" (sum).
OrderSolution jscc_two_sensor_order(const NetworkConfig& cfg, std::span<const double> r_tilde,
                                    double rho_tilde);

/// The point with the weaker sensor's individual constraint and the sum
/// constraint active (the stronger sensor is decoded first).
std::array<double, 2> jscc_weak_corner(const NetworkConfig& cfg, std::span<const double> r_tilde,
                                       double rho_tilde);

}  // namespace macpower
