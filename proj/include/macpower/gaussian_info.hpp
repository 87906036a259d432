#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "macpower/exec.hpp"
#include "macpower/model.hpp"

namespace macpower {

/// A subset of sensor indices, stored as a bitmask (at most 32 sensors).
class SensorSet {
 public:
  constexpr SensorSet() = default;
  constexpr explicit SensorSet(std::uint32_t bits) : bits_(bits) {}
  SensorSet(std::initializer_list<std::size_t> indices);

  static SensorSet full(std::size_t sensors);

  constexpr std::uint32_t bits() const noexcept { return bits_; }
  constexpr bool empty() const noexcept { return bits_ == 0; }
  bool contains(std::size_t i) const noexcept { return (bits_ >> i) & 1u; }
  std::size_t size() const noexcept;
  SensorSet complement(std::size_t sensors) const noexcept;
  std::vector<std::size_t> indices() const;

  friend constexpr bool operator==(SensorSet, SensorSet) = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Correlations of the measurements X_i and of the quantization codewords U_i,
/// plus the codeword covariance scaled to the transmit powers.
struct CovarianceModel {
  Eigen::MatrixXd rho;        // unit diagonal
  Eigen::MatrixXd rho_tilde;  // unit diagonal
  Eigen::MatrixXd sigma_u;    // rho_tilde(i,j) sqrt(P_i P_j), diagonal P_i
};

struct RateVector {
  std::vector<double> r;        // conditional rates I(X_i;U_i|X_0)
  std::vector<double> r_tilde;  // quantization rates I(X_i;U_i)
};

double measurement_correlation(const NetworkConfig& cfg, std::size_t i, std::size_t j);

/// R~_i = r_i + 1/2 log2(1 + (sigma_s2/sigma_N_i^2)(1 - 2^{-2 r_i})).
double quantizer_rate_from_r(const NetworkConfig& cfg, std::size_t i, double r);
RateVector rate_vector(const NetworkConfig& cfg, std::span<const double> r);

/// 1/D_E = 1/sigma_s2 + sum_k (1 - 2^{-2 r_k}) / sigma_N_k^2.
double distortion_from_r(const NetworkConfig& cfg, std::span<const double> r);

/// q_i = (sigma_s2/sigma_N_i^2)(1 - 2^{-2 r_i}); the per-sensor SNR of U_i about X_0.
double codeword_snr(const NetworkConfig& cfg, std::size_t i, double r);

/// Codeword correlation from the conditional rates (closed form in q_i, q_j).
double codeword_correlation(const NetworkConfig& cfg, std::size_t i, std::size_t j, double ri,
                            double rj);

/// Same quantity routed through the quantization rates:
/// rho_ij sqrt((1 - 2^{-2 R~_i})(1 - 2^{-2 R~_j})).
double codeword_correlation_from_quantizer_rates(const NetworkConfig& cfg, std::size_t i,
                                                 std::size_t j, double r_tilde_i,
                                                 double r_tilde_j);

CovarianceModel covariance_model(const NetworkConfig& cfg, std::span<const double> powers,
                                 std::span<const double> r);

enum class DistortionCheck { Verify, Override };

/// Left side of the subset condition, in bits:
///   -1/2 log2[D_E/sigma_s2 + sum_{i not in S} (D_E/sigma_N_i^2)(1 - 2^{-2 r_i})] + sum_{i in S} r_i.
/// The first overload derives D_E from r. With DistortionCheck::Verify the
/// supplied d_e must match the one implied by r to 1e-9.
double ceo_rate_lhs(const NetworkConfig& cfg, std::span<const double> r, SensorSet subset);
double ceo_rate_lhs(const NetworkConfig& cfg, std::span<const double> r, SensorSet subset,
                    double d_e, DistortionCheck check = DistortionCheck::Verify);

/// Schur complement Sigma_S - Sigma_{S,Sc} Sigma_Sc^{-1} Sigma_{Sc,S}. Rows and
/// columns of the result follow the ascending order of S.
Eigen::MatrixXd conditional_covariance(const Eigen::MatrixXd& sigma_u, SensorSet subset);

/// 1/2 log2(1 + sqrt(g_S)^T Q_S sqrt(g_S) / sigma_w2) for correlated inputs.
double mac_rhs_correlated(const NetworkConfig& cfg, std::span<const double> powers,
                          std::span<const double> r, SensorSet subset);
/// Same with an explicit codeword correlation matrix (unit diagonal).
double mac_rhs_correlated(const NetworkConfig& cfg, std::span<const double> powers,
                          const Eigen::MatrixXd& rho_tilde, SensorSet subset);

/// 1/2 log2(1 + sum_{j in S} P_j g_j / sigma_w2).
double mac_rhs_independent(const NetworkConfig& cfg, std::span<const double> powers,
                           SensorSet subset);

enum class CodingScheme { Separate, Joint };

struct FeasibilityVerdict {
  bool feasible = false;
  bool distortion_ok = false;
  double achieved_d = 0.0;
  SensorSet worst_subset;     // subset with largest LHS - RHS
  double worst_margin = 0.0;  // LHS - RHS at worst_subset, bits
};

inline constexpr std::size_t kMaxSubsetSensors = 20;
inline constexpr double kRateTolerance = 1e-9;
inline constexpr double kDistortionTolerance = 1e-9;

/// Checks LHS(S) <= RHS(S) on all 2^L - 1 subsets plus D_E <= D.
FeasibilityVerdict check_feasible(const NetworkConfig& cfg, std::span<const double> powers,
                                  std::span<const double> r, double target_d,
                                  CodingScheme scheme, Exec exec = Exec::Serial);

/// I(A;B) = 1/2 log2(det S_A det S_B / det S_{A u B}) for a joint Gaussian
/// with covariance `cov`.
double gaussian_mutual_information(const Eigen::MatrixXd& cov, std::span<const std::size_t> a,
                                   std::span<const std::size_t> b);
/// I(A;B|C) = I(A; B u C) - I(A; C).
double gaussian_conditional_mutual_information(const Eigen::MatrixXd& cov,
                                               std::span<const std::size_t> a,
                                               std::span<const std::size_t> b,
                                               std::span<const std::size_t> c);

/// Joint covariance of (X_0, X_1..X_L, U_1..U_L, Z) for the quantize-and-scale
/// test channel U_j = X_0 + N_j + V_j with Var V_j = sigma_N_j^2/(2^{2 r_j} - 1)
/// and Z = sum_j sqrt(g_j) gamma_j U_j + W, gamma_j = sqrt(P_j / Var U_j).
/// Sensors with r_j = 0 get a codeword that is independent noise of unit variance.
struct TestChannelModel {
  Eigen::MatrixXd cov;
  std::size_t sensors = 0;

  std::size_t x0() const { return 0; }
  std::size_t x(std::size_t i) const { return 1 + i; }
  std::size_t u(std::size_t i) const { return 1 + sensors + i; }
  std::size_t z() const { return 1 + 2 * sensors; }

  std::vector<std::size_t> u_of(SensorSet s) const;
  std::vector<std::size_t> x_of(SensorSet s) const;
};

TestChannelModel test_channel_model(const NetworkConfig& cfg, std::span<const double> powers,
                                    std::span<const double> r);

}  // namespace macpower
