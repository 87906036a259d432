#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace macpower {

/// A Gaussian source observed by L sensors that share one Gaussian MAC to a
/// fusion center. All variances are in power units; gains are dimensionless
/// power attenuations.
struct NetworkConfig {
  double sigma_s2 = 1.0;  // source variance
  double sigma_w2 = 1.0;  // receiver noise variance
  std::vector<double> gains;
  std::vector<double> noise_vars;

  std::size_t size() const noexcept { return gains.size(); }

  /// Throws Error{InvalidConfig} unless every variance and gain is finite and
  /// strictly positive and the two sequences have the same nonzero length.
  void validate() const;

  /// True when all gains are equal and all noise variances are equal.
  bool is_symmetric(double rel_tol = 1e-12) const;
};

NetworkConfig make_network(double sigma_s2, double sigma_w2, std::vector<double> gains,
                           std::vector<double> noise_vars);

struct DistortionTarget {
  double d = 0.0;
};

/// Sensors on the segment between source (distance 0) and fusion center
/// (distance d0). Gains follow kappa_c / (d0 - d)^beta_c and measurement noise
/// follows kappa_s * d^beta_s.
struct LinearTopology {
  double d0 = 1.0;
  std::vector<double> positions;
  double beta_c = 2.0;
  double beta_s = 2.0;
  double kappa_c = 1.0;
  double kappa_s = 1.0;
  double sigma_s2 = 1.0;
  double sigma_w2 = 1.0;
};

NetworkConfig build_linear_topology(const LinearTopology& topo);

/// Largest source-to-fusion distance for which L sensors placed at the far
/// end can still meet distortion d: (L / (kappa_s (1/d - 1/sigma_s2)))^(1/beta_s).
double max_source_distance(std::size_t sensors, double beta_s, double kappa_s,
                           double sigma_s2, double d);

struct FeasibilityReport {
  double d_min = 0.0;     // distortion with infinitely fine quantization
  bool feasible = false;  // d > d_min
  bool degenerate = false;  // d >= sigma_s2: zero power suffices
  std::optional<double> max_d0;
};

FeasibilityReport validate_feasibility(const NetworkConfig& cfg, DistortionTarget target,
                                       const LinearTopology* topology = nullptr);

/// (1/sigma_s2 + sum_k 1/sigma_N_k^2)^-1
double min_distortion(const NetworkConfig& cfg);

enum class Scheme { SSCC, JSCC, Uncoded, LowerBound };

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

enum class SolveStatus { Converged, MaxIter, Infeasible };

std::string_view to_string(SolveStatus status);

struct SchemeSolution {
  Scheme scheme = Scheme::Uncoded;
  std::vector<double> powers;
  std::vector<double> r;      // conditional rates r_i, bits
  std::vector<double> rates;  // R~_i (JSCC) or R_i (SSCC); empty for uncoded
  double alpha = 0.0;         // SSCC time share
  double achieved_d = 0.0;
  double total_power = 0.0;
  SolveStatus status = SolveStatus::Converged;
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::vector<double> objective_history;  // SP outer objectives of the returned solve
  double rejected_increase = 0.0;
  std::string note;

  bool converged() const noexcept { return status == SolveStatus::Converged; }
};

/// Zero-power solution for targets at or above the prior variance.
SchemeSolution degenerate_solution(const NetworkConfig& cfg, Scheme scheme);

}  // namespace macpower
