#include "macpower/model.hpp"

#include <cmath>
#include <sstream>

#include "macpower/error.hpp"

namespace macpower {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::PositionOutOfRange: return "PositionOutOfRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NegativeRate: return "NegativeRate";
    case ErrorCode::InconsistentDistortion: return "InconsistentDistortion";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::OverlappingSets: return "OverlappingSets";
    case ErrorCode::TooManySensors: return "TooManySensors";
    case ErrorCode::NonPositiveAnchor: return "NonPositiveAnchor";
    case ErrorCode::InvalidProblem: return "InvalidProblem";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::InfeasibleSymmetric: return "InfeasibleSymmetric";
    case ErrorCode::InvalidDistortion: return "InvalidDistortion";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::DegenerateRates: return "DegenerateRates";
    case ErrorCode::NoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorCode::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void NetworkConfig::validate() const {
  if (!positive_finite(sigma_s2)) throw Error(ErrorCode::InvalidConfig, "sigma_s2 must be > 0");
  if (!positive_finite(sigma_w2)) throw Error(ErrorCode::InvalidConfig, "sigma_w2 must be > 0");
  if (gains.empty()) throw Error(ErrorCode::InvalidConfig, "at least one sensor is required");
  if (gains.size() != noise_vars.size()) {
    throw Error(ErrorCode::InvalidConfig, "gains and noise_vars differ in length");
  }
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!positive_finite(gains[i]) || !positive_finite(noise_vars[i])) {
      std::ostringstream os;
      os << "sensor " << i << " has a non-positive gain or noise variance";
      throw Error(ErrorCode::InvalidConfig, os.str());
    }
  }
}

bool NetworkConfig::is_symmetric(double rel_tol) const {
  for (std::size_t i = 1; i < gains.size(); ++i) {
    if (std::abs(gains[i] - gains[0]) > rel_tol * gains[0]) return false;
    if (std::abs(noise_vars[i] - noise_vars[0]) > rel_tol * noise_vars[0]) return false;
  }
  return true;
}

NetworkConfig make_network(double sigma_s2, double sigma_w2, std::vector<double> gains,
                           std::vector<double> noise_vars) {
  NetworkConfig cfg{sigma_s2, sigma_w2, std::move(gains), std::move(noise_vars)};
  cfg.validate();
  return cfg;
}

NetworkConfig build_linear_topology(const LinearTopology& topo) {
  if (!positive_finite(topo.d0)) throw Error(ErrorCode::InvalidConfig, "d0 must be > 0");
  if (!(topo.beta_c >= 0.0) || !(topo.beta_s >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "path-loss exponents must be >= 0");
  }
  if (!positive_finite(topo.kappa_c) || !positive_finite(topo.kappa_s)) {
    throw Error(ErrorCode::InvalidConfig, "path-loss constants must be > 0");
  }
  NetworkConfig cfg;
  cfg.sigma_s2 = topo.sigma_s2;
  cfg.sigma_w2 = topo.sigma_w2;
  for (double d : topo.positions) {
    if (!(d > 0.0 && d < topo.d0)) {
      std::ostringstream os;
      os << "position " << d << " is outside (0, " << topo.d0 << ")";
      throw Error(ErrorCode::PositionOutOfRange, os.str());
    }
    cfg.gains.push_back(topo.kappa_c / std::pow(topo.d0 - d, topo.beta_c));
    cfg.noise_vars.push_back(topo.kappa_s * std::pow(d, topo.beta_s));
  }
  cfg.validate();
  return cfg;
}

double max_source_distance(std::size_t sensors, double beta_s, double kappa_s,
                           double sigma_s2, double d) {
  if (!(d > 0.0 && d < sigma_s2)) {
    throw Error(ErrorCode::InvalidDistortion, "distortion must lie in (0, sigma_s2)");
  }
  const double excess = kappa_s * (1.0 / d - 1.0 / sigma_s2);
  return std::pow(static_cast<double>(sensors) / excess, 1.0 / beta_s);
}

double min_distortion(const NetworkConfig& cfg) {
  double info = 1.0 / cfg.sigma_s2;
  for (double n : cfg.noise_vars) info += 1.0 / n;
  return 1.0 / info;
}

FeasibilityReport validate_feasibility(const NetworkConfig& cfg, DistortionTarget target,
                                       const LinearTopology* topology) {
  FeasibilityReport report;
  report.d_min = min_distortion(cfg);
  report.degenerate = target.d >= cfg.sigma_s2;
  report.feasible = target.d > report.d_min;
  if (topology != nullptr && target.d > 0.0 && target.d < cfg.sigma_s2) {
    report.max_d0 = max_source_distance(cfg.size(), topology->beta_s, topology->kappa_s,
                                        cfg.sigma_s2, target.d);
  }
  return report;
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::SSCC: return "sscc";
    case Scheme::JSCC: return "jscc";
    case Scheme::Uncoded: return "uncoded";
    case Scheme::LowerBound: return "lowerbound";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  if (name == "sscc" || name == "separate") return Scheme::SSCC;
  if (name == "jscc" || name == "joint") return Scheme::JSCC;
  if (name == "uncoded") return Scheme::Uncoded;
  if (name == "lowerbound" || name == "lob") return Scheme::LowerBound;
  return std::nullopt;
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIter: return "max-iter";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

SchemeSolution degenerate_solution(const NetworkConfig& cfg, Scheme scheme) {
  SchemeSolution sol;
  sol.scheme = scheme;
  sol.powers.assign(cfg.size(), 0.0);
  sol.r.assign(cfg.size(), 0.0);
  if (scheme == Scheme::SSCC || scheme == Scheme::JSCC) sol.rates.assign(cfg.size(), 0.0);
  sol.achieved_d = cfg.sigma_s2;
  sol.total_power = 0.0;
  sol.note = "degenerate: target at or above prior variance";
  return sol;
}

}  // namespace macpower
