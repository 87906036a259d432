#include "macpower/gaussian_info.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "macpower/error.hpp"

namespace macpower {

SensorSet::SensorSet(std::initializer_list<std::size_t> indices) {
  for (std::size_t i : indices) bits_ |= (1u << i);
}

SensorSet SensorSet::full(std::size_t sensors) {
  return SensorSet(sensors >= 32 ? ~0u : ((1u << sensors) - 1u));
}

std::size_t SensorSet::size() const noexcept { return std::popcount(bits_); }

SensorSet SensorSet::complement(std::size_t sensors) const noexcept {
  return SensorSet(~bits_ & full(sensors).bits());
}

std::vector<std::size_t> SensorSet::indices() const {
  std::vector<std::size_t> out;
  for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

namespace {

void check_index(const NetworkConfig& cfg, std::size_t i) {
  if (i >= cfg.size()) {
    std::ostringstream os;
    os << "sensor index " << i << " >= " << cfg.size();
    throw Error(ErrorCode::IndexOutOfRange, os.str());
  }
}

void check_rate(double r) {
  if (!(r >= 0.0)) throw Error(ErrorCode::NegativeRate, "rates must be >= 0");
}

// 1 - 2^{-2r}, accurate for small r.
double rate_fraction(double r) { return -std::expm1(-2.0 * r * std::log(2.0)); }

double log2_det_spd(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularCovariance, "covariance block is not positive definite");
  }
  double s = 0.0;
  for (Eigen::Index k = 0; k < m.rows(); ++k) s += std::log2(llt.matrixL()(k, k));
  return 2.0 * s;
}

Eigen::MatrixXd principal_block(const Eigen::MatrixXd& m, std::span<const std::size_t> idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) out(a, b) = m(idx[a], idx[b]);
  return out;
}

}  // namespace

double measurement_correlation(const NetworkConfig& cfg, std::size_t i, std::size_t j) {
  check_index(cfg, i);
  check_index(cfg, j);
  if (i == j) return 1.0;
  const double s = cfg.sigma_s2;
  return s / std::sqrt((s + cfg.noise_vars[i]) * (s + cfg.noise_vars[j]));
}

double codeword_snr(const NetworkConfig& cfg, std::size_t i, double r) {
  check_index(cfg, i);
  check_rate(r);
  return cfg.sigma_s2 / cfg.noise_vars[i] * rate_fraction(r);
}

double quantizer_rate_from_r(const NetworkConfig& cfg, std::size_t i, double r) {
  return r + 0.5 * std::log2(1.0 + codeword_snr(cfg, i, r));
}

RateVector rate_vector(const NetworkConfig& cfg, std::span<const double> r) {
  RateVector out;
  out.r.assign(r.begin(), r.end());
  for (std::size_t i = 0; i < r.size(); ++i) out.r_tilde.push_back(quantizer_rate_from_r(cfg, i, r[i]));
  return out;
}

double distortion_from_r(const NetworkConfig& cfg, std::span<const double> r) {
  if (r.size() != cfg.size()) throw Error(ErrorCode::IndexOutOfRange, "rate vector length != L");
  double info = 1.0 / cfg.sigma_s2;
  for (std::size_t k = 0; k < r.size(); ++k) {
    check_rate(r[k]);
    info += rate_fraction(r[k]) / cfg.noise_vars[k];
  }
  return 1.0 / info;
}

double codeword_correlation(const NetworkConfig& cfg, std::size_t i, std::size_t j, double ri,
                            double rj) {
  const double qi = codeword_snr(cfg, i, ri);
  const double qj = codeword_snr(cfg, j, rj);
  if (i == j) return 1.0;
  return std::sqrt(qi / (1.0 + qi) * (qj / (1.0 + qj)));
}

double codeword_correlation_from_quantizer_rates(const NetworkConfig& cfg, std::size_t i,
                                                 std::size_t j, double r_tilde_i,
                                                 double r_tilde_j) {
  check_rate(r_tilde_i);
  check_rate(r_tilde_j);
  if (i == j) return 1.0;
  return measurement_correlation(cfg, i, j) *
         std::sqrt(rate_fraction(r_tilde_i) * rate_fraction(r_tilde_j));
}

CovarianceModel covariance_model(const NetworkConfig& cfg, std::span<const double> powers,
                                 std::span<const double> r) {
  const auto n = static_cast<Eigen::Index>(cfg.size());
  if (powers.size() != cfg.size() || r.size() != cfg.size()) {
    throw Error(ErrorCode::IndexOutOfRange, "powers/rates length != L");
  }
  CovarianceModel m;
  m.rho = Eigen::MatrixXd::Identity(n, n);
  m.rho_tilde = Eigen::MatrixXd::Identity(n, n);
  m.sigma_u = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) {
        m.rho(i, j) = measurement_correlation(cfg, i, j);
        m.rho_tilde(i, j) = codeword_correlation(cfg, i, j, r[i], r[j]);
      }
      m.sigma_u(i, j) = m.rho_tilde(i, j) * std::sqrt(powers[i] * powers[j]);
    }
  }
  return m;
}

double ceo_rate_lhs(const NetworkConfig& cfg, std::span<const double> r, SensorSet subset) {
  return ceo_rate_lhs(cfg, r, subset, distortion_from_r(cfg, r), DistortionCheck::Override);
}

double ceo_rate_lhs(const NetworkConfig& cfg, std::span<const double> r, SensorSet subset,
                    double d_e, DistortionCheck check) {
  if (r.size() != cfg.size()) throw Error(ErrorCode::IndexOutOfRange, "rate vector length != L");
  if (check == DistortionCheck::Verify) {
    const double implied = distortion_from_r(cfg, r);
    if (std::abs(implied - d_e) > kDistortionTolerance) {
      std::ostringstream os;
      os << "d_e=" << d_e << " but rates imply " << implied;
      throw Error(ErrorCode::InconsistentDistortion, os.str());
    }
  }
  if (subset.empty()) return 0.0;
  double inner = d_e / cfg.sigma_s2;
  double own = 0.0;
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    check_rate(r[i]);
    if (subset.contains(i)) {
      own += r[i];
    } else {
      inner += d_e / cfg.noise_vars[i] * rate_fraction(r[i]);
    }
  }
  return own - 0.5 * std::log2(inner);
}

Eigen::MatrixXd conditional_covariance(const Eigen::MatrixXd& sigma_u, SensorSet subset) {
  const auto n = static_cast<std::size_t>(sigma_u.rows());
  const auto s_idx = subset.indices();
  const auto c_idx = subset.complement(n).indices();
  Eigen::MatrixXd q = principal_block(sigma_u, s_idx);
  if (c_idx.empty() || s_idx.empty()) return q;

  const Eigen::MatrixXd sc = principal_block(sigma_u, c_idx);
  Eigen::MatrixXd cross(s_idx.size(), c_idx.size());
  for (std::size_t a = 0; a < s_idx.size(); ++a)
    for (std::size_t b = 0; b < c_idx.size(); ++b) cross(a, b) = sigma_u(s_idx[a], c_idx[b]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sc);
  const auto& ev = eig.eigenvalues();
  const double hi = ev.maxCoeff();
  const double lo = ev.minCoeff();
  if (!(hi > 0.0) || !(lo > hi * 1e-12)) {
    throw Error(ErrorCode::SingularBlock, "conditioning block is numerically singular");
  }
  const Eigen::MatrixXd w = cross * eig.eigenvectors();
  q.noalias() -= w * ev.cwiseInverse().asDiagonal() * w.transpose();
  return 0.5 * (q + q.transpose());
}

double mac_rhs_correlated(const NetworkConfig& cfg, std::span<const double> powers,
                          const Eigen::MatrixXd& rho_tilde, SensorSet subset) {
  if (subset.empty()) return 0.0;
  // Conditioning on U(Sc) is scale free, so the Schur complement is taken on the
  // correlation matrix and rescaled; zero-power sensors stay well defined.
  const Eigen::MatrixXd q = conditional_covariance(rho_tilde, subset);
  const auto idx = subset.indices();
  Eigen::VectorXd w(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) {
    w(a) = std::sqrt(cfg.gains[idx[a]] * powers[idx[a]]);
  }
  const double quad = std::max(0.0, w.dot(q * w));
  return 0.5 * std::log2(1.0 + quad / cfg.sigma_w2);
}

double mac_rhs_correlated(const NetworkConfig& cfg, std::span<const double> powers,
                          std::span<const double> r, SensorSet subset) {
  if (subset.empty()) return 0.0;
  const auto n = static_cast<Eigen::Index>(cfg.size());
  Eigen::MatrixXd rho_tilde = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) rho_tilde(i, j) = codeword_correlation(cfg, i, j, r[i], r[j]);
  return mac_rhs_correlated(cfg, powers, rho_tilde, subset);
}

double mac_rhs_independent(const NetworkConfig& cfg, std::span<const double> powers,
                           SensorSet subset) {
  double snr = 0.0;
  for (std::size_t j : subset.indices()) snr += powers[j] * cfg.gains[j];
  return 0.5 * std::log2(1.0 + snr / cfg.sigma_w2);
}

FeasibilityVerdict check_feasible(const NetworkConfig& cfg, std::span<const double> powers,
                                  std::span<const double> r, double target_d,
                                  CodingScheme scheme, Exec exec) {
  const std::size_t n = cfg.size();
  if (n > kMaxSubsetSensors) {
    throw Error(ErrorCode::TooManySensors, "exhaustive subset check supports L <= 20");
  }
  if (powers.size() != n || r.size() != n) {
    throw Error(ErrorCode::IndexOutOfRange, "powers/rates length != L");
  }
  const double d_e = distortion_from_r(cfg, r);

  Eigen::MatrixXd rho_tilde = Eigen::MatrixXd::Identity(n, n);
  if (scheme == CodingScheme::Joint) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) rho_tilde(i, j) = codeword_correlation(cfg, i, j, r[i], r[j]);
  }

  const std::int64_t count = (std::int64_t{1} << n) - 1;
  std::vector<double> margin(static_cast<std::size_t>(count));
  auto eval = [&](std::int64_t k) {
    const SensorSet s(static_cast<std::uint32_t>(k + 1));
    const double lhs = ceo_rate_lhs(cfg, r, s, d_e, DistortionCheck::Override);
    const double rhs = scheme == CodingScheme::Joint ? mac_rhs_correlated(cfg, powers, rho_tilde, s)
                                                     : mac_rhs_independent(cfg, powers, s);
    margin[static_cast<std::size_t>(k)] = lhs - rhs;
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t k = 0; k < count; ++k) eval(k);
  } else {
    for (std::int64_t k = 0; k < count; ++k) eval(k);
  }

  FeasibilityVerdict v;
  v.achieved_d = d_e;
  v.distortion_ok = d_e <= target_d + kDistortionTolerance;
  // Ties resolve to the larger subset so an all-zero allocation reports the full set.
  v.worst_margin = -std::numeric_limits<double>::infinity();
  for (std::int64_t k = count - 1; k >= 0; --k) {
    if (margin[static_cast<std::size_t>(k)] > v.worst_margin) {
      v.worst_margin = margin[static_cast<std::size_t>(k)];
      v.worst_subset = SensorSet(static_cast<std::uint32_t>(k + 1));
    }
  }
  v.feasible = v.distortion_ok && v.worst_margin <= kRateTolerance;
  return v;
}

double gaussian_mutual_information(const Eigen::MatrixXd& cov, std::span<const std::size_t> a,
                                   std::span<const std::size_t> b) {
  for (std::size_t i : a) {
    if (std::find(b.begin(), b.end(), i) != b.end()) {
      throw Error(ErrorCode::OverlappingSets, "mutual information needs disjoint index sets");
    }
  }
  if (a.empty() || b.empty()) return 0.0;
  std::vector<std::size_t> ab(a.begin(), a.end());
  ab.insert(ab.end(), b.begin(), b.end());
  const double v = 0.5 * (log2_det_spd(principal_block(cov, a)) +
                          log2_det_spd(principal_block(cov, b)) -
                          log2_det_spd(principal_block(cov, ab)));
  return std::max(0.0, v);
}

double gaussian_conditional_mutual_information(const Eigen::MatrixXd& cov,
                                               std::span<const std::size_t> a,
                                               std::span<const std::size_t> b,
                                               std::span<const std::size_t> c) {
  std::vector<std::size_t> bc(b.begin(), b.end());
  bc.insert(bc.end(), c.begin(), c.end());
  return gaussian_mutual_information(cov, a, bc) - gaussian_mutual_information(cov, a, c);
}

std::vector<std::size_t> TestChannelModel::u_of(SensorSet s) const {
  std::vector<std::size_t> out;
  for (std::size_t i : s.indices()) out.push_back(u(i));
  return out;
}

std::vector<std::size_t> TestChannelModel::x_of(SensorSet s) const {
  std::vector<std::size_t> out;
  for (std::size_t i : s.indices()) out.push_back(x(i));
  return out;
}

TestChannelModel test_channel_model(const NetworkConfig& cfg, std::span<const double> powers,
                                    std::span<const double> r) {
  const std::size_t n = cfg.size();
  if (powers.size() != n || r.size() != n) {
    throw Error(ErrorCode::IndexOutOfRange, "powers/rates length != L");
  }
  // Primitive independent variables: X_0, N_1..N_L, V_1..V_L, W.
  const std::size_t prim = 2 + 2 * n;
  const std::size_t vars = 2 + 2 * n;
  Eigen::VectorXd var(prim);
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(vars, prim);
  var(0) = cfg.sigma_s2;
  var(prim - 1) = cfg.sigma_w2;

  TestChannelModel m;
  m.sensors = n;
  map(m.x0(), 0) = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    check_rate(r[i]);
    var(1 + i) = cfg.noise_vars[i];
    map(m.x(i), 0) = 1.0;
    map(m.x(i), 1 + i) = 1.0;
    const std::size_t v = 1 + n + i;
    double u_var = 1.0;
    if (r[i] > 0.0) {
      var(v) = cfg.noise_vars[i] / std::expm1(2.0 * r[i] * std::log(2.0));
      map(m.u(i), 0) = 1.0;
      map(m.u(i), 1 + i) = 1.0;
      map(m.u(i), v) = 1.0;
      u_var = cfg.sigma_s2 + cfg.noise_vars[i] + var(v);
    } else {
      var(v) = 1.0;
      map(m.u(i), v) = 1.0;
    }
    const double scale = std::sqrt(cfg.gains[i] * powers[i] / u_var);
    map.row(m.z()) += scale * map.row(m.u(i));
  }
  map(m.z(), prim - 1) = 1.0;
  m.cov = map * var.asDiagonal() * map.transpose();
  return m;
}

}  // namespace macpower
