#include "macpower/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "macpower/error.hpp"

namespace macpower {

void SweepSpec::validate() const {
  if (divisions < 2) throw Error(ErrorCode::InvalidConfig, "divisions must be >= 2");
  if (positions.empty()) throw Error(ErrorCode::InvalidConfig, "no positions");
  std::set<int> seen;
  for (int p : positions) {
    if (p < 1 || p >= divisions) {
      throw Error(ErrorCode::PositionOutOfRange, "position index outside 1..divisions-1");
    }
    if (!seen.insert(p).second) throw Error(ErrorCode::InvalidConfig, "position indices must be distinct");
  }
  for (double v : {beta_c, beta_s, kappa_c, kappa_s, sigma_s2, sigma_w2}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidConfig, "exponents, constants and variances must be > 0");
    }
  }
  if (!(d > 0.0 && d < sigma_s2)) throw Error(ErrorCode::InvalidDistortion, "need 0 < D < sigma_s2");
  if (schemes.empty()) throw Error(ErrorCode::InvalidConfig, "no schemes");
}

double SweepSpec::resolved_d0() const {
  return d0 > 0.0 ? d0 : max_source_distance(2, beta_s, kappa_s, sigma_s2, d);
}

NetworkConfig sweep_network(const SweepSpec& spec, int i, int j) {
  LinearTopology topo;
  topo.d0 = spec.resolved_d0();
  topo.positions = {topo.d0 * i / spec.divisions, topo.d0 * j / spec.divisions};
  topo.beta_c = spec.beta_c;
  topo.beta_s = spec.beta_s;
  topo.kappa_c = spec.kappa_c;
  topo.kappa_s = spec.kappa_s;
  topo.sigma_s2 = spec.sigma_s2;
  topo.sigma_w2 = spec.sigma_w2;
  return build_linear_topology(topo);
}

namespace {

std::optional<double> solve_cell(const SweepSpec& spec, const NetworkConfig& cfg, Scheme s) {
  try {
    SchemeSolution sol;
    if (s == Scheme::SSCC && !spec.sscc_time_share) {
      sol = minimize_power_sscc_general(cfg, spec.d, spec.options);
    } else {
      sol = solve_scheme(cfg, spec.d, s, spec.options);
    }
    if (sol.status == SolveStatus::Infeasible) return std::nullopt;
    return sol.total_power;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

std::vector<SweepCell> run_sweep(const SweepSpec& spec, Exec exec) {
  spec.validate();
  const std::size_t n = spec.positions.size();
  std::vector<SweepCell> cells(n * n);
  auto run = [&](std::size_t k) {
    SweepCell& c = cells[k];
    c.i = spec.positions[k / n];
    c.j = spec.positions[k % n];
    const NetworkConfig cfg = sweep_network(spec, c.i, c.j);
    const auto has = [&](Scheme s) {
      return std::find(spec.schemes.begin(), spec.schemes.end(), s) != spec.schemes.end();
    };
    if (has(Scheme::SSCC)) c.p_sscc = solve_cell(spec, cfg, Scheme::SSCC);
    if (has(Scheme::JSCC)) c.p_jscc = solve_cell(spec, cfg, Scheme::JSCC);
    if (has(Scheme::Uncoded)) c.p_uncoded = solve_cell(spec, cfg, Scheme::Uncoded);
    double best = 0.0;
    const std::pair<const std::optional<double>*, const char*> entries[] = {
        {&c.p_sscc, "sscc"}, {&c.p_jscc, "jscc"}, {&c.p_uncoded, "uncoded"}};
    for (const auto& [v, name] : entries) {
      if (*v && (c.winner.empty() || **v < best)) {
        best = **v;
        c.winner = name;
      }
    }
  };
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::size_t k = 0; k < cells.size(); ++k) run(k);
  } else {
    for (std::size_t k = 0; k < cells.size(); ++k) run(k);
  }
  return cells;
}

std::string format_sweep_csv(const std::vector<SweepCell>& cells) {
  std::string out = "i,j,P_sscc,P_jscc,P_uncoded,winner\n";
  char buf[64];
  auto field = [&](const std::optional<double>& v) {
    out += ',';
    if (!v) return;
    std::snprintf(buf, sizeof buf, "%.11e", *v);
    out += buf;
  };
  for (const auto& c : cells) {
    out += std::to_string(c.i) + ',' + std::to_string(c.j);
    field(c.p_sscc);
    field(c.p_jscc);
    field(c.p_uncoded);
    out += ',' + c.winner + '\n';
  }
  return out;
}

}  // namespace macpower
