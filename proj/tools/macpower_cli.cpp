// macpower: minimum transmit power for Gaussian source estimation over a
// Gaussian MAC.
//
//   macpower solve      --config net.json [-D 0.5] [--scheme all]
//   macpower sweep      [-D 0.5 -D 0.01] [-o out/]
//   macpower symmetric  -L 2 --sigma-n2 1 -D 0.5
//   macpower asymptotic --sigma-n2 1 -D 0.5 [--gamma 1 -L 2]
//   macpower verify     --config net.json [--samples 1000000 --seed 1]
//
// Exit codes: 0 ok, 1 bad input, 2 infeasible target, 3 oracle mismatch.
// MACPOWER_LOG selects stderr verbosity: quiet, info (default), debug, trace.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "json.hpp"
#include "macpower/asymptotics.hpp"
#include "macpower/error.hpp"
#include "macpower/ordering.hpp"
#include "macpower/schemes.hpp"
#include "macpower/sweep.hpp"
#include "macpower/verify.hpp"

namespace fs = std::filesystem;
using namespace macpower;

namespace {

enum class Level { Quiet = 0, Info = 1, Debug = 2, Trace = 3 };

Level log_level() {
  static const Level level = [] {
    const char* v = std::getenv("MACPOWER_LOG");
    if (!v) return Level::Info;
    const std::string s(v);
    if (s == "quiet" || s == "0") return Level::Quiet;
    if (s == "debug" || s == "2") return Level::Debug;
    if (s == "trace" || s == "3") return Level::Trace;
    return Level::Info;
  }();
  return level;
}

template <class... Args>
void log_at(Level at, const char* fmt, Args... args) {
  if (log_level() < at) return;
  std::fprintf(stderr, "[macpower] ");
  if constexpr (sizeof...(Args) == 0) {
    std::fputs(fmt, stderr);
  } else {
    std::fprintf(stderr, fmt, args...);
  }
  std::fputc('\n', stderr);
}

struct InfeasibleTarget : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverFlags {
  std::string sscc_form = "auto";
  int alpha_grid = 11;
  double tol = 1e-9;
  double outer_tol = 1e-6;
  int max_outer = 100;

  void add(CLI::App* app) {
    app->add_option("--sscc-form", sscc_form, "auto | time-share | subset")
        ->check(CLI::IsMember({"auto", "time-share", "subset"}));
    app->add_option("--alpha-grid", alpha_grid, "time-share grid points over [0,1]")->check(CLI::Range(2, 1001));
    app->add_option("--tol", tol, "barrier duality-gap tolerance")->check(CLI::PositiveNumber);
    app->add_option("--outer-tol", outer_tol, "SP relative stopping tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-outer", max_outer, "SP outer-iteration cap")->check(CLI::PositiveNumber);
  }

  SchemeOptions options() const {
    SchemeOptions o;
    o.alpha_grid = alpha_grid;
    o.solver.tol = tol;
    o.solver.outer_tol = outer_tol;
    o.solver.max_outer = max_outer;
    if (log_level() >= Level::Trace) o.solver.debug = &std::cerr;
    return o;
  }
};

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

SchemeSolution run_scheme(const NetworkConfig& cfg, double d, Scheme s, const SolverFlags& f) {
  const SchemeOptions opts = f.options();
  if (s == Scheme::SSCC && cfg.size() == 2 && f.sscc_form == "subset") {
    return minimize_power_sscc_general(cfg, d, opts);
  }
  if (s == Scheme::SSCC && cfg.size() > 2 && f.sscc_form == "time-share") {
    throw Error(ErrorCode::Unsupported, "the time-share formulation needs L = 2");
  }
  return solve_scheme(cfg, d, s, opts);
}

std::vector<Scheme> parse_schemes(const std::string& arg, bool with_bound) {
  if (arg == "all") {
    std::vector<Scheme> v{Scheme::SSCC, Scheme::JSCC, Scheme::Uncoded};
    if (with_bound) v.push_back(Scheme::LowerBound);
    return v;
  }
  std::vector<Scheme> out;
  std::stringstream ss(arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto s = parse_scheme(item);
    if (!s) throw Error(ErrorCode::InvalidConfig, "unknown scheme '" + item + "'");
    out.push_back(*s);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidConfig, "no scheme given");
  return out;
}

double resolve_d(const cli::InstanceConfig& inst, std::optional<double> flag) {
  if (flag) return *flag;
  if (inst.d) return *inst.d;
  throw Error(ErrorCode::InvalidConfig, "no distortion target: pass -D or set \"D\" in the config");
}

void require_above_floor(const NetworkConfig& cfg, double d) {
  const double d_min = min_distortion(cfg);
  if (!(d > d_min)) {
    std::ostringstream os;
    os << "infeasible: D = " << d << " is not above d_min = " << d_min
       << " (distortion with unlimited rate and power)";
    throw InfeasibleTarget(os.str());
  }
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
  std::string config;
  std::optional<double> d;
  std::string scheme = "all";
  std::string output;
  SolverFlags solver;
};

nlohmann::json record(const SchemeSolution& s) {
  return {{"scheme", std::string(to_string(s.scheme))},
          {"total_power", s.total_power},
          {"powers", s.powers},
          {"r", s.r},
          {"rates", s.rates},
          {"alpha", s.alpha},
          {"achieved_d", s.achieved_d},
          {"status", std::string(to_string(s.status))},
          {"outer_iterations", s.outer_iterations},
          {"inner_iterations", s.inner_iterations},
          {"note", s.note}};
}

int cmd_solve(const SolveArgs& a) {
  const cli::InstanceConfig inst = cli::load_instance(a.config);
  const NetworkConfig& cfg = inst.network;
  const double d = resolve_d(inst, a.d);
  const FeasibilityReport fr = validate_feasibility(cfg, {d}, inst.topology ? &*inst.topology : nullptr);
  std::printf("network: L=%zu sigma_s2=%g sigma_w2=%g D=%g d_min=%.6g", cfg.size(), cfg.sigma_s2,
              cfg.sigma_w2, d, fr.d_min);
  if (fr.max_d0) std::printf(" max_d0=%.6g", *fr.max_d0);
  std::printf("\n");
  require_above_floor(cfg, d);

  const std::vector<Scheme> schemes = parse_schemes(a.scheme, true);
  nlohmann::json rec{{"config", inst.source}, {"D", d}, {"d_min", fr.d_min}, {"results", nlohmann::json::array()}};
  std::printf("%-11s %-14s %-10s %-12s %s\n", "scheme", "total_power", "status", "achieved_D", "powers");
  std::string winner;
  double best = 0.0;
  int failures = 0;
  for (Scheme s : schemes) {
    const auto t0 = std::chrono::steady_clock::now();
    log_at(Level::Info, "solving %s", std::string(to_string(s)).c_str());
    SchemeSolution sol;
    try {
      sol = run_scheme(cfg, d, s, a.solver);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Infeasible && e.code() != ErrorCode::Unsupported) throw;
      std::printf("%-11s %s\n", std::string(to_string(s)).c_str(), e.what());
      ++failures;
      continue;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log_at(Level::Debug, "%s: %d outer, %d inner iterations, %.3f s%s%s", std::string(to_string(s)).c_str(),
        sol.outer_iterations, sol.inner_iterations, secs, sol.note.empty() ? "" : "; ", sol.note.c_str());
    std::printf("%-11s %-14.8g %-10s %-12.6g %s\n", std::string(to_string(s)).c_str(), sol.total_power,
                std::string(to_string(sol.status)).c_str(), sol.achieved_d, join(sol.powers).c_str());
    if (sol.status == SolveStatus::Infeasible) {
      ++failures;
      continue;
    }
    rec["results"].push_back(record(sol));
    if (s != Scheme::LowerBound && (winner.empty() || sol.total_power < best)) {
      best = sol.total_power;
      winner = std::string(to_string(s));
    }
  }
  if (!winner.empty()) std::printf("winner: %s\n", winner.c_str());
  rec["winner"] = winner;
  if (!a.output.empty()) {
    std::ofstream out(a.output, std::ios::app);
    if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + a.output);
    out << rec.dump() << '\n';
  }
  if (failures == static_cast<int>(schemes.size())) {
    throw InfeasibleTarget("infeasible: no requested scheme reaches D = " + std::to_string(d));
  }
  return 0;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::vector<double> d{0.5, 0.1, 0.01};
  double d0 = 0.0;
  std::vector<int> positions{1, 2, 3, 4, 5, 6, 7, 8, 9};
  int divisions = 10;
  double beta_c = 2.0, beta_s = 2.0, kappa_c = 1.0, kappa_s = 1.0;
  double sigma_s2 = 1.0, sigma_w2 = 1.0;
  std::string schemes = "all";
  bool parallel = false;
  std::string output;
  SolverFlags solver;
};

const char* kPlotScript = R"(#!/usr/bin/env python3
"""Renders every sweep_D*.csv next to this script as three power surfaces."""
import csv
import glob
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

here = os.path.dirname(os.path.abspath(__file__))
for path in sorted(glob.glob(os.path.join(here, "sweep_D*.csv"))):
    with open(path) as f:
        rows = list(csv.DictReader(f))
    idx = sorted({int(r["i"]) for r in rows})
    pos = {v: k for k, v in enumerate(idx)}
    fig = plt.figure(figsize=(15, 4.5))
    for n, (col, title) in enumerate(
        [("P_sscc", "separate"), ("P_jscc", "joint"), ("P_uncoded", "uncoded")]
    ):
        z = np.full((len(idx), len(idx)), np.nan)
        for r in rows:
            if r[col]:
                z[pos[int(r["i"])], pos[int(r["j"])]] = float(r[col])
        x, y = np.meshgrid(idx, idx, indexing="ij")
        ax = fig.add_subplot(1, 3, n + 1, projection="3d")
        ax.plot_surface(x, y, z, cmap="viridis")
        ax.set_xlabel("i")
        ax.set_ylabel("j")
        ax.set_zlabel("total power")
        ax.set_title(title)
    fig.suptitle(os.path.basename(path))
    fig.tight_layout()
    fig.savefig(os.path.splitext(path)[0] + ".png", dpi=120)
    plt.close(fig)
)";

std::string d_tag(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", d);
  return buf;
}

int cmd_sweep(const SweepArgs& a) {
  SweepSpec base;
  base.d0 = a.d0;
  base.positions = a.positions;
  base.divisions = a.divisions;
  base.beta_c = a.beta_c;
  base.beta_s = a.beta_s;
  base.kappa_c = a.kappa_c;
  base.kappa_s = a.kappa_s;
  base.sigma_s2 = a.sigma_s2;
  base.sigma_w2 = a.sigma_w2;
  base.schemes = parse_schemes(a.schemes, false);
  for (Scheme s : base.schemes) {
    if (s == Scheme::LowerBound) throw Error(ErrorCode::InvalidConfig, "the sweep compares sscc, jscc and uncoded");
  }
  base.sscc_time_share = a.solver.sscc_form == "time-share";
  base.options = a.solver.options();

  if (!a.output.empty()) fs::create_directories(a.output);
  for (double d : a.d) {
    SweepSpec spec = base;
    spec.d = d;
    spec.validate();
    const auto t0 = std::chrono::steady_clock::now();
    log_at(Level::Info, "sweep D=%g d0=%g over %zu cells", d, spec.resolved_d0(),
        spec.positions.size() * spec.positions.size());
    const auto cells = run_sweep(spec, a.parallel ? Exec::Parallel : Exec::Serial);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string csv = format_sweep_csv(cells);
    int wins[3] = {0, 0, 0}, empty = 0;
    for (const auto& c : cells) {
      if (c.winner == "sscc") ++wins[0];
      else if (c.winner == "jscc") ++wins[1];
      else if (c.winner == "uncoded") ++wins[2];
      if (c.winner.empty()) ++empty;
    }
    if (a.output.empty()) {
      std::printf("# D=%g d0=%.6g\n%s", d, spec.resolved_d0(), csv.c_str());
    } else {
      const fs::path path = fs::path(a.output) / ("sweep_D" + d_tag(d) + ".csv");
      std::ofstream(path) << csv;
      std::printf("D=%g d0=%.6g: wins sscc %d, jscc %d, uncoded %d, no value %d; %.1f s -> %s\n", d,
                  spec.resolved_d0(), wins[0], wins[1], wins[2], empty, secs, path.c_str());
    }
  }
  if (!a.output.empty()) {
    const fs::path script = fs::path(a.output) / "plot_sweep.py";
    std::ofstream(script) << kPlotScript;
    fs::permissions(script, fs::perms::owner_exec, fs::perm_options::add);
    std::printf("plot script: %s\n", script.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------- symmetric

struct SymmetricArgs {
  std::size_t sensors = 2;
  double sigma_s2 = 1.0, sigma_n2 = 1.0, sigma_w2 = 1.0, gain = 1.0;
  double d = 0.5;
};

int cmd_symmetric(const SymmetricArgs& a) {
  SymmetricPowers p;
  try {
    p = symmetric_closed_forms(a.sensors, a.sigma_s2, a.sigma_n2, a.d);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InfeasibleSymmetric) throw;
    const double d_min = 1.0 / (1.0 / a.sigma_s2 + static_cast<double>(a.sensors) / a.sigma_n2);
    std::ostringstream os;
    os << "infeasible: D = " << a.d << " is not above d_min = " << d_min;
    throw InfeasibleTarget(os.str());
  }
  const double scale = a.sigma_w2 / a.gain * static_cast<double>(a.sensors);
  std::printf("L=%zu sigma_s2=%g sigma_n2=%g D=%g\n", a.sensors, a.sigma_s2, a.sigma_n2, a.d);
  std::printf("%-11s %-16s %s\n", "scheme", "P g / sigma_w2", "total power");
  const std::pair<const char*, double> rows[] = {
      {"sscc", p.p_s}, {"jscc", p.p_j}, {"uncoded", p.p_a}, {"lowerbound", p.p_lob}};
  for (const auto& [name, v] : rows) std::printf("%-11s %-16.10g %.10g\n", name, v, v * scale);
  std::printf("r=%.10g bits  rho~=%.10g  lambda=%.10g  jscc(alt denominator)=%.10g\n", p.r, p.rho_tilde,
              p.lambda, p.p_j_alt);
  return 0;
}

// ---------------------------------------------------------------- asymptotic

struct AsymptoticArgs {
  std::size_t sensors = 2;
  double sigma_s2 = 1.0, sigma_n2 = 1.0, d = 0.5, gamma = 0.0;
  std::vector<std::size_t> trace{2, 10, 100, 10000};
};

int cmd_asymptotic(const AsymptoticArgs& a) {
  const AsymptoticReport r = asymptotic_report(a.sensors, a.sigma_s2, a.sigma_n2, a.d, a.gamma);
  std::printf("large-L limits (sigma_s2=%g sigma_n2=%g D=%g)\n", a.sigma_s2, a.sigma_n2, a.d);
  std::printf("  L   P g/sigma_w2  sscc %.10g  jscc %.10g\n", r.limit_s, r.limit_j);
  std::printf("  L^2 P g/sigma_w2  uncoded %.10g  lowerbound %.10g\n", r.limit_a, r.limit_lob);
  std::printf("high-SNR ratios (L=%zu gamma*=%g): lambda*=%.10g\n", a.sensors, a.gamma, r.lambda_star);
  if (r.degenerate) {
    std::printf("  degenerate: lambda* = 1, the ratios diverge\n");
  } else {
    std::printf("  sscc %.10g  jscc %.10g  uncoded %.10g  eta %g\n", r.ratio_s, r.ratio_j, r.ratio_a, r.eta);
  }
  std::printf("finite-L trace\n%8s %14s %14s %14s %14s\n", "L", "L*P_s", "L*P_j", "L^2*P_a", "L^2*P_lob");
  for (const LargeLRow& row : large_l_trace(a.sigma_s2, a.sigma_n2, a.d, a.trace)) {
    if (!row.feasible) {
      std::printf("%8zu %14s\n", row.sensors, "infeasible");
      continue;
    }
    std::printf("%8zu %14.8g %14.8g %14.8g %14.8g\n", row.sensors, row.scaled_s, row.scaled_j, row.scaled_a,
                row.scaled_lob);
  }
  if (a.gamma > 0.0 && !r.degenerate) {
    const std::vector<double> noise{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
    const HighSnrSweep sw = high_snr_sweep(a.sensors, a.sigma_s2, a.gamma, noise);
    std::printf("high-SNR sweep, D = sigma_s2 (sigma_n2/sigma_s2)^gamma*\n%10s %12s %12s %12s %12s\n",
                "sigma_n2", "D", "ratio_s", "ratio_j", "ratio_a");
    for (const HighSnrPoint& p : sw.points) {
      std::printf("%10.3g %12.4g %12.8g %12.8g %12.8g\n", p.sigma_n2, p.d, p.ratio_s, p.ratio_j, p.ratio_a);
    }
    std::printf("eta (log-log slope): sscc %.6f  jscc %.6f  uncoded %.6f\n", sw.eta_s, sw.eta_j, sw.eta_a);
  }
  return 0;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::string config;
  std::optional<double> d;
  std::string scheme = "all";
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 1;
  double tolerance = 0.02;
  int rate_points = 81;
  int refine = 10;
  bool parallel = false;
  SolverFlags solver;
};

int cmd_verify(const VerifyArgs& a) {
  const cli::InstanceConfig inst = cli::load_instance(a.config);
  const NetworkConfig& cfg = inst.network;
  const double d = resolve_d(inst, a.d);
  require_above_floor(cfg, d);
  const Exec exec = a.parallel ? Exec::Parallel : Exec::Serial;
  GridSpec grid;
  grid.rate_points = a.rate_points;
  grid.refine = a.refine;

  int mismatches = 0;
  auto line = [&](const char* scheme, const char* oracle, double solver, double value, double allowed) {
    const double delta = std::abs(solver - value) / std::max(std::abs(value), 1e-300);
    const bool ok = delta <= allowed;
    if (!ok) ++mismatches;
    std::printf("%-9s %-12s solver %-14.8g oracle %-14.8g delta %-10.3e %s\n", scheme, oracle, solver, value, delta,
                ok ? "ok" : "MISMATCH");
  };

  for (Scheme s : parse_schemes(a.scheme, false)) {
    const std::string name(to_string(s));
    log_at(Level::Info, "checking %s", name.c_str());
    SchemeSolution sol;
    try {
      sol = run_scheme(cfg, d, s, a.solver);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Infeasible && e.code() != ErrorCode::Unsupported) throw;
      std::printf("%-9s %s\n", name.c_str(), e.what());
      continue;
    }
    if (s == Scheme::Uncoded) {
      line(name.c_str(), "eigen", sol.total_power, uncoded_eigen_oracle(cfg, d).value, a.tolerance);
      const OracleResult mc = simulate_uncoded(cfg, sol.powers, a.samples, a.seed, exec);
      const double formula = uncoded_mse(cfg, sol.powers);
      const double z = std::abs(mc.value - formula) / mc.uncertainty;
      if (z > 3.0) ++mismatches;
      std::printf("%-9s %-12s formula %-13.8g empirical %-11.8g se %-10.3e |z| %.2f %s\n", name.c_str(),
                  "monte-carlo", formula, mc.value, mc.uncertainty, z, z <= 3.0 ? "ok" : "MISMATCH");
    }
    if (cfg.size() == 2) {
      const OracleResult g = grid_oracle(cfg, d, s, grid, exec);
      line(name.c_str(), "grid", sol.total_power, g.value, a.tolerance);
    }
    if (s == Scheme::SSCC && cfg.size() == 2) {
      line(name.c_str(), "vertex-scan", sol.total_power, sscc_vertex_oracle(cfg, d).value, a.tolerance);
    }
    if (s == Scheme::SSCC && cfg.size() <= 7 && !sol.rates.empty()) {
      const OracleResult perm = permutation_oracle(cfg, sol.rates);
      line(name.c_str(), "permutation", vertex_power_allocation(cfg, sol.rates).total_power, perm.value, 1e-9);
    }
  }
  if (mismatches) {
    std::printf("%d comparison(s) outside tolerance\n", mismatches);
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum total power for estimating a Gaussian source over a Gaussian multiple-access channel"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "solve one network for one or all schemes");
  s->add_option("-c,--config", solve.config, "network JSON file")->required();
  s->add_option("-D,--distortion", solve.d, "distortion target (overrides the config)");
  s->add_option("-s,--scheme", solve.scheme, "all | sscc | jscc | uncoded | lowerbound, comma separated");
  s->add_option("-o,--output", solve.output, "append a JSON record per run to this file");
  solve.solver.add(s);

  SweepArgs sweep;
  auto* w = app.add_subcommand("sweep", "two-sensor linear-topology sweep over position pairs");
  w->add_option("-D,--distortion", sweep.d, "distortion targets (repeatable)");
  w->add_option("--d0", sweep.d0, "source-to-fusion distance; <= 0 uses the two-sensor feasibility bound");
  w->add_option("--positions", sweep.positions, "position indices in 1..divisions-1")->delimiter(',');
  w->add_option("--divisions", sweep.divisions, "the segment is cut into this many steps");
  w->add_option("--beta-c", sweep.beta_c, "channel path-loss exponent");
  w->add_option("--beta-s", sweep.beta_s, "sensing path-loss exponent");
  w->add_option("--kappa-c", sweep.kappa_c, "channel path-loss constant");
  w->add_option("--kappa-s", sweep.kappa_s, "sensing path-loss constant");
  w->add_option("--sigma-s2", sweep.sigma_s2, "source variance");
  w->add_option("--sigma-w2", sweep.sigma_w2, "receiver noise variance");
  w->add_option("--schemes", sweep.schemes, "all | comma-separated subset of sscc,jscc,uncoded");
  w->add_flag("--parallel", sweep.parallel, "solve cells with OpenMP");
  w->add_option("-o,--output", sweep.output, "directory for CSV files and the plot script; stdout if unset");
  sweep.solver.add(w);

  SymmetricArgs sym;
  auto* y = app.add_subcommand("symmetric", "closed forms for L identical sensors");
  y->add_option("-L,--sensors", sym.sensors, "number of sensors")->check(CLI::PositiveNumber);
  y->add_option("--sigma-s2", sym.sigma_s2, "source variance");
  y->add_option("--sigma-n2", sym.sigma_n2, "measurement noise variance");
  y->add_option("--sigma-w2", sym.sigma_w2, "receiver noise variance");
  y->add_option("-g,--gain", sym.gain, "channel gain");
  y->add_option("-D,--distortion", sym.d, "distortion target");

  AsymptoticArgs asy;
  auto* t = app.add_subcommand("asymptotic", "large-L limits and high-SNR ratios");
  t->add_option("-L,--sensors", asy.sensors, "sensors for the high-SNR ratios")->check(CLI::PositiveNumber);
  t->add_option("--sigma-s2", asy.sigma_s2, "source variance");
  t->add_option("--sigma-n2", asy.sigma_n2, "measurement noise variance");
  t->add_option("-D,--distortion", asy.d, "distortion target");
  t->add_option("--gamma", asy.gamma, "exponent of D in sigma_n2, in [0,1]");
  t->add_option("--trace", asy.trace, "sensor counts for the finite-L table")->delimiter(',');

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "compare solvers with independent oracles");
  v->add_option("-c,--config", ver.config, "network JSON file")->required();
  v->add_option("-D,--distortion", ver.d, "distortion target (overrides the config)");
  v->add_option("-s,--scheme", ver.scheme, "all | comma-separated subset of sscc,jscc,uncoded");
  v->add_option("-n,--samples", ver.samples, "Monte Carlo samples")->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 40));
  v->add_option("--seed", ver.seed, "Monte Carlo seed");
  v->add_option("--tolerance", ver.tolerance, "relative solver-oracle tolerance")->check(CLI::PositiveNumber);
  v->add_option("--rate-points", ver.rate_points, "grid oracle points per rate axis")->check(CLI::Range(3, 100000));
  v->add_option("--refine", ver.refine, "grid oracle refinement factor")->check(CLI::Range(1, 1000));
  v->add_flag("--parallel", ver.parallel, "use the OpenMP kernels");
  ver.solver.add(v);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*w) return cmd_sweep(sweep);
    if (*y) return cmd_symmetric(sym);
    if (*t) return cmd_asymptotic(asy);
    if (*v) return cmd_verify(ver);
  } catch (const InfeasibleTarget& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const Error& e) {
    std::fflush(stdout);
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == ErrorCode::Infeasible ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
