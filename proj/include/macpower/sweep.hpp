#pragma once

#include <optional>
#include <string>
#include <vector>

#include "macpower/exec.hpp"
#include "macpower/model.hpp"
#include "macpower/schemes.hpp"

namespace macpower {

/// Two sensors at positions i*d0/divisions and j*d0/divisions on the
/// source-to-fusion segment, for every ordered pair of listed indices.
struct SweepSpec {
  double d0 = 0.0;  // <= 0: largest distance at which two sensors can meet d
  std::vector<int> positions{1, 2, 3, 4, 5, 6, 7, 8, 9};
  int divisions = 10;
  double beta_c = 2.0;
  double beta_s = 2.0;
  double kappa_c = 1.0;
  double kappa_s = 1.0;
  double sigma_s2 = 1.0;
  double sigma_w2 = 1.0;
  double d = 0.5;
  std::vector<Scheme> schemes{Scheme::SSCC, Scheme::JSCC, Scheme::Uncoded};
  bool sscc_time_share = false;  // two-sensor time-share formulation instead of the subset SP
  SchemeOptions options;

  /// Throws InvalidConfig or PositionOutOfRange.
  void validate() const;
  double resolved_d0() const;
};

struct SweepCell {
  int i = 0;
  int j = 0;
  std::optional<double> p_sscc;
  std::optional<double> p_jscc;
  std::optional<double> p_uncoded;
  std::string winner;  // empty when no scheme produced a value
};

NetworkConfig sweep_network(const SweepSpec& spec, int i, int j);

/// Cells in row-major order of (i, j); infeasible or failed solves leave the field empty.
std::vector<SweepCell> run_sweep(const SweepSpec& spec, Exec exec = Exec::Serial);

/// Header `i,j,P_sscc,P_jscc,P_uncoded,winner`; values as %.11e.
std::string format_sweep_csv(const std::vector<SweepCell>& cells);

}  // namespace macpower
