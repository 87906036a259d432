#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "macpower/model.hpp"

namespace macpower {

using VarId = int;

/// c * prod_k x_k^{a_k}, c > 0.
struct Monomial {
  double coeff = 1.0;
  std::map<VarId, double> exponents;

  Monomial() = default;
  explicit Monomial(double c) : coeff(c) {}
  Monomial(double c, std::initializer_list<std::pair<const VarId, double>> exps)
      : coeff(c), exponents(exps) {}

  double eval(std::span<const double> x) const;
  double log_eval(std::span<const double> log_x) const;
  Monomial pow(double a) const;
};

Monomial operator*(const Monomial& a, const Monomial& b);
Monomial operator/(const Monomial& a, const Monomial& b);

struct Posynomial {
  std::vector<Monomial> terms;

  Posynomial() = default;
  Posynomial(Monomial m) : terms{std::move(m)} {}  // NOLINT: implicit by design
  Posynomial(std::initializer_list<Monomial> ms) : terms(ms) {}

  double eval(std::span<const double> x) const;
  bool is_monomial() const { return terms.size() == 1; }
};

Posynomial operator+(Posynomial a, const Posynomial& b);
Posynomial operator*(const Posynomial& a, const Posynomial& b);
Posynomial operator*(const Posynomial& a, const Monomial& m);

/// base^exponent with exponent in [0, 1].
struct PowerFactor {
  Posynomial base;
  double exponent = 1.0;
};

enum class ConstraintKind { PosyLeqOne, PosyLeqPosy };

/// lhs * prod lhs_factors <= rhs * prod rhs_factors.
/// PosyLeqOne: rhs == 1 and no factors, already a GP constraint.
struct SignomialConstraint {
  Posynomial lhs;
  Posynomial rhs{Monomial(1.0)};
  ConstraintKind kind = ConstraintKind::PosyLeqOne;
  std::vector<PowerFactor> lhs_factors;
  std::vector<PowerFactor> rhs_factors;
  std::string label;

  static SignomialConstraint leq_one(Posynomial p, std::string label = {});
  static SignomialConstraint leq(Posynomial lhs, Posynomial rhs, std::string label = {});

  /// lhs side / rhs side evaluated at x; <= 1 means satisfied.
  double ratio(std::span<const double> x) const;
};

struct Variable {
  std::string name;
  double lower = 0.0;  // 0 means unbounded below
  double upper = std::numeric_limits<double>::infinity();
};

struct GpProblem {
  std::vector<Variable> variables;
  Posynomial objective;
  std::vector<SignomialConstraint> constraints;

  VarId add_variable(std::string name, double lower = 0.0,
                     double upper = std::numeric_limits<double>::infinity());
  std::size_t size() const { return variables.size(); }
  bool is_pure_gp() const;

  /// Throws InvalidProblem on undeclared variables, empty posynomials,
  /// non-positive coefficients or factor exponents outside [0,1].
  void validate() const;

  /// Largest constraint ratio (including bounds); <= 1 + tol means feasible.
  double max_violation(std::span<const double> x) const;
};

struct SolverOptions {
  double tol = 1e-9;              // barrier duality gap, log-objective units
  double outer_tol = 1e-6;        // SP relative objective change and log-anchor move
  int max_outer = 100;
  int max_newton = 200;           // per centering step
  double barrier_growth = 10.0;
  std::ostream* debug = nullptr;  // condensed GP dump per outer iteration
};

struct SolveReport {
  std::vector<double> x_star;
  double objective_value = 0.0;
  double kkt_residual = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  SolveStatus status = SolveStatus::MaxIter;
  std::vector<double> objective_history;  // accepted SP objectives
  double rejected_increase = 0.0;         // relative rise of a discarded final GP step
};

/// Geometric-mean under-estimator of p, tight at the anchor.
Monomial condense_posynomial(const Posynomial& p, std::span<const double> anchor);

SolveReport solve_gp(const GpProblem& problem, std::span<const double> init,
                     const SolverOptions& opts = {});

SolveReport solve_signomial(const GpProblem& problem, std::span<const double> init,
                            const SolverOptions& opts = {});

void write_monomial(std::ostream& os, const Monomial& m);

}  // namespace macpower
