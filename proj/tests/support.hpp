#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "macpower/gp_core.hpp"
#include "macpower/model.hpp"

namespace testing_support {

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  macpower::NetworkConfig network(std::size_t sensors) {
    std::vector<double> g, n;
    for (std::size_t i = 0; i < sensors; ++i) {
      g.push_back(log_uniform(0.1, 10.0));
      n.push_back(log_uniform(0.1, 10.0));
    }
    return macpower::make_network(log_uniform(0.5, 2.0), log_uniform(0.5, 2.0), g, n);
  }

  std::vector<double> rates(std::size_t sensors, double lo, double hi) {
    std::vector<double> r;
    for (std::size_t i = 0; i < sensors; ++i) r.push_back(uniform(lo, hi));
    return r;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

// 1-4 terms over `vars` variables, exponents in [-2, 2], coefficients log-uniform.
inline macpower::Posynomial random_posynomial(Draw& draw, int vars) {
  macpower::Posynomial p;
  const int terms = draw.integer(1, 4);
  for (int k = 0; k < terms; ++k) {
    macpower::Monomial m(draw.log_uniform(1e-2, 1e2));
    for (int v = 0; v < vars; ++v) {
      if (draw.uniform(0.0, 1.0) < 0.7) m.exponents[v] = draw.uniform(-2.0, 2.0);
    }
    p.terms.push_back(m);
  }
  return p;
}

// Signomial program that is feasible for large x and bounded below:
// min sum of increasing monomials s.t. decreasing posynomial <= 1 and
// c <= sum of increasing monomials.
inline macpower::GpProblem random_signomial_problem(Draw& draw, std::vector<double>& init) {
  using namespace macpower;
  GpProblem gp;
  const int n = draw.integer(2, 4);
  for (int v = 0; v < n; ++v) gp.add_variable("x" + std::to_string(v));
  auto increasing = [&](int v, double c) {
    Monomial m(c);
    m.exponents[v] = draw.uniform(0.3, 2.0);
    const int w = draw.integer(0, n - 1);
    if (w != v) m.exponents[w] = draw.uniform(0.0, 1.0);
    return m;
  };
  for (int v = 0; v < n; ++v) gp.objective.terms.push_back(increasing(v, draw.log_uniform(0.1, 10.0)));
  Posynomial floor;
  for (int v = 0; v < n; ++v) {
    Monomial m(draw.log_uniform(0.1, 1.0) / n);
    m.exponents[v] = -draw.uniform(0.5, 2.0);
    floor.terms.push_back(m);
  }
  gp.constraints.push_back(SignomialConstraint::leq_one(floor, "floor"));
  Posynomial rhs;
  for (int k = 0; k < draw.integer(2, 3); ++k) {
    rhs.terms.push_back(increasing(draw.integer(0, n - 1), draw.log_uniform(0.1, 10.0)));
  }
  gp.constraints.push_back(SignomialConstraint::leq(Monomial(draw.log_uniform(1.0, 10.0)), rhs, "reach"));
  init.assign(static_cast<std::size_t>(n), 1e6);
  return gp;
}

inline macpower::NetworkConfig b1() { return macpower::make_network(1.0, 1.0, {1.0, 1.0}, {1.0, 1.0}); }

}  // namespace testing_support
