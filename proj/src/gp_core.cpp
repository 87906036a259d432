#include "macpower/gp_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>

#include "macpower/error.hpp"

namespace macpower {

double Monomial::eval(std::span<const double> x) const {
  double v = coeff;
  for (const auto& [id, a] : exponents) v *= std::pow(x[id], a);
  return v;
}

double Monomial::log_eval(std::span<const double> log_x) const {
  double v = std::log(coeff);
  for (const auto& [id, a] : exponents) v += a * log_x[id];
  return v;
}

Monomial Monomial::pow(double a) const {
  Monomial m(std::pow(coeff, a));
  if (a == 0.0) return m;
  for (const auto& [id, e] : exponents) m.exponents[id] = e * a;
  return m;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial m = a;
  m.coeff *= b.coeff;
  for (const auto& [id, e] : b.exponents) {
    const double s = (m.exponents[id] += e);
    if (s == 0.0) m.exponents.erase(id);
  }
  return m;
}

Monomial operator/(const Monomial& a, const Monomial& b) { return a * b.pow(-1.0); }

double Posynomial::eval(std::span<const double> x) const {
  double v = 0.0;
  for (const auto& t : terms) v += t.eval(x);
  return v;
}

Posynomial operator+(Posynomial a, const Posynomial& b) {
  a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
  return a;
}

Posynomial operator*(const Posynomial& a, const Posynomial& b) {
  Posynomial out;
  out.terms.reserve(a.terms.size() * b.terms.size());
  for (const auto& x : a.terms)
    for (const auto& y : b.terms) out.terms.push_back(x * y);
  return out;
}

Posynomial operator*(const Posynomial& a, const Monomial& m) {
  Posynomial out = a;
  for (auto& t : out.terms) t = t * m;
  return out;
}

SignomialConstraint SignomialConstraint::leq_one(Posynomial p, std::string label) {
  SignomialConstraint c;
  c.lhs = std::move(p);
  c.label = std::move(label);
  return c;
}

SignomialConstraint SignomialConstraint::leq(Posynomial lhs, Posynomial rhs, std::string label) {
  SignomialConstraint c;
  c.lhs = std::move(lhs);
  c.rhs = std::move(rhs);
  c.kind = ConstraintKind::PosyLeqPosy;
  c.label = std::move(label);
  return c;
}

double SignomialConstraint::ratio(std::span<const double> x) const {
  double num = lhs.eval(x);
  double den = rhs.eval(x);
  for (const auto& f : lhs_factors) num *= std::pow(f.base.eval(x), f.exponent);
  for (const auto& f : rhs_factors) den *= std::pow(f.base.eval(x), f.exponent);
  return num / den;
}

VarId GpProblem::add_variable(std::string name, double lower, double upper) {
  variables.push_back({std::move(name), lower, upper});
  return static_cast<VarId>(variables.size() - 1);
}

bool GpProblem::is_pure_gp() const {
  for (const auto& c : constraints) {
    if (c.kind != ConstraintKind::PosyLeqOne || !c.lhs_factors.empty() || !c.rhs_factors.empty()) {
      return false;
    }
  }
  return true;
}

namespace {

void check_posynomial(const Posynomial& p, std::size_t n, const char* what) {
  if (p.terms.empty()) {
    throw Error(ErrorCode::InvalidProblem, std::string("empty posynomial in ") + what);
  }
  for (const auto& t : p.terms) {
    if (!(t.coeff > 0.0) || !std::isfinite(t.coeff)) {
      throw Error(ErrorCode::InvalidProblem, std::string("non-positive coefficient in ") + what);
    }
    for (const auto& [id, a] : t.exponents) {
      if (id < 0 || static_cast<std::size_t>(id) >= n || !std::isfinite(a)) {
        throw Error(ErrorCode::InvalidProblem, std::string("undeclared variable in ") + what);
      }
    }
  }
}

}  // namespace

void GpProblem::validate() const {
  const std::size_t n = variables.size();
  check_posynomial(objective, n, "objective");
  for (const auto& c : constraints) {
    check_posynomial(c.lhs, n, "constraint lhs");
    check_posynomial(c.rhs, n, "constraint rhs");
    if (c.kind == ConstraintKind::PosyLeqOne &&
        !(c.rhs.is_monomial() && c.rhs.terms[0].coeff == 1.0 &&
          c.rhs.terms[0].exponents.empty() && c.rhs_factors.empty())) {
      throw Error(ErrorCode::InvalidProblem, "PosyLeqOne constraint with non-unit rhs");
    }
    for (const auto* fs : {&c.lhs_factors, &c.rhs_factors}) {
      for (const auto& f : *fs) {
        check_posynomial(f.base, n, "power factor");
        if (!(f.exponent >= 0.0 && f.exponent <= 1.0)) {
          throw Error(ErrorCode::InvalidProblem, "power factor exponent outside [0,1]");
        }
      }
    }
  }
  for (const auto& v : variables) {
    if (!(v.lower >= 0.0) || !(v.upper > v.lower)) {
      throw Error(ErrorCode::InvalidProblem, "bad bounds on variable " + v.name);
    }
  }
}

double GpProblem::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, c.ratio(x));
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].lower > 0.0) worst = std::max(worst, variables[i].lower / x[i]);
    if (std::isfinite(variables[i].upper)) worst = std::max(worst, x[i] / variables[i].upper);
  }
  return worst;
}

Monomial condense_posynomial(const Posynomial& p, std::span<const double> anchor) {
  for (const auto& t : p.terms) {
    for (const auto& [id, a] : t.exponents) {
      if (!(anchor[id] > 0.0)) {
        throw Error(ErrorCode::NonPositiveAnchor, "condensation anchor must be positive");
      }
    }
  }
  if (p.is_monomial()) return p.terms[0];
  std::vector<double> u(p.terms.size());
  double total = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) total += (u[k] = p.terms[k].eval(anchor));
  Monomial m(1.0);
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double beta = u[k] / total;
    if (beta == 0.0) continue;
    m = m * (p.terms[k] * Monomial(1.0 / beta)).pow(beta);
  }
  // Restore exact tightness lost to rounding in the product of powers.
  m.coeff *= total / m.eval(anchor);
  return m;
}

void write_monomial(std::ostream& os, const Monomial& m) {
  os.precision(17);
  os << m.coeff;
  for (const auto& [id, a] : m.exponents) os << ' ' << id << ':' << a;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// log sum_k exp(a_k . y + b_k) + lin . y + c; the exponential part is absent when there are no terms.
struct LogFn {
  struct Term {
    double b = 0.0;
    std::vector<std::pair<Eigen::Index, double>> a;
  };
  std::vector<Term> terms;
  VectorXd lin;
  double c = 0.0;
  mutable std::vector<double> e;

  double exponents(const VectorXd& y) const {
    e.resize(terms.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < terms.size(); ++k) {
      double v = terms[k].b;
      for (const auto& [i, x] : terms[k].a) v += x * y(i);
      e[k] = v;
      mx = std::max(mx, v);
    }
    return mx;
  }

  double value(const VectorXd& y) const {
    double v = lin.dot(y) + c;
    if (terms.empty()) return v;
    const double mx = exponents(y);
    double s = 0.0;
    for (double x : e) s += std::exp(x - mx);
    return v + mx + std::log(s);
  }

  // g and h must be sized n and n x n.
  void derivatives(const VectorXd& y, double& v, VectorXd& g, MatrixXd& h) const {
    v = lin.dot(y) + c;
    g = lin;
    h.setZero();
    if (terms.empty()) return;
    const double mx = exponents(y);
    double s = 0.0;
    for (double& x : e) s += (x = std::exp(x - mx));
    v += mx + std::log(s);
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const double w = e[k] / s;
      for (const auto& [i, xi] : terms[k].a) {
        g(i) += w * xi;
        for (const auto& [j, xj] : terms[k].a) h(i, j) += w * xi * xj;
      }
    }
    const VectorXd mean = g - lin;
    h.noalias() -= mean * mean.transpose();
  }
};

LogFn compile(const Posynomial& p, Eigen::Index n) {
  LogFn f;
  f.lin = VectorXd::Zero(n);
  for (const auto& t : p.terms) {
    LogFn::Term term;
    term.b = std::log(t.coeff);
    for (const auto& [id, x] : t.exponents) term.a.emplace_back(id, x);
    f.terms.push_back(std::move(term));
  }
  return f;
}

struct BarrierResult {
  VectorXd y;
  int newton = 0;
  bool converged = false;
  double kkt = 0.0;
};

struct Barrier {
  const LogFn& f0;
  const std::vector<LogFn>& fs;
  const SolverOptions& opts;
  std::function<bool(const VectorXd&)> early_stop;

  bool strictly_feasible(const VectorXd& y) const {
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > 700.0) return false;
    for (const auto& f : fs) {
      const double v = f.value(y);
      if (!(v < 0.0)) return false;
    }
    return true;
  }

  double phi(const VectorXd& y, double t) const {
    double v = t * f0.value(y);
    for (const auto& f : fs) v -= std::log(-f.value(y));
    return v;
  }

  void grad_hess(const VectorXd& y, double t, VectorXd& g, MatrixXd& h) const {
    double v;
    const Eigen::Index n = y.size();
    VectorXd gi(n);
    MatrixXd hi(n, n);
    g.resize(n);
    h.resize(n, n);
    f0.derivatives(y, v, g, h);
    g *= t;
    h *= t;
    for (const auto& f : fs) {
      f.derivatives(y, v, gi, hi);
      const double inv = -1.0 / v;
      g += inv * gi;
      h += inv * hi;
      h.noalias() += (inv * inv) * gi * gi.transpose();
    }
  }

  double kkt(const VectorXd& y, double t) const {
    VectorXd g;
    MatrixXd h;
    grad_hess(y, t, g, h);
    return g.norm() / t;
  }

  BarrierResult run(VectorXd y) const {
    BarrierResult r;
    const double m = static_cast<double>(fs.size());
    double t = 1.0;
    const Eigen::Index n = y.size();
    VectorXd g(n), dx(n);
    MatrixXd h(n, n);
    bool centered_all = true;
    while (true) {
      bool centered = false;
      for (int it = 0; it < opts.max_newton; ++it) {
        grad_hess(y, t, g, h);
        double mu = 0.0;
        const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
        Eigen::LLT<MatrixXd> llt;
        for (int k = 0; k < 40; ++k) {
          llt.compute(h + mu * MatrixXd::Identity(n, n));
          if (llt.info() == Eigen::Success) break;
          mu = mu == 0.0 ? 1e-12 * scale : mu * 10.0;
        }
        dx = -llt.solve(g);
        const double dec = -g.dot(dx);
        ++r.newton;
        const double p0 = phi(y, t);
        // phi carries rounding of order eps (|phi| + t); below that the Armijo test cannot
        // resolve progress.
        if (!(dec >= 0.0) || dec / 2.0 < std::max(1e-10, 1e-14 * (std::abs(p0) + t))) {
          // Inside the quadratic region: take the last full step unchecked.
          if (dec >= 0.0 && strictly_feasible(y + dx)) y += dx;
          centered = true;
          break;
        }
        double s = 1.0;
        while (s > 1e-16) {
          const VectorXd yn = y + s * dx;
          if (strictly_feasible(yn) && phi(yn, t) <= p0 - 0.25 * s * dec) break;
          s *= 0.5;
        }
        if (s <= 1e-16) {
          centered = true;  // no progress possible at this t
          break;
        }
        if (s < 1e-8) {
          // Steps this short only chase rounding in -log(-f) near active constraints.
          centered = dec < 1e-6;
          break;
        }
        y += s * dx;
        if (early_stop && early_stop(y)) {
          r.y = y;
          r.converged = true;
          r.kkt = kkt(y, t);
          return r;
        }
      }
      centered_all = centered_all && centered;
      if (m == 0.0 || m / t < opts.tol) break;
      t *= opts.barrier_growth;
    }
    r.y = y;
    r.converged = centered_all;
    r.kkt = kkt(y, t);
    return r;
  }
};

struct CompiledGp {
  LogFn objective;
  std::vector<LogFn> constraints;
};

CompiledGp compile_gp(const GpProblem& problem) {
  const auto n = static_cast<Eigen::Index>(problem.size());
  CompiledGp c;
  c.objective = compile(problem.objective, n);
  for (const auto& con : problem.constraints) c.constraints.push_back(compile(con.lhs, n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& v = problem.variables[i];
    if (v.lower > 0.0) {
      c.constraints.push_back(compile(Monomial(v.lower, {{static_cast<VarId>(i), -1.0}}), n));
    }
    if (std::isfinite(v.upper)) {
      c.constraints.push_back(compile(Monomial(1.0 / v.upper, {{static_cast<VarId>(i), 1.0}}), n));
    }
  }
  return c;
}

}  // namespace

SolveReport solve_gp(const GpProblem& problem, std::span<const double> init,
                     const SolverOptions& opts) {
  problem.validate();
  if (!problem.is_pure_gp()) {
    throw Error(ErrorCode::InvalidProblem, "solve_gp needs PosyLeqOne constraints only");
  }
  const auto n = static_cast<Eigen::Index>(problem.size());
  if (init.size() != problem.size()) throw Error(ErrorCode::InvalidProblem, "init size mismatch");
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(init[i] > 0.0)) throw Error(ErrorCode::NonPositiveAnchor, "init must be positive");
    y(i) = std::log(init[i]);
  }
  const CompiledGp gp = compile_gp(problem);
  SolveReport rep;

  Barrier phase2{gp.objective, gp.constraints, opts, {}};
  if (!phase2.strictly_feasible(y)) {
    // Phase 1 over (y, s): minimize s subject to f_i(y) <= s and s >= -1.
    std::vector<LogFn> fs;
    for (const auto& f : gp.constraints) {
      LogFn g = f;
      g.lin.conservativeResize(n + 1);
      g.lin(n) = -1.0;
      fs.push_back(std::move(g));
    }
    LogFn floor;
    floor.lin = VectorXd::Zero(n + 1);
    floor.lin(n) = -1.0;
    floor.c = -1.0;
    fs.push_back(floor);
    // Box of e^{+-50} around the start keeps phase 1 bounded.
    for (Eigen::Index i = 0; i < n; ++i) {
      for (double sign : {1.0, -1.0}) {
        LogFn box;
        box.lin = VectorXd::Zero(n + 1);
        box.lin(i) = sign;
        box.c = -sign * y(i) - 50.0;
        fs.push_back(box);
      }
    }
    LogFn obj;
    obj.lin = VectorXd::Zero(n + 1);
    obj.lin(n) = 1.0;
    VectorXd ys(n + 1);
    ys.head(n) = y;
    double worst = 0.0;
    for (const auto& f : gp.constraints) worst = std::max(worst, f.value(y));
    ys(n) = worst + 1.0;
    Barrier phase1{obj, fs, opts, [n](const VectorXd& v) { return v(n) < -0.5; }};
    const BarrierResult p1 = phase1.run(ys);
    rep.inner_iterations += p1.newton;
    y = p1.y.head(n);
    if (!(p1.y(n) < 0.0) || !phase2.strictly_feasible(y)) {
      rep.status = SolveStatus::Infeasible;
      rep.x_star.assign(init.begin(), init.end());
      rep.objective_value = problem.objective.eval(init);
      return rep;
    }
  }

  const BarrierResult p2 = phase2.run(y);
  rep.inner_iterations += p2.newton;
  rep.x_star.resize(problem.size());
  for (Eigen::Index i = 0; i < n; ++i) rep.x_star[i] = std::exp(p2.y(i));
  rep.objective_value = problem.objective.eval(rep.x_star);
  rep.kkt_residual = p2.kkt;
  rep.outer_iterations = 1;
  rep.status = p2.converged ? SolveStatus::Converged : SolveStatus::MaxIter;
  return rep;
}

namespace {

void dump_gp(std::ostream& os, const GpProblem& gp, int outer) {
  os << "outer " << outer << '\n' << "objective\n";
  for (const auto& t : gp.objective.terms) {
    os << "  ";
    write_monomial(os, t);
    os << '\n';
  }
  for (const auto& c : gp.constraints) {
    os << "constraint " << (c.label.empty() ? "-" : c.label) << '\n';
    for (const auto& t : c.lhs.terms) {
      os << "  ";
      write_monomial(os, t);
      os << '\n';
    }
  }
}

}  // namespace

SolveReport solve_signomial(const GpProblem& problem, std::span<const double> init,
                            const SolverOptions& opts) {
  problem.validate();
  const std::size_t n0 = problem.size();
  if (init.size() != n0) throw Error(ErrorCode::InvalidProblem, "init size mismatch");

  // One auxiliary variable per lhs power factor: base <= t.
  struct Aux {
    std::size_t constraint;
    std::size_t factor;
    VarId id;
  };
  std::vector<Aux> aux;
  GpProblem base = problem;
  for (std::size_t c = 0; c < problem.constraints.size(); ++c) {
    const auto& fs = problem.constraints[c].lhs_factors;
    for (std::size_t k = 0; k < fs.size(); ++k) {
      if (fs[k].exponent == 0.0) continue;
      std::ostringstream name;
      name << "t" << c << "_" << k;
      aux.push_back({c, k, base.add_variable(name.str())});
    }
  }

  std::vector<double> x(init.begin(), init.end());
  for (double v : x) {
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveAnchor, "init must be positive");
  }
  x.resize(base.size());
  for (const auto& a : aux) {
    x[a.id] = problem.constraints[a.constraint].lhs_factors[a.factor].base.eval(x) * 1.01;
  }

  SolveReport rep;
  rep.status = SolveStatus::MaxIter;
  const bool pure = problem.is_pure_gp();
  bool have_point = false;
  double obj_prev = 0.0;

  for (int outer = 0; outer < opts.max_outer; ++outer) {
    GpProblem gp;
    gp.variables = base.variables;
    gp.objective = problem.objective;
    std::size_t next_aux = 0;
    for (std::size_t c = 0; c < problem.constraints.size(); ++c) {
      const auto& con = problem.constraints[c];
      if (con.kind == ConstraintKind::PosyLeqOne && con.lhs_factors.empty()) {
        gp.constraints.push_back(con);
        continue;
      }
      Monomial den = condense_posynomial(con.rhs, x);
      for (const auto& f : con.rhs_factors) {
        if (f.exponent == 0.0) continue;
        den = den * condense_posynomial(f.base, x).pow(f.exponent);
      }
      Posynomial num = con.lhs;
      for (const auto& f : con.lhs_factors) {
        if (f.exponent == 0.0) continue;
        const VarId t = aux[next_aux++].id;
        num = num * Monomial(1.0, {{t, f.exponent}});
        gp.constraints.push_back(SignomialConstraint::leq_one(
            f.base * Monomial(1.0, {{t, -1.0}}), con.label + "/aux"));
      }
      gp.constraints.push_back(SignomialConstraint::leq_one(num * den.pow(-1.0), con.label));
    }
    if (opts.debug != nullptr) dump_gp(*opts.debug, gp, outer);

    const SolveReport inner = solve_gp(gp, x, opts);
    rep.inner_iterations += inner.inner_iterations;
    rep.outer_iterations = outer + 1;
    if (inner.status == SolveStatus::Infeasible) {
      if (!have_point) {
        rep.status = SolveStatus::Infeasible;
        rep.x_star.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n0));
        rep.objective_value = problem.objective.eval(rep.x_star);
        return rep;
      }
      rep.status = SolveStatus::Converged;
      break;
    }
    const double obj = inner.objective_value;
    if (have_point && obj > obj_prev) {
      // The previous anchor is feasible for this GP, so a worse value is solver noise.
      rep.rejected_increase = (obj - obj_prev) / obj_prev;
      rep.status = SolveStatus::Converged;
      break;
    }
    double move = 0.0;
    for (std::size_t i = 0; i < n0; ++i) {
      move = std::max(move, std::abs(std::log(inner.x_star[i]) - std::log(x[i])));
    }
    const double rel = have_point ? (obj_prev - obj) / obj_prev : 1.0;
    x = inner.x_star;
    obj_prev = obj;
    have_point = true;
    rep.kkt_residual = inner.kkt_residual;
    rep.objective_history.push_back(obj);
    if (pure) {
      rep.status = inner.status;
      break;
    }
    if (rel < opts.outer_tol && move < opts.outer_tol) {
      rep.status = SolveStatus::Converged;
      break;
    }
  }
  rep.x_star.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n0));
  rep.objective_value = obj_prev;
  return rep;
}

}  // namespace macpower
