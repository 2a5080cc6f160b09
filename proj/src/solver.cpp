#include "bernloc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bernloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_inf(double v) { return std::isfinite(v) ? v : kInf; }

}  // namespace

void SolveOptions::validate() const {
  if (max_iters < 1 || max_outer_iters < 1) throw std::invalid_argument("SolveOptions: iteration caps must be positive");
  if (!(grad_tol > 0 && step_tol > 0 && feas_tol > 0 && finite_diff_step > 0 && penalty_init > 0)) {
    throw std::invalid_argument("SolveOptions: tolerances must be positive");
  }
  if (!(penalty_growth > 1)) throw std::invalid_argument("SolveOptions: penalty_growth must exceed 1");
}

Bounds Bounds::unbounded(Eigen::Index n) {
  return {Eigen::VectorXd::Constant(n, -kInf), Eigen::VectorXd::Constant(n, kInf)};
}

Eigen::VectorXd finite_difference_gradient(const Objective& f, const Eigen::VectorXd& x,
                                           double rel_step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x(i)));
    probe(i) = x(i) + h;
    const double fp = f(probe);
    probe(i) = x(i) - h;
    const double fm = f(probe);
    probe(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

SolveReport minimize_unconstrained(const Objective& objective, const Eigen::VectorXd& x0,
                                   const SolveOptions& opts) {
  opts.validate();
  const Eigen::Index n = x0.size();
  SolveReport report;
  Eigen::VectorXd x = x0;
  double fx = objective(x);
  report.x_opt = x;
  report.f_opt = fx;
  if (!std::isfinite(fx)) {
    report.message = "objective not finite at x0";
    return report;
  }

  Eigen::VectorXd g = finite_difference_gradient(objective, x, opts.finite_diff_step);
  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool fresh_hessian = true;
  constexpr double kArmijo = 1e-4;

  for (int it = 0; it < opts.max_iters; ++it) {
    report.iterations = it;
    if (!g.allFinite()) {
      report.message = "non-finite gradient";
      return report;
    }
    if (g.norm() <= opts.grad_tol) {
      report.converged = true;
      report.message = "gradient tolerance";
      return report;
    }

    Eigen::VectorXd dir = -h_inv * g;
    double slope = g.dot(dir);
    if (!(slope < 0)) {
      h_inv.setIdentity();
      fresh_hessian = true;
      dir = -g;
      slope = -g.squaredNorm();
    }
    // Untrained curvature: cap the first trial step at unit length.
    double alpha = fresh_hessian ? std::min(1.0, 1.0 / dir.norm()) : 1.0;

    double f_new = kInf;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + alpha * dir;
      f_new = finite_or_inf(objective(x_new));
      if (f_new <= fx + kArmijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (!fresh_hessian) {
        h_inv.setIdentity();
        fresh_hessian = true;
        continue;
      }
      report.message = "line search failed";
      report.converged = g.norm() <= 1e3 * opts.grad_tol;
      return report;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd g_new = finite_difference_gradient(objective, x_new, opts.finite_diff_step);
    const Eigen::VectorXd y = g_new - g;
    x = x_new;
    fx = f_new;
    g = g_new;
    report.x_opt = x;
    report.f_opt = fx;

    if (s.norm() <= opts.step_tol * (1.0 + x.norm())) {
      report.iterations = it + 1;
      report.converged = true;
      report.message = "step tolerance";
      return report;
    }

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh_hessian) {
        h_inv *= sy / y.squaredNorm();
        fresh_hessian = false;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
    }
  }
  report.iterations = opts.max_iters;
  report.message = "iteration cap";
  return report;
}

double constraint_violation(const ConstraintFn& inequality, const ConstraintFn& equality,
                            const Bounds& bounds, const Eigen::VectorXd& x) {
  double v = 0.0;
  if (inequality) {
    const Eigen::VectorXd c = inequality(x);
    if (c.size() > 0) v = std::max(v, c.maxCoeff());
  }
  if (equality) {
    const Eigen::VectorXd c = equality(x);
    if (c.size() > 0) v = std::max(v, c.cwiseAbs().maxCoeff());
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    v = std::max({v, bounds.lower(i) - x(i), x(i) - bounds.upper(i)});
  }
  return v;
}

SolveReport minimize_constrained(const Objective& objective, const ConstraintFn& inequality,
                                 const ConstraintFn& equality, const Eigen::VectorXd& x0,
                                 const Bounds& bounds, const SolveOptions& opts) {
  opts.validate();
  const Eigen::Index n = x0.size();
  if (bounds.lower.size() != n || bounds.upper.size() != n) {
    throw std::invalid_argument("minimize_constrained: bounds dimension mismatch");
  }

  // Finite bounds join the inequality set as lo - x <= 0 and x - hi <= 0.
  std::vector<Eigen::Index> lower_idx;
  std::vector<Eigen::Index> upper_idx;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isfinite(bounds.lower(i))) lower_idx.push_back(i);
    if (std::isfinite(bounds.upper(i))) upper_idx.push_back(i);
  }
  auto all_inequalities = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd user = inequality ? inequality(x) : Eigen::VectorXd();
    Eigen::VectorXd out(user.size() + Eigen::Index(lower_idx.size() + upper_idx.size()));
    out.head(user.size()) = user;
    Eigen::Index k = user.size();
    for (auto i : lower_idx) out(k++) = bounds.lower(i) - x(i);
    for (auto i : upper_idx) out(k++) = x(i) - bounds.upper(i);
    return out;
  };
  auto equalities = [&](const Eigen::VectorXd& x) {
    return equality ? equality(x) : Eigen::VectorXd();
  };
  auto violation_at = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd ci = all_inequalities(x);
    const Eigen::VectorXd ce = equalities(x);
    double v = 0.0;
    if (ci.size() > 0) v = std::max(v, ci.maxCoeff());
    if (ce.size() > 0) v = std::max(v, ce.cwiseAbs().maxCoeff());
    return v;
  };

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(all_inequalities(x0).size());
  Eigen::VectorXd nu = Eigen::VectorXd::Zero(equalities(x0).size());
  double mu = opts.penalty_init;

  // Powell-Hestenes-Rockafellar augmented Lagrangian.
  auto merit = [&](const Eigen::VectorXd& x) {
    const double f = objective(x);
    if (!std::isfinite(f)) return kInf;
    double acc = f;
    const Eigen::VectorXd ci = all_inequalities(x);
    for (Eigen::Index i = 0; i < ci.size(); ++i) {
      const double shifted = std::max(0.0, ci(i) + lambda(i) / mu);
      acc += 0.5 * mu * shifted * shifted - 0.5 * lambda(i) * lambda(i) / mu;
    }
    const Eigen::VectorXd ce = equalities(x);
    for (Eigen::Index i = 0; i < ce.size(); ++i) acc += nu(i) * ce(i) + 0.5 * mu * ce(i) * ce(i);
    return acc;
  };

  SolveReport report;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd best_x = x0;
  double best_violation = violation_at(x0);
  double prev_violation = kInf;

  for (int outer = 0; outer < opts.max_outer_iters; ++outer) {
    OuterStep step;
    step.penalty = mu;
    step.merit_at_start = merit(x);
    const SolveReport inner = minimize_unconstrained(merit, x, opts);
    report.iterations += inner.iterations;
    x = inner.x_opt;
    step.merit_at_end = inner.f_opt;
    step.violation = violation_at(x);
    report.outer.push_back(step);

    if (step.violation <= opts.feas_tol || step.violation < best_violation) {
      best_x = x;
      best_violation = step.violation;
    }

    const Eigen::VectorXd ci = all_inequalities(x);
    const Eigen::VectorXd ce = equalities(x);
    const Eigen::VectorXd lambda_next = (lambda + mu * ci).cwiseMax(0.0);
    const Eigen::VectorXd nu_next = nu + mu * ce;
    const double multiplier_shift =
        std::max(lambda_next.size() ? (lambda_next - lambda).cwiseAbs().maxCoeff() : 0.0,
                 nu_next.size() ? (nu_next - nu).cwiseAbs().maxCoeff() : 0.0);

    if (step.violation <= opts.feas_tol &&
        (multiplier_shift <= 1e-6 * (1.0 + lambda.cwiseAbs().sum() + nu.cwiseAbs().sum()) ||
         step.violation <= 1e-3 * opts.feas_tol || outer + 1 == opts.max_outer_iters)) {
      report.converged = true;
      break;
    }
    lambda = lambda_next;
    nu = nu_next;
    if (step.violation > 0.25 * prev_violation) mu *= opts.penalty_growth;
    prev_violation = step.violation;
  }

  report.x_opt = best_x;
  report.f_opt = objective(best_x);
  report.max_constraint_violation = best_violation;
  if (best_violation > opts.feas_tol) {
    report.converged = false;
    report.message = "constraints not satisfied after outer iterations";
  } else if (report.message.empty()) {
    report.message = report.converged ? "converged" : "feasible, inner solve incomplete";
  }
  return report;
}

}  // namespace bernloc
