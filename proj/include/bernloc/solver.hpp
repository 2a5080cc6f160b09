#pragma once

// Derivative-free-interface optimizers: BFGS on central finite-difference
// gradients, and an augmented-Lagrangian wrapper for inequality, equality
// and bound constraints.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace bernloc {

using Objective = std::function<double(const Eigen::VectorXd&)>;
/// Vector-valued constraint map. Inequalities are feasible when <= 0,
/// equalities when == 0.
using ConstraintFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct SolveOptions {
  int max_iters = 500;          // inner quasi-Newton iterations
  int max_outer_iters = 25;     // penalty updates
  double grad_tol = 1e-6;
  double step_tol = 1e-10;
  double feas_tol = 1e-4;
  double penalty_init = 10.0;
  double penalty_growth = 10.0;
  double finite_diff_step = 1e-6;  // relative to max(1, |x_i|)

  void validate() const;
};

struct OuterStep {
  double penalty = 0.0;
  double merit_at_start = 0.0;  // penalized objective at the warm start
  double merit_at_end = 0.0;    // penalized objective at the inner solution
  double violation = 0.0;
};

struct SolveReport {
  Eigen::VectorXd x_opt;
  double f_opt = 0.0;
  int iterations = 0;
  bool converged = false;
  double max_constraint_violation = 0.0;
  std::vector<OuterStep> outer;  // empty for unconstrained solves
  std::string message;
};

/// Per-variable box; infinite ends are unconstrained.
struct Bounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  static Bounds unbounded(Eigen::Index n);
};

Eigen::VectorXd finite_difference_gradient(const Objective& f, const Eigen::VectorXd& x,
                                           double rel_step);

SolveReport minimize_unconstrained(const Objective& objective, const Eigen::VectorXd& x0,
                                   const SolveOptions& opts = {});

/// Null inequality/equality callables mean "no constraints of that kind".
SolveReport minimize_constrained(const Objective& objective, const ConstraintFn& inequality,
                                 const ConstraintFn& equality, const Eigen::VectorXd& x0,
                                 const Bounds& bounds, const SolveOptions& opts = {});

/// Largest violation of the given constraints and bounds at x.
double constraint_violation(const ConstraintFn& inequality, const ConstraintFn& equality,
                            const Bounds& bounds, const Eigen::VectorXd& x);

}  // namespace bernloc
