#include <doctest.h>

#include <cmath>
#include <limits>

#include "bernloc/solver.hpp"

using namespace bernloc;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(v.size());
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

double rosenbrock(const VectorXd& x) {
  return 100.0 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1.0 - x(0), 2);
}

// Independent feasibility recheck, not using constraint_violation().
double recheck(const ConstraintFn& ineq, const ConstraintFn& eq, const Bounds& b, const VectorXd& x) {
  double v = 0.0;
  if (ineq) {
    const VectorXd g = ineq(x);
    for (Eigen::Index i = 0; i < g.size(); ++i) v = std::max(v, g(i));
  }
  if (eq) {
    const VectorXd h = eq(x);
    for (Eigen::Index i = 0; i < h.size(); ++i) v = std::max(v, std::abs(h(i)));
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    v = std::max(v, b.lower(i) - x(i));
    v = std::max(v, x(i) - b.upper(i));
  }
  return v;
}

}  // namespace

TEST_CASE("options validation") {
  SolveOptions o;
  CHECK_NOTHROW(o.validate());
  o.penalty_growth = 1.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = {};
  o.grad_tol = 0.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
  o = {};
  o.finite_diff_step = -1.0;
  CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("finite-difference gradient of a quadratic") {
  const Objective f = [](const VectorXd& x) { return x.squaredNorm() + 3.0 * x(0); };
  const VectorXd g = finite_difference_gradient(f, vec({1.0, -2.0}), 1e-6);
  CHECK(g(0) == doctest::Approx(5.0).epsilon(1e-7));
  CHECK(g(1) == doctest::Approx(-4.0).epsilon(1e-7));
}

TEST_CASE("quadratic bowl") {
  const VectorXd a = vec({1.5, -2.0, 0.25});
  const Objective f = [a](const VectorXd& x) { return (x - a).squaredNorm(); };
  const auto r = minimize_unconstrained(f, VectorXd::Zero(3));
  CHECK(r.converged);
  CHECK((r.x_opt - a).norm() < 1e-6);
  CHECK(r.f_opt <= f(VectorXd::Zero(3)));
}

TEST_CASE("Rosenbrock from (-1.2, 1)") {
  const auto r = minimize_unconstrained(rosenbrock, vec({-1.2, 1.0}));
  CHECK((r.x_opt - vec({1.0, 1.0})).norm() < 1e-4);
  CHECK(rosenbrock(r.x_opt) < 1e-8);
  CHECK(r.f_opt <= rosenbrock(vec({-1.2, 1.0})));
}

TEST_CASE("constant objective converges at x0") {
  const Objective f = [](const VectorXd&) { return 4.0; };
  const VectorXd x0 = vec({0.3, -0.7});
  const auto r = minimize_unconstrained(f, x0);
  CHECK(r.converged);
  CHECK(r.x_opt == x0);
  CHECK(r.f_opt == 4.0);
}

TEST_CASE("non-finite objective at x0 aborts with a diagnostic") {
  const Objective f = [](const VectorXd&) { return std::numeric_limits<double>::quiet_NaN(); };
  const auto r = minimize_unconstrained(f, vec({1.0}));
  CHECK_FALSE(r.converged);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("non-finite trial points are rejected by the line search") {
  // log barrier: undefined for x <= 0, minimum at x = 1.
  const Objective f = [](const VectorXd& x) { return x(0) - std::log(x(0)); };
  const auto r = minimize_unconstrained(f, vec({5.0}));
  CHECK(r.converged);
  CHECK(r.x_opt(0) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("iteration cap reports non-convergence") {
  SolveOptions o;
  o.max_iters = 2;
  const auto r = minimize_unconstrained(rosenbrock, vec({-1.2, 1.0}), o);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations <= 2);
}

TEST_CASE("active lower bound: min x^2 s.t. x >= 1") {
  const Objective f = [](const VectorXd& x) { return x(0) * x(0); };
  Bounds b = Bounds::unbounded(1);
  b.lower(0) = 1.0;
  const auto r = minimize_constrained(f, nullptr, nullptr, vec({3.0}), b);
  CHECK(r.converged);
  CHECK(std::abs(r.x_opt(0) - 1.0) < 1e-4);
  CHECK(recheck(nullptr, nullptr, b, r.x_opt) <= 1e-4);
}

TEST_CASE("disk constraint: min x + y s.t. x^2 + y^2 <= 1") {
  const Objective f = [](const VectorXd& x) { return x(0) + x(1); };
  const ConstraintFn g = [](const VectorXd& x) { return vec({x.squaredNorm() - 1.0}); };
  const Bounds b = Bounds::unbounded(2);
  const auto r = minimize_constrained(f, g, nullptr, vec({0.0, 0.0}), b);
  CHECK(r.converged);
  const double s = -std::sqrt(0.5);
  CHECK(std::abs(r.x_opt(0) - s) < 1e-3);
  CHECK(std::abs(r.x_opt(1) - s) < 1e-3);
  CHECK(recheck(g, nullptr, b, r.x_opt) <= 1e-4);
  CHECK(std::abs(recheck(g, nullptr, b, r.x_opt) - r.max_constraint_violation) < 1e-12);
}

TEST_CASE("equality constraint: min x^2 + y^2 s.t. x + y = 1") {
  const Objective f = [](const VectorXd& x) { return x.squaredNorm(); };
  const ConstraintFn h = [](const VectorXd& x) { return vec({x(0) + x(1) - 1.0}); };
  const Bounds b = Bounds::unbounded(2);
  const auto r = minimize_constrained(f, nullptr, h, vec({2.0, -1.0}), b);
  CHECK(r.converged);
  CHECK(std::abs(r.x_opt(0) - 0.5) < 1e-4);
  CHECK(std::abs(r.x_opt(1) - 0.5) < 1e-4);
  CHECK(recheck(nullptr, h, b, r.x_opt) <= 1e-4);
}

TEST_CASE("no constraints matches the unconstrained solver") {
  const VectorXd x0 = vec({-1.2, 1.0});
  const auto u = minimize_unconstrained(rosenbrock, x0);
  const auto c = minimize_constrained(rosenbrock, nullptr, nullptr, x0, Bounds::unbounded(2));
  CHECK((u.x_opt - c.x_opt).norm() < 1e-6);
  CHECK(c.max_constraint_violation == 0.0);
}

TEST_CASE("infeasible problem reports non-convergence") {
  const Objective f = [](const VectorXd& x) { return x(0) * x(0); };
  // x >= 2 and x <= 1 cannot both hold.
  const ConstraintFn g = [](const VectorXd& x) { return vec({2.0 - x(0), x(0) - 1.0}); };
  SolveOptions o;
  o.max_outer_iters = 6;
  const auto r = minimize_constrained(f, g, nullptr, vec({0.0}), Bounds::unbounded(1), o);
  CHECK_FALSE(r.converged);
  CHECK(r.max_constraint_violation > 1e-4);
}

TEST_CASE("converged implies feasibility, rechecked independently") {
  struct Case {
    Objective f;
    ConstraintFn g;
    VectorXd x0;
  };
  const std::vector<Case> cases = {
      {[](const VectorXd& x) { return std::pow(x(0) - 3, 2) + std::pow(x(1) + 1, 2); },
       [](const VectorXd& x) { return vec({x(0) + x(1) - 1.0, -x(0)}); }, vec({0.0, 0.0})},
      {rosenbrock, [](const VectorXd& x) { return vec({x.squaredNorm() - 0.5}); }, vec({0.1, 0.1})},
      {[](const VectorXd& x) { return -x(0) * x(1); },
       [](const VectorXd& x) { return vec({x(0) + 2 * x(1) - 4.0, -x(0), -x(1)}); }, vec({1.0, 1.0})},
  };
  for (const auto& c : cases) {
    const Bounds b = Bounds::unbounded(2);
    const auto r = minimize_constrained(c.f, c.g, nullptr, c.x0, b);
    CHECK(r.converged);
    if (r.converged) CHECK(recheck(c.g, nullptr, b, r.x_opt) <= 1e-4);
  }
}

TEST_CASE("outer loop merit is non-increasing within each accepted outer step") {
  const Objective f = [](const VectorXd& x) { return x(0) + x(1); };
  const ConstraintFn g = [](const VectorXd& x) { return vec({x.squaredNorm() - 1.0}); };
  const auto r = minimize_constrained(f, g, nullptr, vec({2.0, 2.0}), Bounds::unbounded(2));
  REQUIRE_FALSE(r.outer.empty());
  for (const auto& step : r.outer) CHECK(step.merit_at_end <= step.merit_at_start + 1e-12);
}

TEST_CASE("determinism") {
  const ConstraintFn g = [](const VectorXd& x) { return vec({x.squaredNorm() - 0.5}); };
  const auto a = minimize_constrained(rosenbrock, g, nullptr, vec({0.1, 0.1}), Bounds::unbounded(2));
  const auto b = minimize_constrained(rosenbrock, g, nullptr, vec({0.1, 0.1}), Bounds::unbounded(2));
  CHECK(a.x_opt == b.x_opt);
  CHECK(a.f_opt == b.f_opt);
  CHECK(a.iterations == b.iterations);
  CHECK(a.outer.size() == b.outer.size());
}
