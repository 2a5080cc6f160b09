#pragma once

// Trajectory optimization over Bernstein coefficients: information gain
// from the Fisher Information Matrix, terminal density-weighted cost,
// actuation effort, mission time, and speed feasibility enforced on the
// coefficients of ||p'||^2.

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bernloc/bernstein.hpp"
#include "bernloc/estimator.hpp"
#include "bernloc/solver.hpp"

namespace bernloc {

struct PlanWeights {
  double time = 0.1;         // w1
  double effort = 0.5;       // w2
  double terminal = 0.05;    // w3
  double information = 2.0;  // w4
};

struct Obstacle {
  Eigen::Vector2d center;
  double radius;
};

struct PlanContext {
  double t_i = 0.0;
  Eigen::Vector2d p_ti = Eigen::Vector2d::Zero();
  Eigen::Vector2d v_ti = Eigen::Vector2d::Zero();
  Eigen::Vector2d p_hat = Eigen::Vector2d::Zero();
  const DensityModel* density = nullptr;  // must outlive plan()
  double sigma = 0.1;                     // range noise std used in the FIM
  PlanWeights weights;
  double v_max = 1.0;
  int degree = 5;
  double tf_min = 5.0;    // absolute bounds on the final time
  double tf_max = 350.0;
  std::optional<BernsteinPolyd> warm_start;
  std::vector<Obstacle> obstacles;  // none by default
  SolveOptions solve = default_solve_options();

  static SolveOptions default_solve_options();
  void validate() const;
};

/// Unweighted cost terms. information = -log det(FIM + eps I).
struct CostBreakdown {
  double time = 0.0;
  double effort = 0.0;
  double terminal = 0.0;
  double information = 0.0;

  double weighted(const PlanWeights& w) const {
    return w.time * time + w.effort * effort + w.terminal * terminal + w.information * information;
  }
};

struct Trajectory {
  BernsteinPolyd poly;
  CostBreakdown cost;
  double objective = 0.0;
  bool planner_fault = false;
  int solver_iterations = 0;
};

/// Number of Gauss-Legendre nodes for the FIM integral.
inline constexpr int kFimNodes = 30;

/// FIM of a planar path about p_hat, (1/sigma^2) * int u u^T dt with
/// u the unit bearing from p_hat. Throws on a node within 1e-9 of p_hat.
Eigen::Matrix2d fim(const BernsteinPolyd& path, const Eigen::Vector2d& p_hat, double sigma,
                    int nodes = kFimNodes);

/// -log det(F + eps I), eps = 1e-9 * max(trace F, 1e-12).
double information_cost(const Eigen::Matrix2d& fim_matrix);

/// Per-axis {int f, int z f, int z^2 f} for the terminal cost.
struct TerminalMoments {
  std::array<std::array<double, 3>, 2> axis;
};

TerminalMoments terminal_moments(const DensityModel& density);
double terminal_cost(const Eigen::Vector2d& endpoint, const TerminalMoments& moments);
double terminal_cost(const Eigen::Vector2d& endpoint, const DensityModel& density);

/// Coefficients of ||p'||^2 minus v_max^2. All <= 0 implies speed <= v_max.
Eigen::VectorXd velocity_residuals(const BernsteinPolyd& path, double v_max);

/// r^2 minus coefficients of ||p - center||^2. All <= 0 implies clearance.
Eigen::VectorXd obstacle_residuals(const BernsteinPolyd& path, const Obstacle& obstacle);

/// Cost terms computed through the generic polynomial routines.
CostBreakdown evaluate_cost(const BernsteinPolyd& path, const PlanContext& ctx);

/// Degree-d straight line from p_ti toward p_hat at 0.8 v_max, with the
/// second coefficient adjusted to honour the initial velocity.
BernsteinPolyd straight_line_initializer(const PlanContext& ctx);

Trajectory plan(const PlanContext& ctx);

}  // namespace bernloc
