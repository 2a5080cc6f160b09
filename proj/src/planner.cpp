#include "bernloc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "bernloc/quadrature.hpp"

namespace bernloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Speed bound used inside the NLP, slightly inside v_max^2 so that the
// solver's feasibility tolerance still lands on residuals <= 1e-6.
constexpr double kSpeedMargin = 1e-6;

const QuadratureRule& fim_rule() {
  static const QuadratureRule rule = gauss_legendre(kFimNodes);
  return rule;
}

// Fixed-degree transcription of the planning NLP. Decision vector:
// [c_2.x, c_2.y, ..., c_d.x, c_d.y, T] with T = t_f - t_i. c_0 is the
// current position and c_1 = c_0 + v_ti T / d matches the initial velocity.
class Transcription {
 public:
  explicit Transcription(const PlanContext& ctx)
      : ctx_(ctx), d_(ctx.degree), duration_lo_(ctx.tf_min - ctx.t_i), duration_hi_(ctx.tf_max - ctx.t_i) {
    const QuadratureRule& rule = fim_rule();
    const int q = int(rule.nodes.size());
    node_basis_.resize(q, d_ + 1);
    node_weight_.resize(q);
    for (int i = 0; i < q; ++i) {
      const double s = 0.5 * (1.0 + rule.nodes(i));
      node_weight_(i) = 0.5 * rule.weights(i);
      for (int j = 0; j <= d_; ++j) node_basis_(i, j) = basis(j, d_, s, 0.0, 1.0);
    }
    const Eigen::MatrixXd dn = diff_matrix(d_, 0.0, 1.0).entries;
    vel_map_ = dn.transpose();
    acc_map_ = (dn * dn).transpose();

    gram_.resize(d_ + 1, d_ + 1);
    for (int j = 0; j <= d_; ++j) {
      for (int k = 0; k <= d_; ++k) {
        gram_(j, k) = binomial<double>(d_, j) * binomial<double>(d_, k) /
                      (binomial<double>(2 * d_, j + k) * double(2 * d_ + 1));
      }
    }
    prod_weight_.resize(2 * d_ + 1, d_ + 1);
    prod_weight_.setZero();
    for (int k = 0; k <= 2 * d_; ++k) {
      for (int j = std::max(0, k - d_); j <= std::min(d_, k); ++j) {
        prod_weight_(k, j) = binomial<double>(d_, j) * binomial<double>(d_, k - j) / binomial<double>(2 * d_, k);
      }
    }
    if (ctx.weights.terminal != 0.0) moments_ = terminal_moments(*ctx.density);
  }

  Eigen::Index size() const { return 2 * (d_ - 1) + 1; }
  double duration_lo() const { return duration_lo_; }
  double duration_hi() const { return duration_hi_; }

  double duration(const Eigen::VectorXd& x) const {
    return std::clamp(x(size() - 1), duration_lo_, duration_hi_);
  }

  Eigen::Matrix2Xd coefficients(const Eigen::VectorXd& x) const {
    const double T = duration(x);
    Eigen::Matrix2Xd c(2, d_ + 1);
    c.col(0) = ctx_.p_ti;
    c.col(1) = ctx_.p_ti + ctx_.v_ti * T / double(d_);
    for (int j = 2; j <= d_; ++j) c.col(j) = x.segment<2>(2 * (j - 2));
    return c;
  }

  BernsteinPolyd poly(const Eigen::VectorXd& x) const {
    return BernsteinPolyd(coefficients(x), ctx_.t_i, ctx_.t_i + duration(x));
  }

  Eigen::VectorXd encode(const BernsteinPolyd& p) const {
    Eigen::VectorXd x(size());
    for (int j = 2; j <= d_; ++j) x.segment<2>(2 * (j - 2)) = p.coeff(j);
    x(size() - 1) = p.span();
    return x;
  }

  CostBreakdown terms(const Eigen::VectorXd& x) const {
    const double T = duration(x);
    const Eigen::Matrix2Xd c = coefficients(x);
    CostBreakdown out;
    out.time = T;

    const Eigen::Matrix2Xd acc = c * acc_map_ / (T * T);
    out.effort = T * (acc.transpose() * acc).cwiseProduct(gram_).sum();

    if (ctx_.weights.terminal != 0.0) out.terminal = terminal_cost(c.col(d_), moments_);

    if (ctx_.weights.information != 0.0) {
      const Eigen::Matrix2Xd pts = c * node_basis_.transpose();
      Eigen::Matrix2d f = Eigen::Matrix2d::Zero();
      for (Eigen::Index i = 0; i < pts.cols(); ++i) {
        const Eigen::Vector2d delta = pts.col(i) - ctx_.p_hat;
        const double r2 = delta.squaredNorm();
        if (!(r2 > 1e-18)) {
          out.information = kInf;
          return out;
        }
        f += (node_weight_(i) / r2) * (delta * delta.transpose());
      }
      f *= T / (ctx_.sigma * ctx_.sigma);
      out.information = information_cost(f);
    }
    return out;
  }

  double objective(const Eigen::VectorXd& x) const { return terms(x).weighted(ctx_.weights); }

  Eigen::VectorXd speed_squared(const Eigen::VectorXd& x) const {
    const double T = duration(x);
    const Eigen::Matrix2Xd v = coefficients(x) * vel_map_ / T;
    const Eigen::MatrixXd dots = v.transpose() * v;
    Eigen::VectorXd s = Eigen::VectorXd::Zero(2 * d_ + 1);
    for (int k = 0; k <= 2 * d_; ++k) {
      for (int j = std::max(0, k - d_); j <= std::min(d_, k); ++j) s(k) += prod_weight_(k, j) * dots(j, k - j);
    }
    return s;
  }

  Eigen::VectorXd inequalities(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd speed = speed_squared(x);
    const double bound = ctx_.v_max * ctx_.v_max * (1.0 - kSpeedMargin);
    if (ctx_.obstacles.empty()) return speed.array() - bound;

    const BernsteinPolyd p = poly(x);
    Eigen::VectorXd out(speed.size() + Eigen::Index(ctx_.obstacles.size()) * (2 * d_ + 1));
    out.head(speed.size()) = speed.array() - bound;
    Eigen::Index k = speed.size();
    for (const auto& obs : ctx_.obstacles) {
      out.segment(k, 2 * d_ + 1) = obstacle_residuals(p, obs);
      k += 2 * d_ + 1;
    }
    return out;
  }

 private:
  const PlanContext& ctx_;
  int d_;
  double duration_lo_;
  double duration_hi_;
  Eigen::MatrixXd node_basis_;
  Eigen::VectorXd node_weight_;
  Eigen::MatrixXd vel_map_;
  Eigen::MatrixXd acc_map_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd prod_weight_;
  TerminalMoments moments_{};
};

}  // namespace

SolveOptions PlanContext::default_solve_options() {
  SolveOptions opts;
  opts.max_iters = 300;
  opts.max_outer_iters = 15;
  opts.grad_tol = 1e-5;
  opts.feas_tol = 1e-6;
  opts.penalty_init = 10.0;
  opts.penalty_growth = 10.0;
  return opts;
}

void PlanContext::validate() const {
  if (weights.time < 0 || weights.effort < 0 || weights.terminal < 0 || weights.information < 0) {
    throw std::invalid_argument("plan: weights must be non-negative");
  }
  if (!(v_max > 0)) throw std::invalid_argument("plan: v_max must be positive");
  if (degree < 3 || degree > 30) throw std::invalid_argument("plan: degree must be in [3, 30]");
  if (!(tf_min > t_i) || !(tf_max >= tf_min)) throw std::invalid_argument("plan: final-time bounds must satisfy t_i < tf_min <= tf_max");
  if (!(sigma > 0)) throw std::invalid_argument("plan: sigma must be positive");
  if (weights.terminal != 0.0 && density == nullptr) throw std::invalid_argument("plan: terminal weight needs a density");
}

Eigen::Matrix2d fim(const BernsteinPolyd& path, const Eigen::Vector2d& p_hat, double sigma, int nodes) {
  if (path.dim() != 2) throw std::domain_error("fim: path must be planar");
  if (!(sigma > 0)) throw std::domain_error("fim: sigma must be positive");
  const QuadratureRule rule = nodes == kFimNodes ? fim_rule() : gauss_legendre(nodes);
  Eigen::Matrix2d f = Eigen::Matrix2d::Zero();
  const double half = 0.5 * path.span();
  const double mid = 0.5 * (path.t0() + path.tf());
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const Eigen::Vector2d delta = eval(path, mid + half * rule.nodes(i)) - p_hat;
    const double r = delta.norm();
    if (r < 1e-9) throw std::domain_error("fim: path passes through the estimate (singular geometry)");
    f += rule.weights(i) * (delta * delta.transpose()) / (r * r);
  }
  return half * f / (sigma * sigma);
}

double information_cost(const Eigen::Matrix2d& fim_matrix) {
  const double eps = 1e-9 * std::max(fim_matrix.trace(), 1e-12);
  const double det = (fim_matrix + eps * Eigen::Matrix2d::Identity()).determinant();
  return det > 0 ? -std::log(det) : kInf;
}

TerminalMoments terminal_moments(const DensityModel& density) {
  TerminalMoments out;
  for (int a = 0; a < 2; ++a) {
    out.axis[a] = density_moments(density.pdf[a]);
    if (!(out.axis[a][0] > 1e-12)) throw std::domain_error("terminal_cost: degenerate density");
  }
  return out;
}

double terminal_cost(const Eigen::Vector2d& endpoint, const TerminalMoments& moments) {
  double acc = 0.0;
  for (int a = 0; a < 2; ++a) {
    const auto& m = moments.axis[a];
    const double z = endpoint(a);
    acc += z * z * m[0] - 2.0 * z * m[1] + m[2];
  }
  return std::max(acc, 0.0);
}

double terminal_cost(const Eigen::Vector2d& endpoint, const DensityModel& density) {
  return terminal_cost(endpoint, terminal_moments(density));
}

Eigen::VectorXd velocity_residuals(const BernsteinPolyd& path, double v_max) {
  const auto speed = squared_norm(derivative(path));
  return speed.scalar_coeffs().array() - v_max * v_max;
}

Eigen::VectorXd obstacle_residuals(const BernsteinPolyd& path, const Obstacle& obstacle) {
  const BernsteinPolyd offset(path.coeffs().colwise() - obstacle.center, path.t0(), path.tf());
  return obstacle.radius * obstacle.radius - squared_norm(offset).scalar_coeffs().array();
}

CostBreakdown evaluate_cost(const BernsteinPolyd& path, const PlanContext& ctx) {
  CostBreakdown out;
  out.time = path.tf() - ctx.t_i;
  out.effort = integrate(squared_norm_polys(path).acceleration)(0);
  if (ctx.weights.terminal != 0.0) out.terminal = terminal_cost(path.coeff(path.degree()), *ctx.density);
  if (ctx.weights.information != 0.0) out.information = information_cost(fim(path, ctx.p_hat, ctx.sigma));
  return out;
}

BernsteinPolyd straight_line_initializer(const PlanContext& ctx) {
  const int d = ctx.degree;
  const double dist = (ctx.p_hat - ctx.p_ti).norm();
  const double duration = std::clamp(dist / (0.8 * ctx.v_max), ctx.tf_min - ctx.t_i, ctx.tf_max - ctx.t_i);
  // Constant speed 0.8 v_max along the line, stopping short if the
  // horizon is too short to reach the estimate.
  const double reach = std::min(dist, 0.8 * ctx.v_max * duration);
  const Eigen::Vector2d dir = dist > 0 ? Eigen::Vector2d((ctx.p_hat - ctx.p_ti) / dist) : Eigen::Vector2d::Zero();
  Eigen::Matrix2Xd c(2, d + 1);
  for (int j = 0; j <= d; ++j) c.col(j) = ctx.p_ti + (double(j) / d) * reach * dir;
  c.col(1) = ctx.p_ti + ctx.v_ti * duration / double(d);
  return BernsteinPolyd(c, ctx.t_i, ctx.t_i + duration);
}

namespace {

// Straight line with its interior control points pushed sideways. A
// straight path toward p_hat is a symmetric stationary point of the
// information cost, so local descent from it alone never bends.
BernsteinPolyd bent_initializer(const PlanContext& ctx, double side) {
  const BernsteinPolyd line = straight_line_initializer(ctx);
  const int d = line.degree();
  Eigen::Vector2d dir = line.coeff(d) - line.coeff(0);
  if (dir.norm() < 1e-9) dir = ctx.p_hat - ctx.p_ti;
  if (dir.norm() < 1e-9) dir = Eigen::Vector2d::UnitX();
  const Eigen::Vector2d normal(-dir.y() / dir.norm(), dir.x() / dir.norm());
  const double amplitude = side * 0.25 * ctx.v_max * line.span();
  Eigen::Matrix2Xd c = line.coeffs();
  for (int j = 2; j < d; ++j) c.col(j) += amplitude * std::sin(std::numbers::pi * double(j) / d) * normal;
  return BernsteinPolyd(c, line.t0(), line.tf());
}

}  // namespace

Trajectory plan(const PlanContext& ctx) {
  ctx.validate();
  const Transcription tr(ctx);

  std::vector<Eigen::VectorXd> starts;
  Eigen::VectorXd primary = tr.encode(straight_line_initializer(ctx));
  if (ctx.warm_start && ctx.warm_start->degree() == ctx.degree && ctx.warm_start->t0() == ctx.t_i &&
      ctx.warm_start->span() >= tr.duration_lo() && ctx.warm_start->span() <= tr.duration_hi()) {
    const Eigen::VectorXd xw = tr.encode(*ctx.warm_start);
    if (std::isfinite(tr.objective(xw))) primary = xw;
  }
  starts.push_back(primary);
  if (ctx.weights.information > 0) {
    for (double side : {1.0, -1.0}) starts.push_back(tr.encode(bent_initializer(ctx, side)));
  }

  Trajectory fallback{ctx.warm_start ? *ctx.warm_start : tr.poly(primary), {}, kInf, true, 0};

  Bounds bounds = Bounds::unbounded(tr.size());
  bounds.lower(tr.size() - 1) = tr.duration_lo();
  bounds.upper(tr.size() - 1) = tr.duration_hi();

  const Objective objective = [&tr](const Eigen::VectorXd& x) { return tr.objective(x); };
  const ConstraintFn inequality = [&tr](const Eigen::VectorXd& x) { return tr.inequalities(x); };

  std::optional<Trajectory> best;
  int iterations = 0;
  for (const Eigen::VectorXd& x0 : starts) {
    if (!std::isfinite(tr.objective(x0))) continue;
    const SolveReport report = minimize_constrained(objective, inequality, nullptr, x0, bounds, ctx.solve);
    iterations += report.iterations;

    Trajectory out{tr.poly(report.x_opt), tr.terms(report.x_opt), 0.0, false, 0};
    out.objective = out.cost.weighted(ctx.weights);
    bool feasible = std::isfinite(out.objective) && velocity_residuals(out.poly, ctx.v_max).maxCoeff() <= 1e-6;
    for (const auto& obs : ctx.obstacles) feasible = feasible && obstacle_residuals(out.poly, obs).maxCoeff() <= 1e-6;
    if (feasible && (!best || out.objective < best->objective)) best = std::move(out);
  }
  if (!best) {
    fallback.solver_iterations = iterations;
    return fallback;
  }
  best->solver_iterations = iterations;
  return *best;
}

}  // namespace bernloc
