#include "bernloc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bernloc {

double range_residual_cost(std::span<const RangeMeasurement> measurements,
                           const Eigen::Vector2d& p) {
  double acc = 0.0;
  for (const auto& m : measurements) {
    const double r = (m.vehicle_pos - p).norm() - m.range;
    acc += r * r;
  }
  return acc;
}

bool receivers_collinear(std::span<const RangeMeasurement> measurements) {
  if (measurements.size() < 3) return true;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& m : measurements) mean += m.vehicle_pos;
  mean /= double(measurements.size());
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& m : measurements) {
    const Eigen::Vector2d d = m.vehicle_pos - mean;
    scatter += d * d.transpose();
  }
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(scatter).eigenvalues();
  return ev(0) <= 1e-10 * std::max(ev(1), 1e-300);
}

PositionEstimate estimate_position(std::span<const RangeMeasurement> measurements,
                                   const Eigen::Vector2d& init, const SolveOptions& opts) {
  if (measurements.empty()) throw std::domain_error("estimate_position: no measurements");
  const Objective cost = [measurements](const Eigen::VectorXd& x) {
    return range_residual_cost(measurements, Eigen::Vector2d(x(0), x(1)));
  };
  const SolveReport report = minimize_unconstrained(cost, Eigen::VectorXd(init), opts);

  PositionEstimate est;
  est.t = measurements.back().t;
  est.p_hat = Eigen::Vector2d(report.x_opt(0), report.x_opt(1));
  est.residual_rms = std::sqrt(std::max(0.0, report.f_opt) / double(measurements.size()));
  est.solver_converged = report.converged;
  est.degraded = receivers_collinear(measurements);
  return est;
}

Eigen::Vector2d reflect_across_receivers(std::span<const RangeMeasurement> measurements,
                                         const Eigen::Vector2d& p) {
  if (measurements.size() < 2) return p;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& m : measurements) mean += m.vehicle_pos;
  mean /= double(measurements.size());
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const auto& m : measurements) {
    const Eigen::Vector2d d = m.vehicle_pos - mean;
    scatter += d * d.transpose();
  }
  if (!(scatter.trace() > 0)) return p;
  const Eigen::Vector2d axis = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(scatter).eigenvectors().col(1);
  const Eigen::Vector2d rel = p - mean;
  return mean + 2.0 * axis.dot(rel) * axis - rel;
}

PositionEstimate estimate_position_multistart(std::span<const RangeMeasurement> measurements,
                                              const Eigen::Vector2d& init, const SolveOptions& opts) {
  PositionEstimate best = estimate_position(measurements, init, opts);
  const Eigen::Vector2d mirror = reflect_across_receivers(measurements, best.p_hat);
  if ((mirror - best.p_hat).norm() > 1e-6) {
    const PositionEstimate alt = estimate_position(measurements, mirror, opts);
    if (alt.residual_rms < best.residual_rms - 1e-12) best = alt;
  }
  return best;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples, double zeta_min, double zeta_max)
    : sorted_(std::move(samples)) {
  if (sorted_.empty()) throw std::domain_error("empirical_cdf: empty sample set");
  if (!(zeta_max > zeta_min)) throw std::domain_error("empirical_cdf: requires zeta_max > zeta_min");
  for (double& s : sorted_) s = std::clamp(s, zeta_min, zeta_max);
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double zeta) const {
  const auto count = std::upper_bound(sorted_.begin(), sorted_.end(), zeta) - sorted_.begin();
  return double(count) / double(sorted_.size());
}

EmpiricalCdf empirical_cdf(std::vector<double> samples, double zeta_min, double zeta_max) {
  return EmpiricalCdf(std::move(samples), zeta_min, zeta_max);
}

int order_rule(std::size_t n) {
  if (n < 1) throw std::domain_error("order_rule: n must be positive");
  double r = std::pow(double(n), 0.75);
  // Perfect fourth powers must not be bumped up by pow() round-off.
  if (std::abs(r - std::round(r)) < 1e-9 * r) r = std::round(r);
  return static_cast<int>(std::ceil(r)) + 2;
}

bool within_consistency_window(std::size_t n, int m) {
  const double nd = double(n);
  const double upper = nd / std::log(nd);
  return std::pow(nd, 2.0 / 3.0) <= m && m <= upper * upper;
}

BernsteinPolyd bernstein_cdf(const EmpiricalCdf& ecdf, int m, double zeta_min, double zeta_max) {
  Eigen::VectorXd c(m + 1);
  for (int j = 0; j <= m; ++j) {
    // Last grid point is zeta_max exactly so the top coefficient is 1.
    const double zeta = j == m ? zeta_max : zeta_min + double(j) / double(m) * (zeta_max - zeta_min);
    c(j) = ecdf(zeta);
  }
  return BernsteinPolyd::scalar(c, zeta_min, zeta_max);
}

DensityModel fit_density(std::span<const PositionEstimate> estimates, double zeta_min,
                         double zeta_max) {
  if (estimates.empty()) throw std::domain_error("fit_density: no estimates");
  return fit_density(estimates, zeta_min, zeta_max, order_rule(estimates.size()));
}

DensityModel fit_density(std::span<const PositionEstimate> estimates, double zeta_min,
                         double zeta_max, int m) {
  if (estimates.empty()) throw std::domain_error("fit_density: no estimates");
  std::array<std::vector<double>, 2> axis;
  for (const auto& e : estimates) {
    axis[0].push_back(e.p_hat.x());
    axis[1].push_back(e.p_hat.y());
  }
  const auto cdf_x = bernstein_cdf(EmpiricalCdf(axis[0], zeta_min, zeta_max), m, zeta_min, zeta_max);
  const auto cdf_y = bernstein_cdf(EmpiricalCdf(axis[1], zeta_min, zeta_max), m, zeta_min, zeta_max);
  return DensityModel{{cdf_x, cdf_y},
                      {derivative(cdf_x), derivative(cdf_y)},
                      m,
                      estimates.size(),
                      zeta_min,
                      zeta_max};
}

std::array<double, 3> density_moments(const BernsteinPolyd& pdf) {
  const BernsteinPolyd f(pdf.coeffs().cwiseMax(0.0), pdf.t0(), pdf.tf());
  const BernsteinPolyd zeta = BernsteinPolyd::scalar(Eigen::Vector2d(pdf.t0(), pdf.tf()), pdf.t0(), pdf.tf());
  const BernsteinPolyd zf = zeta * f;
  return {integrate(f)(0), integrate(zf)(0), integrate(zeta * zf)(0)};
}

std::array<AxisStats, 2> density_stats(const DensityModel& density) {
  std::array<AxisStats, 2> out;
  for (int a = 0; a < 2; ++a) {
    const auto [m0, m1, m2] = density_moments(density.pdf[a]);
    if (!(m0 > 1e-12)) throw std::domain_error("density_stats: degenerate density");
    const double mean = m1 / m0;
    out[a] = {mean, std::sqrt(std::max(0.0, m2 / m0 - mean * mean))};
  }
  return out;
}

std::array<AxisStats, 2> sample_stats(std::span<const PositionEstimate> estimates) {
  std::array<AxisStats, 2> out;
  if (estimates.empty()) return out;
  for (int a = 0; a < 2; ++a) {
    double mean = 0.0;
    for (const auto& e : estimates) mean += e.p_hat(a);
    mean /= double(estimates.size());
    double var = 0.0;
    for (const auto& e : estimates) var += (e.p_hat(a) - mean) * (e.p_hat(a) - mean);
    out[a] = {mean, std::sqrt(var / double(estimates.size()))};
  }
  return out;
}

}  // namespace bernloc
