#pragma once

// Range-only position fixes and Bernstein-smoothed distribution estimates
// of the fix history.

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bernloc/bernstein.hpp"
#include "bernloc/sensing.hpp"
#include "bernloc/solver.hpp"

namespace bernloc {

struct PositionEstimate {
  double t = 0.0;
  Eigen::Vector2d p_hat = Eigen::Vector2d::Zero();
  double residual_rms = 0.0;
  bool solver_converged = false;
  /// Fewer than three measurements or collinear receiver positions.
  bool degraded = false;
};

/// Sum of squared range residuals, sum_k (||q_k - p|| - r_k)^2.
double range_residual_cost(std::span<const RangeMeasurement> measurements,
                           const Eigen::Vector2d& p);

/// True when the receiver positions span fewer than two dimensions.
bool receivers_collinear(std::span<const RangeMeasurement> measurements);

PositionEstimate estimate_position(std::span<const RangeMeasurement> measurements,
                                   const Eigen::Vector2d& init, const SolveOptions& opts = {});

/// Reflection of a point across the principal axis of the receiver
/// positions (the best-fit line through them).
Eigen::Vector2d reflect_across_receivers(std::span<const RangeMeasurement> measurements,
                                         const Eigen::Vector2d& p);

/// estimate_position from `init` and from its reflection across the
/// receiver axis, keeping the lower residual (ties keep `init`). Range-only
/// fixes from near-collinear receivers have a mirror-image local minimum.
PositionEstimate estimate_position_multistart(std::span<const RangeMeasurement> measurements,
                                              const Eigen::Vector2d& init,
                                              const SolveOptions& opts = {});

/// Right-continuous empirical distribution of samples clipped to
/// [zeta_min, zeta_max].
class EmpiricalCdf {
 public:
  EmpiricalCdf(std::vector<double> samples, double zeta_min, double zeta_max);

  double operator()(double zeta) const;
  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted_samples() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

EmpiricalCdf empirical_cdf(std::vector<double> samples, double zeta_min, double zeta_max);

/// Smoothing degree for n samples: ceil(n^(3/4)) + 2.
int order_rule(std::size_t n);

/// Whether n^(2/3) <= m <= (n / log n)^2.
bool within_consistency_window(std::size_t n, int m);

/// Bernstein CDF on [zeta_min, zeta_max]: coefficient j is the empirical
/// CDF at the j-th of m+1 uniform grid points.
BernsteinPolyd bernstein_cdf(const EmpiricalCdf& ecdf, int m, double zeta_min, double zeta_max);

struct DensityModel {
  std::array<BernsteinPolyd, 2> cdf;  // x, y
  std::array<BernsteinPolyd, 2> pdf;
  int m = 0;
  std::size_t n = 0;
  double zeta_min = 0.0;
  double zeta_max = 0.0;
};

DensityModel fit_density(std::span<const PositionEstimate> estimates, double zeta_min,
                         double zeta_max);
/// Fit with an explicit degree instead of the order rule.
DensityModel fit_density(std::span<const PositionEstimate> estimates, double zeta_min,
                         double zeta_max, int m);

struct AxisStats {
  double mean = 0.0;
  double sigma = 0.0;
};

/// Moments of a density polynomial on its own interval:
/// {int f, int z f, int z^2 f}. Negative coefficients are clamped to zero.
std::array<double, 3> density_moments(const BernsteinPolyd& pdf);

/// Per-axis mean and standard deviation of the fitted densities.
std::array<AxisStats, 2> density_stats(const DensityModel& density);

/// Per-axis mean and standard deviation of the raw estimates.
std::array<AxisStats, 2> sample_stats(std::span<const PositionEstimate> estimates);

}  // namespace bernloc
