#pragma once

// Closed-loop localization mission: sample, estimate, refit, replan,
// terminate. One mission is one sequential, deterministic loop.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bernloc/bernstein.hpp"
#include "bernloc/estimator.hpp"
#include "bernloc/planner.hpp"
#include "bernloc/sensing.hpp"

namespace bernloc {

struct MissionConfig {
  Eigen::Vector2d target_pos{15.0, 12.0};
  Eigen::Vector2d vehicle_start{2.0, 2.0};
  double zeta_min = 0.0;
  double zeta_max = 20.0;
  double sample_rate_hz = 2.0;
  double replan_interval_s = 5.0;
  double r_t = 2.0;
  double tf_max = 350.0;
  ChannelParams channel;
  PlanWeights weights;
  double v_max = 1.0;
  int degree = 5;
  std::uint64_t rng_seed = 1;
  bool fim_enabled = true;

  void validate() const;
};

enum class Termination { kConfidence, kTimeout };

struct VehicleState {
  double t = 0.0;
  Eigen::Vector2d pos = Eigen::Vector2d::Zero();
  Eigen::Vector2d vel = Eigen::Vector2d::Zero();
};

struct EstimateRecord {
  PositionEstimate estimate;
  double error = 0.0;  // distance to the true target
  AxisStats density_x;
  AxisStats density_y;
  AxisStats sample_x;
  AxisStats sample_y;
  bool density_valid = false;
};

struct PlanRecord {
  double t_replan = 0.0;
  BernsteinPolyd poly;
  CostBreakdown cost;
  double objective = 0.0;
  bool planner_fault = false;
};

struct DensitySnapshot {
  double t = 0.0;
  DensityModel density;
};

struct MissionLog {
  std::vector<RangeMeasurement> measurements;
  std::vector<EstimateRecord> estimates;
  std::vector<VehicleState> states;
  std::vector<PlanRecord> plans;             // the pre-plan initializer is plans[0]
  std::vector<DensitySnapshot> densities;    // at each replan, plus the terminal one
  Termination termination = Termination::kTimeout;
  double termination_time = 0.0;
  double final_error = 0.0;
  int planner_faults = 0;

  double time_averaged_error() const;
  /// Mean over axes of the peak of the terminal PDF on a uniform grid.
  double terminal_pdf_peak(int grid = 200) const;
  /// Same measure on the latest snapshot taken at or before `t`.
  double pdf_peak_at(double t, int grid = 200) const;
};

double pdf_peak(const DensityModel& density, int grid = 200);

/// Straight line from the start toward the search-area center at
/// 0.8 v_max, covering [0, replan_interval].
BernsteinPolyd initial_trajectory(const MissionConfig& config);

MissionLog run(const MissionConfig& config);

struct ModeRun {
  MissionLog log;
  double time_averaged_error = 0.0;
  double final_error = 0.0;
  double pdf_peak = 0.0;  // at the latest replan both modes of the seed reached
};

struct SeedComparison {
  std::uint64_t seed = 0;
  ModeRun with_fim;
  ModeRun without_fim;
};

struct ComparisonSummary {
  std::vector<SeedComparison> runs;
  double median_error_fim = 0.0;     // median of time-averaged errors
  double median_error_no_fim = 0.0;
  double median_final_error_fim = 0.0;
  double median_final_error_no_fim = 0.0;
  double confidence_fraction_fim = 0.0;
  double confidence_fraction_no_fim = 0.0;
  double peak_win_fraction = 0.0;  // seeds where the FIM-mode PDF peak >= no-FIM
};

/// Runs every seed with and without the information term. Missions run on
/// up to `threads` workers (0 = hardware concurrency); results are ordered
/// by seed.
ComparisonSummary compare_modes(const MissionConfig& config, const std::vector<std::uint64_t>& seeds,
                                unsigned threads = 0);

double median(std::vector<double> values);

}  // namespace bernloc
