#pragma once

// Beacon/receiver channel: log-distance RSSI <-> range law and noisy range
// measurement generation.

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace bernloc {

enum class NoiseModel { kConstant, kDistanceScaled };

struct ChannelParams {
  double P = -40.0;  // RSSI at unit range, dB
  double n_exp = 2.0;
  double noise_sigma0 = 0.1;  // m
  NoiseModel noise_model = NoiseModel::kConstant;
  double noise_ref_range = 10.0;  // m

  void validate() const;
};

struct RangeMeasurement {
  double t = 0.0;
  double range = 0.0;
  double true_range = 0.0;
  Eigen::Vector2d vehicle_pos = Eigen::Vector2d::Zero();
};

/// r = 10^((P - RSSI) / (10 n)).
double range_from_rssi(double rssi, const ChannelParams& params);
double rssi_from_range(double range, const ChannelParams& params);

/// Standard deviation of the additive range noise at the given true range.
double noise_sigma(double true_range, const ChannelParams& params);

/// Seeded source of standard normal draws. One stream per mission.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : engine_(seed) {}
  double standard_normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

RangeMeasurement sample_measurement(const Eigen::Vector2d& vehicle_pos,
                                    const Eigen::Vector2d& target_pos, double t,
                                    const ChannelParams& params, NoiseStream& rng);

}  // namespace bernloc
