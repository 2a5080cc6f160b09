#include "bernloc/sensing.hpp"

#include <cmath>
#include <stdexcept>

namespace bernloc {

void ChannelParams::validate() const {
  if (!(n_exp > 0)) throw std::invalid_argument("channel: n_exp must be positive");
  if (!(noise_sigma0 >= 0)) throw std::invalid_argument("channel: sigma0 must be non-negative");
  if (!(noise_ref_range > 0)) throw std::invalid_argument("channel: noise_ref_range must be positive");
}

double range_from_rssi(double rssi, const ChannelParams& params) {
  return std::pow(10.0, (params.P - rssi) / (10.0 * params.n_exp));
}

double rssi_from_range(double range, const ChannelParams& params) {
  if (!(range > 0)) throw std::domain_error("rssi_from_range: range must be positive");
  return params.P - 10.0 * params.n_exp * std::log10(range);
}

double noise_sigma(double true_range, const ChannelParams& params) {
  switch (params.noise_model) {
    case NoiseModel::kConstant:
      return params.noise_sigma0;
    case NoiseModel::kDistanceScaled: {
      const double ratio = true_range / params.noise_ref_range;
      return params.noise_sigma0 * ratio * ratio;
    }
  }
  return params.noise_sigma0;
}

RangeMeasurement sample_measurement(const Eigen::Vector2d& vehicle_pos,
                                    const Eigen::Vector2d& target_pos, double t,
                                    const ChannelParams& params, NoiseStream& rng) {
  const double true_range = (vehicle_pos - target_pos).norm();
  if (!(true_range > 0)) throw std::domain_error("sample_measurement: vehicle coincides with target");
  const double sigma = noise_sigma(true_range, params);

  double range = true_range + sigma * rng.standard_normal();
  for (int attempt = 0; attempt < 10 && !(range > 0); ++attempt) {
    range = true_range + sigma * rng.standard_normal();
  }
  if (!(range > 0)) range = 1e-3;
  return {t, range, true_range, vehicle_pos};
}

}  // namespace bernloc
