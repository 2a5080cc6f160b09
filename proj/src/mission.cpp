#include "bernloc/mission.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace bernloc {
namespace {

constexpr double kTimeEps = 1e-9;

VehicleState state_on(const BernsteinPolyd& traj, double t) {
  if (t <= traj.tf() + kTimeEps) {
    const double tc = std::min(t, traj.tf());
    return {t, eval(traj, tc), eval(derivative(traj), tc)};
  }
  // Past the end of the plan the vehicle holds position.
  return {t, traj.coeff(traj.degree()), Eigen::Vector2d::Zero()};
}

bool is_confident(const EstimateRecord& rec, double r_t) {
  return rec.density_valid && 2.0 * rec.density_x.sigma <= r_t && 2.0 * rec.density_y.sigma <= r_t;
}

}  // namespace

void MissionConfig::validate() const {
  if (!(sample_rate_hz > 0)) throw std::invalid_argument("sample_rate_hz must be positive");
  if (!(replan_interval_s > 0)) throw std::invalid_argument("replan_interval_s must be positive");
  if (!(r_t > 0)) throw std::invalid_argument("r_t_m must be positive");
  if (!(tf_max > 0)) throw std::invalid_argument("tf_max_s must be positive");
  if (!(zeta_max > zeta_min)) throw std::invalid_argument("zeta_max must exceed zeta_min");
  for (int a = 0; a < 2; ++a) {
    if (target_pos(a) < zeta_min || target_pos(a) > zeta_max) {
      throw std::invalid_argument("target_pos must lie inside the search area");
    }
  }
  if (!(v_max > 0)) throw std::invalid_argument("v_max must be positive");
  if (degree < 3 || degree > 30) throw std::invalid_argument("degree_d must be in [3, 30]");
  if (weights.time < 0 || weights.effort < 0 || weights.terminal < 0 || weights.information < 0) {
    throw std::invalid_argument("weights must be non-negative");
  }
  channel.validate();
}

double MissionLog::time_averaged_error() const {
  if (estimates.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& e : estimates) acc += e.error;
  return acc / double(estimates.size());
}

double pdf_peak(const DensityModel& d, int grid) {
  double acc = 0.0;
  for (int a = 0; a < 2; ++a) {
    double peak = 0.0;
    for (int i = 0; i < grid; ++i) {
      const double z = d.zeta_min + (d.zeta_max - d.zeta_min) * double(i) / double(grid - 1);
      peak = std::max(peak, eval_scalar(d.pdf[a], z));
    }
    acc += peak;
  }
  return 0.5 * acc;
}

double MissionLog::terminal_pdf_peak(int grid) const {
  return densities.empty() ? 0.0 : pdf_peak(densities.back().density, grid);
}

double MissionLog::pdf_peak_at(double t, int grid) const {
  const DensitySnapshot* hit = nullptr;
  for (const auto& s : densities) {
    if (s.t <= t + kTimeEps) hit = &s;
  }
  return hit ? pdf_peak(hit->density, grid) : 0.0;
}

BernsteinPolyd initial_trajectory(const MissionConfig& config) {
  const Eigen::Vector2d center = Eigen::Vector2d::Constant(0.5 * (config.zeta_min + config.zeta_max));
  const Eigen::Vector2d offset = center - config.vehicle_start;
  const double dist = offset.norm();
  const double reach = std::min(dist, 0.8 * config.v_max * config.replan_interval_s);
  const Eigen::Vector2d end = dist > 0 ? Eigen::Vector2d(config.vehicle_start + offset * (reach / dist))
                                       : config.vehicle_start;
  Eigen::Matrix2Xd c(2, config.degree + 1);
  for (int j = 0; j <= config.degree; ++j) {
    c.col(j) = config.vehicle_start + (double(j) / config.degree) * (end - config.vehicle_start);
  }
  return BernsteinPolyd(c, 0.0, config.replan_interval_s);
}

MissionLog run(const MissionConfig& config) {
  config.validate();
  MissionLog log;
  NoiseStream rng(config.rng_seed);

  PlanWeights weights = config.weights;
  if (!config.fim_enabled) weights.information = 0.0;
  // The FIM scale only shifts -log det by a constant; noiseless channels
  // fall back to unit variance.
  const double fim_sigma = config.channel.noise_sigma0 > 0 ? config.channel.noise_sigma0 : 1.0;

  BernsteinPolyd active = initial_trajectory(config);
  log.plans.push_back({0.0, active, {}, 0.0, false});
  log.states.push_back(state_on(active, 0.0));

  const double dt = 1.0 / config.sample_rate_hz;
  double next_replan = config.replan_interval_s;
  Eigen::Vector2d warm = Eigen::Vector2d::Constant(0.5 * (config.zeta_min + config.zeta_max));
  std::vector<PositionEstimate> history;

  for (long k = 1;; ++k) {
    const double t = double(k) * dt;
    const VehicleState state = state_on(active, t);
    log.states.push_back(state);

    if ((state.pos - config.target_pos).norm() > 1e-9) {
      log.measurements.push_back(sample_measurement(state.pos, config.target_pos, t, config.channel, rng));
    }

    EstimateRecord rec;
    if (!log.measurements.empty()) {
      rec.estimate = estimate_position_multistart(log.measurements, warm);
      rec.estimate.t = t;
      warm = rec.estimate.p_hat;
      rec.error = (rec.estimate.p_hat - config.target_pos).norm();
      history.push_back(rec.estimate);
    }

    std::optional<DensityModel> density;
    if (!history.empty()) {
      density = fit_density(history, config.zeta_min, config.zeta_max);
      try {
        const auto stats = density_stats(*density);
        rec.density_x = stats[0];
        rec.density_y = stats[1];
        rec.density_valid = true;
      } catch (const std::domain_error&) {
        rec.density_valid = false;
      }
      const auto raw = sample_stats(history);
      rec.sample_x = raw[0];
      rec.sample_y = raw[1];
      log.estimates.push_back(rec);
    }

    const bool confident = !log.estimates.empty() && log.estimates.back().estimate.t == t &&
                           is_confident(log.estimates.back(), config.r_t);
    if (confident || t >= config.tf_max - kTimeEps) {
      log.termination = confident ? Termination::kConfidence : Termination::kTimeout;
      log.termination_time = t;
      if (density) log.densities.push_back({t, *density});
      break;
    }

    if (t >= next_replan - kTimeEps) {
      next_replan += config.replan_interval_s;
      if (!density) continue;
      log.densities.push_back({t, *density});

      PlanContext ctx;
      ctx.t_i = t;
      ctx.p_ti = state.pos;
      ctx.v_ti = state.vel;
      ctx.p_hat = history.back().p_hat;
      ctx.density = &log.densities.back().density;
      ctx.sigma = fim_sigma;
      ctx.weights = weights;
      ctx.v_max = config.v_max;
      ctx.degree = config.degree;
      ctx.tf_max = std::max(config.tf_max, t + dt);
      ctx.tf_min = std::min(t + config.replan_interval_s, ctx.tf_max);
      if (active.tf() > t + kTimeEps) ctx.warm_start = restrict_to(active, t, active.tf());

      bool fault = false;
      try {
        Trajectory traj = plan(ctx);
        fault = traj.planner_fault;
        if (!fault) {
          active = traj.poly;
          log.plans.push_back({t, active, traj.cost, traj.objective, false});
        }
      } catch (const std::domain_error&) {
        fault = true;
      }
      if (fault) {
        // Keep flying the remainder of the previous plan; hover after it ends.
        ++log.planner_faults;
        log.plans.push_back({t, active, {}, 0.0, true});
      }
    }
  }

  log.final_error = log.estimates.empty() ? (config.vehicle_start - config.target_pos).norm()
                                          : log.estimates.back().error;
  return log;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ComparisonSummary compare_modes(const MissionConfig& config, const std::vector<std::uint64_t>& seeds,
                                unsigned threads) {
  if (seeds.empty()) throw std::invalid_argument("compare_modes: need at least one seed");
  ComparisonSummary summary;
  summary.runs.resize(seeds.size());
  const std::size_t jobs = 2 * seeds.size();

  auto run_job = [&](std::size_t job) {
    MissionConfig cfg = config;
    cfg.rng_seed = seeds[job / 2];
    cfg.fim_enabled = job % 2 == 0;
    ModeRun out;
    out.log = run(cfg);
    out.time_averaged_error = out.log.time_averaged_error();
    out.final_error = out.log.final_error;
    SeedComparison& slot = summary.runs[job / 2];
    slot.seed = cfg.rng_seed;
    (cfg.fim_enabled ? slot.with_fim : slot.without_fim) = std::move(out);
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::size_t>(threads, jobs));
  if (threads <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs; j = next++) run_job(j);
      });
    }
  }

  for (auto& r : summary.runs) {
    // Peaks are compared at equal sample counts: the last replan time that
    // both missions of the seed reached.
    const double t_end = std::min(r.with_fim.log.termination_time, r.without_fim.log.termination_time);
    const double t_common = std::floor((t_end + kTimeEps) / config.replan_interval_s) * config.replan_interval_s;
    const double t_peak = t_common > 0 ? t_common : t_end;
    r.with_fim.pdf_peak = r.with_fim.log.pdf_peak_at(t_peak);
    r.without_fim.pdf_peak = r.without_fim.log.pdf_peak_at(t_peak);
  }

  std::vector<double> err_fim, err_nofim, fin_fim, fin_nofim;
  int conf_fim = 0, conf_nofim = 0, peak_wins = 0;
  for (const auto& r : summary.runs) {
    err_fim.push_back(r.with_fim.time_averaged_error);
    err_nofim.push_back(r.without_fim.time_averaged_error);
    fin_fim.push_back(r.with_fim.final_error);
    fin_nofim.push_back(r.without_fim.final_error);
    conf_fim += r.with_fim.log.termination == Termination::kConfidence;
    conf_nofim += r.without_fim.log.termination == Termination::kConfidence;
    peak_wins += r.with_fim.pdf_peak >= r.without_fim.pdf_peak;
  }
  const double n = double(summary.runs.size());
  summary.median_error_fim = median(err_fim);
  summary.median_error_no_fim = median(err_nofim);
  summary.median_final_error_fim = median(fin_fim);
  summary.median_final_error_no_fim = median(fin_nofim);
  summary.confidence_fraction_fim = conf_fim / n;
  summary.confidence_fraction_no_fim = conf_nofim / n;
  summary.peak_win_fraction = peak_wins / n;
  return summary;
}

}  // namespace bernloc
