#include "bernloc/cli.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "bernloc/config.hpp"

namespace fs = std::filesystem;

namespace bernloc {
namespace {

std::string num(double v) { return fmt::format("{}", v); }

const char* termination_name(Termination t) {
  return t == Termination::kConfidence ? "confidence" : "timeout";
}

void append_density_rows(std::string& out, const std::string& prefix, const DensitySnapshot& s) {
  const DensityModel& d = s.density;
  for (int a = 0; a < 2; ++a) {
    const Eigen::VectorXd c = d.cdf[a].scalar_coeffs();
    for (Eigen::Index j = 0; j < c.size(); ++j) {
      out += fmt::format("{}{},{},{},{},{},{},{},{}\n", prefix, num(s.t), a == 0 ? "x" : "y", d.m, d.n,
                         num(d.zeta_min), num(d.zeta_max), j, num(c(j)));
    }
  }
}

std::string summary_text(const std::string& hash, const MissionLog& log) {
  std::string out;
  auto kv = [&out](const std::string& key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  kv("config_hash", hash);
  kv("termination", termination_name(log.termination));
  kv("termination_time", num(log.termination_time));
  kv("final_error", num(log.final_error));
  kv("time_averaged_error", num(log.time_averaged_error()));
  kv("measurements", std::to_string(log.measurements.size()));
  kv("estimates", std::to_string(log.estimates.size()));
  kv("plans", std::to_string(log.plans.size()));
  kv("planner_faults", std::to_string(log.planner_faults));
  if (!log.estimates.empty()) {
    const EstimateRecord& last = log.estimates.back();
    kv("final_xhat", num(last.estimate.p_hat.x()));
    kv("final_yhat", num(last.estimate.p_hat.y()));
    kv("final_sigma_x", num(last.density_x.sigma));
    kv("final_sigma_y", num(last.density_y.sigma));
  }
  kv("terminal_pdf_peak", num(log.terminal_pdf_peak()));
  return out;
}

// Minimal reader for the CSV files this module writes.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw std::runtime_error("missing column '" + name + "'");
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
  t.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.rows.push_back(split(line));
    if (t.rows.back().size() != t.header.size()) {
      throw std::runtime_error(path.string() + ": ragged row");
    }
  }
  return t;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw std::runtime_error("bad number '" + s + "'");
  return v;
}

std::array<BernsteinPolyd, 2> terminal_cdf(const Table& density) {
  if (density.rows.empty()) throw std::runtime_error("density.csv has no snapshots");
  const std::size_t ct = density.column("t"), ca = density.column("axis"),
                    clo = density.column("zeta_min"), chi = density.column("zeta_max"),
                    cc = density.column("cdf_coeff");
  const std::string last_t = density.rows.back()[ct];
  std::array<std::vector<double>, 2> coeffs;
  double lo = 0.0, hi = 0.0;
  for (const auto& r : density.rows) {
    if (r[ct] != last_t) continue;
    coeffs[r[ca] == "x" ? 0 : 1].push_back(to_double(r[cc]));
    lo = to_double(r[clo]);
    hi = to_double(r[chi]);
  }
  auto make = [&](const std::vector<double>& c) {
    if (c.empty()) throw std::runtime_error("density.csv: incomplete terminal snapshot");
    return BernsteinPolyd::scalar(Eigen::Map<const Eigen::VectorXd>(c.data(), Eigen::Index(c.size())), lo, hi);
  };
  return {make(coeffs[0]), make(coeffs[1])};
}

}  // namespace

std::vector<fs::path> RunArtifacts::all() const {
  return {config, measurements, estimates, trajectory, plans, plan_coeffs, density, summary};
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string measurements_csv(const MissionLog& log) {
  std::string out = "t,range,true_range,veh_x,veh_y\n";
  for (const auto& m : log.measurements) {
    out += fmt::format("{},{},{},{},{}\n", num(m.t), num(m.range), num(m.true_range),
                       num(m.vehicle_pos.x()), num(m.vehicle_pos.y()));
  }
  return out;
}

std::string estimates_csv(const MissionLog& log) {
  std::string out = "t,xhat,yhat,err,residual_rms,sigma_x,sigma_y,sample_sigma_x,sample_sigma_y\n";
  for (const auto& e : log.estimates) {
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", num(e.estimate.t), num(e.estimate.p_hat.x()),
                       num(e.estimate.p_hat.y()), num(e.error), num(e.estimate.residual_rms),
                       num(e.density_x.sigma), num(e.density_y.sigma), num(e.sample_x.sigma),
                       num(e.sample_y.sigma));
  }
  return out;
}

std::string trajectory_csv(const MissionLog& log) {
  std::string out = "t,x,y,vx,vy\n";
  for (const auto& s : log.states) {
    out += fmt::format("{},{},{},{},{}\n", num(s.t), num(s.pos.x()), num(s.pos.y()), num(s.vel.x()),
                       num(s.vel.y()));
  }
  return out;
}

std::string density_csv(const std::vector<DensitySnapshot>& snapshots) {
  std::string out = "t,axis,m,n,zeta_min,zeta_max,j,cdf_coeff\n";
  for (const auto& s : snapshots) append_density_rows(out, "", s);
  return out;
}

RunArtifacts write_run_artifacts(const fs::path& dir, const MissionConfig& config, const MissionLog& log) {
  fs::create_directories(dir);
  RunArtifacts a{dir / "config.txt",  dir / "measurements.csv", dir / "estimates.csv",
                 dir / "trajectory.csv", dir / "plans.csv",     dir / "plan_coeffs.csv",
                 dir / "density.csv",   dir / "summary.txt"};

  const std::string config_text = format_config(config);
  std::string plans = "plan,t_replan,t0,tf,planner_fault,time,effort,terminal,information,objective\n";
  std::string coeffs = "plan,j,cx,cy\n";
  for (std::size_t i = 0; i < log.plans.size(); ++i) {
    const PlanRecord& p = log.plans[i];
    plans += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", i, num(p.t_replan), num(p.poly.t0()),
                         num(p.poly.tf()), int(p.planner_fault), num(p.cost.time), num(p.cost.effort),
                         num(p.cost.terminal), num(p.cost.information), num(p.objective));
    for (int j = 0; j <= p.poly.degree(); ++j) {
      coeffs += fmt::format("{},{},{},{}\n", i, j, num(p.poly.coeff(j).x()), num(p.poly.coeff(j).y()));
    }
  }

  write_file_atomic(a.config, config_text);
  write_file_atomic(a.measurements, measurements_csv(log));
  write_file_atomic(a.estimates, estimates_csv(log));
  write_file_atomic(a.trajectory, trajectory_csv(log));
  write_file_atomic(a.plans, plans);
  write_file_atomic(a.plan_coeffs, coeffs);
  write_file_atomic(a.density, density_csv(log.densities));
  // The summary goes last: its presence marks a complete run directory.
  write_file_atomic(a.summary, summary_text(config_hash(config_text), log));
  return a;
}

int cmd_run(const fs::path& config_path, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  MissionConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "error: " << config_path.string() << ": " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const MissionLog log = run(config);
    write_run_artifacts(out_dir, config, log);
    out << fmt::format("termination = {} at t = {} s, final error = {} m\n", termination_name(log.termination),
                       num(log.termination_time), num(log.final_error));
    return log.termination == Termination::kConfidence ? kExitConfidence : kExitTimeout;
  } catch (const std::exception& e) {
    err << "internal fault: " << e.what() << "\n";
    return kExitInternal;
  }
}

int cmd_compare(const fs::path& config_path, const std::vector<std::uint64_t>& seeds, const fs::path& out_dir,
                unsigned threads, std::ostream& out, std::ostream& err) {
  if (seeds.empty()) {
    err << "error: at least one seed is required\n";
    return kExitUsage;
  }
  MissionConfig config;
  try {
    config = load_config(config_path);
  } catch (const ConfigError& e) {
    err << "error: " << config_path.string() << ": " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    const ComparisonSummary summary = compare_modes(config, seeds, threads);
    fs::create_directories(out_dir);

    std::string curves = "seed,mode,t,err\n";
    std::string densities = "seed,mode,t,axis,m,n,zeta_min,zeta_max,j,cdf_coeff\n";
    std::string text;
    auto kv = [&text](const std::string& key, const std::string& value) {
      text += fmt::format("{} = {}\n", key, value);
    };
    kv("config_hash", config_hash(format_config(config)));
    kv("seeds", fmt::format("{}", fmt::join(seeds, ",")));
    kv("median_error_fim", num(summary.median_error_fim));
    kv("median_error_nofim", num(summary.median_error_no_fim));
    kv("median_final_error_fim", num(summary.median_final_error_fim));
    kv("median_final_error_nofim", num(summary.median_final_error_no_fim));
    kv("confidence_fraction_fim", num(summary.confidence_fraction_fim));
    kv("confidence_fraction_nofim", num(summary.confidence_fraction_no_fim));
    kv("peak_win_fraction", num(summary.peak_win_fraction));

    for (const SeedComparison& r : summary.runs) {
      for (const bool fim : {true, false}) {
        const ModeRun& mode = fim ? r.with_fim : r.without_fim;
        const std::string tag = fim ? "fim" : "nofim";
        MissionConfig cfg = config;
        cfg.rng_seed = r.seed;
        cfg.fim_enabled = fim;
        write_run_artifacts(out_dir / fmt::format("seed_{}_{}", r.seed, tag), cfg, mode.log);

        const std::string key = fmt::format("seed.{}.{}.", r.seed, tag);
        kv(key + "termination", termination_name(mode.log.termination));
        kv(key + "termination_time", num(mode.log.termination_time));
        kv(key + "time_averaged_error", num(mode.time_averaged_error));
        kv(key + "final_error", num(mode.final_error));
        kv(key + "pdf_peak", num(mode.pdf_peak));
        kv(key + "planner_faults", std::to_string(mode.log.planner_faults));

        for (const auto& e : mode.log.estimates) {
          curves += fmt::format("{},{},{},{}\n", r.seed, tag, num(e.estimate.t), num(e.error));
        }
        if (!mode.log.densities.empty()) {
          append_density_rows(densities, fmt::format("{},{},", r.seed, tag), mode.log.densities.back());
        }
      }
    }
    write_file_atomic(out_dir / "error_curves.csv", curves);
    write_file_atomic(out_dir / "final_densities.csv", densities);
    write_file_atomic(out_dir / "comparison_summary.txt", text);

    out << fmt::format("median time-averaged error: fim {} m, no-fim {} m\n", num(summary.median_error_fim),
                       num(summary.median_error_no_fim));
    out << fmt::format("confidence terminations: fim {}, no-fim {}; pdf peak wins (fim) {}\n",
                       num(summary.confidence_fraction_fim), num(summary.confidence_fraction_no_fim),
                       num(summary.peak_win_fraction));
    return kExitConfidence;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal fault: " << e.what() << "\n";
    return kExitInternal;
  }
}

int cmd_plotdata(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  for (const char* name : {"config.txt", "trajectory.csv", "estimates.csv", "density.csv"}) {
    if (!fs::is_regular_file(run_dir / name)) {
      err << "error: " << (run_dir / name).string() << " not found\n";
      return kExitUsage;
    }
  }
  try {
    const MissionConfig config = load_config(run_dir / "config.txt");
    const Table traj = read_table(run_dir / "trajectory.csv");
    const Table est = read_table(run_dir / "estimates.csv");
    const auto cdf = terminal_cdf(read_table(run_dir / "density.csv"));
    const double tx = config.target_pos.x(), ty = config.target_pos.y();

    std::string path = fmt::format("# vehicle path\n# target {} {}\n# t x y\n", num(tx), num(ty));
    {
      const std::size_t ct = traj.column("t"), cx = traj.column("x"), cy = traj.column("y");
      for (const auto& r : traj.rows) path += fmt::format("{} {} {}\n", r[ct], r[cx], r[cy]);
    }
    // Second data block (gnuplot index 1): the true target.
    path += fmt::format("\n\n# target x y\n{} {}\n", num(tx), num(ty));

    std::string error = "# estimation error over time\n# t err sigma_x sigma_y\n";
    {
      const std::size_t ct = est.column("t"), ce = est.column("err"), csx = est.column("sigma_x"),
                        csy = est.column("sigma_y");
      for (const auto& r : est.rows) error += fmt::format("{} {} {} {}\n", r[ct], r[ce], r[csx], r[csy]);
    }

    const std::array<BernsteinPolyd, 2> pdf{derivative(cdf[0]), derivative(cdf[1])};
    std::string density = fmt::format("# terminal CDF and PDF per axis\n# target {} {}\n# zeta cdf_x pdf_x cdf_y pdf_y\n",
                                      num(tx), num(ty));
    const double lo = cdf[0].t0(), hi = cdf[0].tf();
    for (int i = 0; i < kPlotGrid; ++i) {
      const double z = i + 1 == kPlotGrid ? hi : lo + (hi - lo) * double(i) / double(kPlotGrid - 1);
      density += fmt::format("{} {} {} {} {}\n", num(z), num(eval_scalar(cdf[0], z)), num(eval_scalar(pdf[0], z)),
                             num(eval_scalar(cdf[1], z)), num(eval_scalar(pdf[1], z)));
    }

    write_file_atomic(run_dir / "path.dat", path);
    write_file_atomic(run_dir / "error.dat", error);
    write_file_atomic(run_dir / "density.dat", density);
    out << "wrote path.dat, error.dat, density.dat to " << run_dir.string() << "\n";
    return kExitConfidence;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace bernloc
