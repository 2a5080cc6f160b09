#pragma once

// Command implementations behind the bernloc executable: run artifacts,
// the paired-mode comparison, and gnuplot-ready exports.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bernloc/mission.hpp"

namespace bernloc {

enum ExitCode : int {
  kExitConfidence = 0,
  kExitUsage = 1,
  kExitTimeout = 2,
  kExitInternal = 3,
};

struct RunArtifacts {
  std::filesystem::path config;        // config.txt
  std::filesystem::path measurements;  // measurements.csv
  std::filesystem::path estimates;     // estimates.csv
  std::filesystem::path trajectory;    // trajectory.csv
  std::filesystem::path plans;         // plans.csv
  std::filesystem::path plan_coeffs;   // plan_coeffs.csv
  std::filesystem::path density;       // density.csv
  std::filesystem::path summary;       // summary.txt

  std::vector<std::filesystem::path> all() const;
};

/// Writes `content` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Serializes a mission log. Files appear only once fully written.
RunArtifacts write_run_artifacts(const std::filesystem::path& dir, const MissionConfig& config,
                                 const MissionLog& log);

// Table renderers, exposed for tests.
std::string measurements_csv(const MissionLog& log);
std::string estimates_csv(const MissionLog& log);
std::string trajectory_csv(const MissionLog& log);
std::string density_csv(const std::vector<DensitySnapshot>& snapshots);

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            std::ostream& out, std::ostream& err);

/// Exit 0 when every mission completed (timeouts included), else 1 or 3.
int cmd_compare(const std::filesystem::path& config_path, const std::vector<std::uint64_t>& seeds,
                const std::filesystem::path& out_dir, unsigned threads, std::ostream& out,
                std::ostream& err);

/// Writes path.dat, error.dat and density.dat into `run_dir`.
int cmd_plotdata(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

constexpr int kPlotGrid = 200;

}  // namespace bernloc
