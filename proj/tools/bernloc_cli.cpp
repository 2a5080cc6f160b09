// bernloc: run localization missions, compare planner modes, export plot data.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bernloc/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Range-only target localization with Bernstein-polynomial planning"};
  app.require_subcommand(1);

  std::string config_path, out_dir, run_dir;
  std::vector<std::uint64_t> seeds;
  std::uint64_t num_seeds = 0;
  unsigned threads = 0;

  auto* run = app.add_subcommand("run", "Run one mission and write its artifacts");
  run->add_option("config", config_path, "Mission config file")->required();
  run->add_option("out_dir", out_dir, "Output directory")->required();

  auto* compare = app.add_subcommand("compare", "Run each seed with and without the information term");
  compare->add_option("config", config_path, "Mission config file")->required();
  compare->add_option("out_dir", out_dir, "Output directory")->required();
  auto* seed_list = compare->add_option("--seeds", seeds, "Seeds, comma separated")->delimiter(',');
  compare->add_option("-n,--num-seeds", num_seeds, "Use seeds 1..N (default 20)")->excludes(seed_list);
  compare->add_option("-j,--threads", threads, "Worker threads (0 = all cores)");

  auto* plotdata = app.add_subcommand("plotdata", "Export gnuplot data files from a run directory");
  plotdata->add_option("run_dir", run_dir, "Directory written by `run`")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return bernloc::kExitUsage;
  }

  if (*run) return bernloc::cmd_run(config_path, out_dir, std::cout, std::cerr);
  if (*compare) {
    if (seeds.empty()) {
      for (std::uint64_t s = 1; s <= (num_seeds ? num_seeds : 20); ++s) seeds.push_back(s);
    }
    return bernloc::cmd_compare(config_path, seeds, out_dir, threads, std::cout, std::cerr);
  }
  return bernloc::cmd_plotdata(run_dir, std::cout, std::cerr);
}
