// Experiment driver: train / sweep / eval / report.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fgo/app/commands.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Fine-grained group policy optimization lab"};
  app.require_subcommand(1);

  std::string config;
  std::string run_dir;
  std::vector<std::string> run_dirs;
  std::string out_dir;
  std::uint64_t seed = 0;
  int samples = 0;

  auto* train = app.add_subcommand("train", "train one configuration");
  train->add_option("config", config, "JSON config file")->required();
  auto* train_seed = train->add_option("--seed", seed, "override the config seed");

  auto* sweep = app.add_subcommand("sweep", "train every cell of a sweep grid");
  sweep->add_option("config", config, "JSON config file")->required();
  auto* sweep_seed = sweep->add_option("--seed", seed, "override the base seed");

  auto* eval = app.add_subcommand("eval", "re-evaluate the final policy of a run");
  eval->add_option("run_dir", run_dir, "run directory")->required();
  auto* eval_samples = eval->add_option("--samples", samples, "number of samples");
  auto* eval_seed = eval->add_option("--seed", seed, "evaluation seed");

  auto* report = app.add_subcommand("report", "plots and a metrics table for runs");
  report->add_option("run_dirs", run_dirs, "run directories")->required();
  auto* report_out = report->add_option("--out", out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fgo::app::kExitConfig;
  }

  auto opt_seed = [&](CLI::Option* o) {
    return o->count() ? std::optional<std::uint64_t>(seed) : std::nullopt;
  };
  if (*train) return fgo::app::cmd_train(config, opt_seed(train_seed), std::cout, std::cerr);
  if (*sweep) return fgo::app::cmd_sweep(config, opt_seed(sweep_seed), std::cout, std::cerr);
  if (*eval) {
    return fgo::app::cmd_eval(run_dir,
                              eval_samples->count() ? std::optional<int>(samples) : std::nullopt,
                              opt_seed(eval_seed), std::cout, std::cerr);
  }
  std::vector<fs::path> dirs(run_dirs.begin(), run_dirs.end());
  return fgo::app::cmd_report(
      dirs, report_out->count() ? std::optional<fs::path>(out_dir) : std::nullopt, std::cout,
      std::cerr);
}
