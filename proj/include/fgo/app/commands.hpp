#ifndef FGO_APP_COMMANDS_HPP_
#define FGO_APP_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "json.hpp"

#include "fgo/app/config.hpp"
#include "fgo/metrics.hpp"
#include "fgo/trainer.hpp"

namespace fgo::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

// Environment variable that, when set, roots every relative output path.
inline constexpr const char* kOutputRootEnv = "FGO_OUTPUT_ROOT";

std::filesystem::path resolve_output(const std::filesystem::path& dir);

// Files of one run directory.
inline constexpr const char* kTrainingLogFile = "training_log.csv";
inline constexpr const char* kFinalReportFile = "final_report.json";
inline constexpr const char* kResolvedConfigFile = "resolved_config.json";

struct RunResult {
  TrainingLog log;
  EvalReport report;
};

// Trains and evaluates the final policy on train.eval_samples samples.
RunResult run_experiment(const TrainConfig& train);

// Writes the three run files; throws IoError.
void write_run(const std::filesystem::path& dir, const ExperimentConfig& config,
               const RunResult& result);

nlohmann::ordered_json final_report_json(const ExperimentConfig& config,
                                         const RunResult& result);
nlohmann::ordered_json policy_to_json(const PolicyParams& params);
PolicyParams policy_from_json(const nlohmann::json& j);

int cmd_train(const std::filesystem::path& config_path, std::optional<std::uint64_t> seed,
              std::ostream& out, std::ostream& err);
int cmd_sweep(const std::filesystem::path& config_path, std::optional<std::uint64_t> seed,
              std::ostream& out, std::ostream& err);
int cmd_eval(const std::filesystem::path& run_dir, std::optional<int> samples,
             std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err);
int cmd_report(const std::vector<std::filesystem::path>& run_dirs,
               const std::optional<std::filesystem::path>& out_dir, std::ostream& out,
               std::ostream& err);

}  // namespace fgo::app

#endif  // FGO_APP_COMMANDS_HPP_
