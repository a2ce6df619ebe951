#ifndef FGO_APP_CONFIG_HPP_
#define FGO_APP_CONFIG_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "fgo/errors.hpp"
#include "fgo/trainer.hpp"

namespace fgo::app {

// Bad config content. `line` is 1-based; 0 when no position is known.
class ConfigParseError : public ConfigError {
 public:
  ConfigParseError(const std::string& source, int line, const std::string& message);
  int line() const { return line_; }

 private:
  int line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepGrid {
  bool present = false;
  std::vector<double> alpha;
  std::vector<double> beta;
};

struct ExperimentConfig {
  TrainConfig train;
  std::string output_dir = "runs/experiment";
  std::vector<Algorithm> compare;
  SweepGrid sweep;
  int seeds = 1;
  bool plots = true;
};

// Strict JSON config: unknown keys and type mismatches are errors that name
// the offending line of `text`.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

// Complete config, defaults included; parse_config(to_json(c).dump())
// reproduces c.
nlohmann::ordered_json to_json(const ExperimentConfig& config);
nlohmann::ordered_json env_to_json(const EnvSpec& env);
EnvSpec env_from_json(const nlohmann::json& j);

}  // namespace fgo::app

#endif  // FGO_APP_CONFIG_HPP_
