#include "fgo/app/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fgo/app/csv.hpp"
#include "fgo/app/svg_plot.hpp"

namespace fgo::app {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

fs::path resolve_output(const fs::path& dir) {
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
    return fs::path(root) / dir;
  }
  return dir;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
}

// Runs `body`, mapping the error taxonomy onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "io error: " << e.what() << '\n';
    return kExitIo;
  }
}

std::string cell_name(Algorithm a, double alpha, double beta, std::uint64_t seed) {
  std::string name = to_string(a);
  if (a == Algorithm::FGO) {
    name += "_a" + format_double(alpha) + "_b" + format_double(beta);
  }
  return name + "_s" + std::to_string(seed);
}

}  // namespace

RunResult run_experiment(const TrainConfig& train) {
  RunResult r;
  r.log = run_training(train);
  const auto samples =
      sample_for_eval(r.log.final_params, train.env, train.eval_samples, train.seed);
  r.report = make_report(r.log, samples, train.env);
  return r;
}

ojson policy_to_json(const PolicyParams& params) {
  ojson j;
  j["vocab_size"] = params.vocab_size;
  j["horizon"] = params.horizon;
  j["num_questions"] = params.num_questions;
  j["logits"] = params.logits;
  return j;
}

PolicyParams policy_from_json(const nlohmann::json& j) {
  PolicyParams p = init_policy(j.at("vocab_size").get<int>(), j.at("horizon").get<int>(),
                               j.at("num_questions").get<int>());
  auto logits = j.at("logits").get<std::vector<double>>();
  if (logits.size() != p.logits.size()) throw ConfigError("policy logits have wrong size");
  p.logits = std::move(logits);
  return p;
}

ojson final_report_json(const ExperimentConfig& config, const RunResult& result) {
  const auto& rep = result.report;
  ojson j;
  j["algorithm"] = to_string(config.train.algorithm);
  j["seed"] = config.train.seed;
  j["outer_steps"] = config.train.outer_steps;
  j["eval_samples"] = config.train.eval_samples;
  j["accuracy"] = rep.accuracy;
  j["mean_length"] = rep.mean_length;
  j["mean_entropy"] = rep.mean_entropy;
  j["act"] = rep.act;
  j["marker_per_hundred"] = rep.marker_per_hundred;
  j["invalid_samples"] = rep.invalid_samples;
  j["reward_series"] = rep.reward_series;
  j["length_series"] = rep.length_series;
  j["entropy_series"] = rep.entropy_series;
  j["policy"] = policy_to_json(result.log.final_params);
  return j;
}

void write_run(const fs::path& dir, const ExperimentConfig& config, const RunResult& result) {
  make_dirs(dir);
  write_file(dir / kTrainingLogFile, training_log_csv(result.log));
  write_file(dir / kFinalReportFile, final_report_json(config, result).dump(2) + "\n");
  write_file(dir / kResolvedConfigFile, to_json(config).dump(2) + "\n");
}

int cmd_train(const fs::path& config_path, std::optional<std::uint64_t> seed,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.train.seed = *seed;
    const fs::path dir = resolve_output(cfg.output_dir);
    const auto result = run_experiment(cfg.train);
    write_run(dir, cfg, result);
    out << dir.string() << '\n';
    return kExitOk;
  });
}

int cmd_sweep(const fs::path& config_path, std::optional<std::uint64_t> seed,
              std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig cfg = load_config(config_path);
    if (seed) cfg.train.seed = *seed;
    if (!cfg.sweep.present && cfg.compare.empty()) {
      throw ConfigError(config_path.string() + ": sweep grid is empty (need 'sweep' or 'compare')");
    }
    const auto algorithms =
        cfg.compare.empty() ? std::vector<Algorithm>{cfg.train.algorithm} : cfg.compare;
    const auto alphas =
        cfg.sweep.alpha.empty() ? std::vector<double>{cfg.train.alpha} : cfg.sweep.alpha;
    const auto betas =
        cfg.sweep.beta.empty() ? std::vector<double>{cfg.train.beta} : cfg.sweep.beta;

    const fs::path root = resolve_output(cfg.output_dir);
    make_dirs(root);
    std::ostringstream summary;
    CsvWriter csv(summary, {"cell", "algorithm", "alpha", "beta", "seed", "accuracy",
                            "mean_length", "act", "invalid_samples", "final_entropy"});
    std::vector<Series> reward, length, entropy;

    for (Algorithm a : algorithms) {
      // Length/entropy exponents only matter for FGO.
      const auto& cell_alphas = a == Algorithm::FGO ? alphas : std::vector<double>{cfg.train.alpha};
      const auto& cell_betas = a == Algorithm::FGO ? betas : std::vector<double>{cfg.train.beta};
      for (double alpha : cell_alphas) {
        for (double beta : cell_betas) {
          for (int k = 0; k < cfg.seeds; ++k) {
            ExperimentConfig cell = cfg;
            cell.train.algorithm = a;
            cell.train.alpha = alpha;
            cell.train.beta = beta;
            cell.train.seed = cfg.train.seed + static_cast<std::uint64_t>(k);
            cell.compare.clear();
            cell.sweep = {};
            cell.seeds = 1;
            const std::string name = cell_name(a, alpha, beta, cell.train.seed);
            const fs::path dir = root / name;
            cell.output_dir = dir.string();
            cell.train.validate();

            const auto result = run_experiment(cell.train);
            write_run(dir, cell, result);
            const auto& rep = result.report;
            csv.row({name, to_string(a), format_double(alpha), format_double(beta),
                     std::to_string(cell.train.seed), format_double(rep.accuracy),
                     format_double(rep.mean_length), format_double(rep.act),
                     std::to_string(rep.invalid_samples),
                     format_double(rep.entropy_series.empty() ? 0.0 : rep.entropy_series.back())});
            reward.push_back({name, rep.reward_series});
            length.push_back({name, rep.length_series});
            entropy.push_back({name, rep.entropy_series});
            out << dir.string() << '\n';
          }
        }
      }
    }
    write_file(root / "sweep_summary.csv", summary.str());
    if (cfg.plots) {
      write_file(root / "reward.svg", render_line_plot({"Mean verified reward", "step", "reward"}, reward));
      write_file(root / "length.svg", render_line_plot({"Mean response length", "step", "tokens"}, length));
      write_file(root / "entropy.svg", render_line_plot({"Mean trajectory entropy", "step", "nats"}, entropy));
    }
    return kExitOk;
  });
}

int cmd_eval(const fs::path& run_dir, std::optional<int> samples,
             std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const fs::path report_path = run_dir / kFinalReportFile;
    const fs::path config_path = run_dir / kResolvedConfigFile;
    if (!fs::is_regular_file(report_path) || !fs::is_regular_file(config_path)) {
      throw ConfigError("run directory " + run_dir.string() + " has no " +
                        kFinalReportFile + "/" + kResolvedConfigFile);
    }
    const ExperimentConfig cfg = load_config(config_path);
    nlohmann::json report;
    try {
      report = nlohmann::json::parse(read_file(report_path));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(report_path.string() + ": " + e.what());
    }
    PolicyParams params;
    try {
      params = policy_from_json(report.at("policy"));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(report_path.string() + ": bad policy: " + e.what());
    }
    const int n = samples.value_or(cfg.train.eval_samples);
    if (n < 1) throw ConfigError("--samples must be >= 1");
    const std::uint64_t s = seed.value_or(cfg.train.seed);
    const auto trajs = sample_for_eval(params, cfg.train.env, n, s);
    const auto eval = summarize(trajs, cfg.train.env);
    ojson j;
    j["run_dir"] = run_dir.string();
    j["samples"] = n;
    j["seed"] = s;
    j["accuracy"] = 100.0 * eval.accuracy;
    j["mean_length"] = eval.mean_length;
    j["mean_entropy"] = eval.mean_entropy;
    j["act"] = act(100.0 * eval.accuracy, eval.mean_length);
    j["marker_per_hundred"] =
        cfg.train.env.kind == EnvKind::PadSum ? marker_frequency(trajs, padsum::kMark) : 0.0;
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

int cmd_report(const std::vector<fs::path>& run_dirs, const std::optional<fs::path>& out_dir,
               std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (run_dirs.empty()) throw ConfigError("report needs at least one run directory");
    struct Run {
      std::string name;
      std::vector<StepRecord> steps;
      nlohmann::json final_report;
    };
    std::vector<Run> runs;
    for (const auto& dir : run_dirs) {
      const fs::path log_path = dir / kTrainingLogFile;
      const fs::path rep_path = dir / kFinalReportFile;
      if (!fs::is_regular_file(log_path) || !fs::is_regular_file(rep_path)) {
        throw ConfigError("missing logs in run directory " + dir.string());
      }
      Run r;
      r.name = fs::path(dir).lexically_normal().filename().string();
      if (r.name.empty()) r.name = fs::path(dir).lexically_normal().parent_path().filename().string();
      std::istringstream log_stream(read_file(log_path));
      try {
        r.steps = read_training_log(log_stream);
        r.final_report = nlohmann::json::parse(read_file(rep_path));
      } catch (const std::exception& e) {
        throw ConfigError("unreadable logs in " + dir.string() + ": " + e.what());
      }
      runs.push_back(std::move(r));
    }

    const fs::path dest = out_dir ? *out_dir : resolve_output("report");
    make_dirs(dest);
    std::vector<Series> reward, length, entropy;
    std::ostringstream table;
    CsvWriter csv(table, {"run", "algorithm", "seed", "steps", "accuracy", "mean_length",
                          "act", "invalid_samples", "marker_per_hundred", "final_entropy"});
    for (const auto& r : runs) {
      Series sr{r.name, {}}, sl{r.name, {}}, se{r.name, {}};
      for (const auto& s : r.steps) {
        sr.values.push_back(s.mean_reward);
        sl.values.push_back(s.mean_length);
        se.values.push_back(s.mean_entropy);
      }
      const auto& f = r.final_report;
      csv.row({r.name, f.value("algorithm", std::string("?")),
               std::to_string(f.value("seed", std::uint64_t{0})), std::to_string(r.steps.size()),
               format_double(f.value("accuracy", 0.0)), format_double(f.value("mean_length", 0.0)),
               format_double(f.value("act", 0.0)), std::to_string(f.value("invalid_samples", 0LL)),
               format_double(f.value("marker_per_hundred", 0.0)),
               format_double(r.steps.empty() ? 0.0 : r.steps.back().mean_entropy)});
      reward.push_back(std::move(sr));
      length.push_back(std::move(sl));
      entropy.push_back(std::move(se));
    }
    write_file(dest / "reward.svg", render_line_plot({"Mean verified reward", "step", "reward"}, reward));
    write_file(dest / "length.svg", render_line_plot({"Mean response length", "step", "tokens"}, length));
    write_file(dest / "entropy.svg", render_line_plot({"Mean trajectory entropy", "step", "nats"}, entropy));
    write_file(dest / "metrics.csv", table.str());
    out << dest.string() << '\n';
    return kExitOk;
  });
}

}  // namespace fgo::app
