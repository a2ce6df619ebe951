#include <stdexcept>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "fgo/app/commands.hpp"
#include "fgo/app/config.hpp"
#include "fgo/app/csv.hpp"
#include "fgo/app/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace fgo;
using namespace fgo::app;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fgo_test_app_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Tiny TinySeq run so the end-to-end tests stay fast.
std::string small_config(const fs::path& out_dir, const std::string& extra = "") {
  return "{\n"
         "  \"algorithm\": \"FGO\",\n"
         "  \"outer_steps\": 6,\n"
         "  \"group_size\": 4,\n"
         "  \"batch_questions\": 2,\n"
         "  \"learning_rate\": 5.0,\n"
         "  \"eval_samples\": 64,\n"
         "  \"env\": {\"kind\": \"TinySeq\", \"vocab_size\": 3, \"horizon\": 3, \"targets\": [0, 1]},\n" +
         extra + "  \"output_dir\": \"" + out_dir.generic_string() + "\"\n}\n";
}

int count_subdirs(const fs::path& p) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(p)) n += e.is_directory();
  return n;
}

int count_lines(const std::string& s) {
  return static_cast<int>(std::count(s.begin(), s.end(), '\n'));
}

int count_of(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("parse_config reports line numbers") {
  const std::string text = "{\n  \"alpha\": 0.5,\n  \"alpah\": 1.0\n}\n";
  try {
    parse_config(text, "cfg.json");
    FAIL("expected an error");
  } catch (const ConfigParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("cfg.json:3") != std::string::npos);
    CHECK(std::string(e.what()).find("alpah") != std::string::npos);
  }
  try {
    parse_config("{\n\"seed\": 1,\n\n  \"group_size\": 0\n}", "c");
    FAIL("expected an error");
  } catch (const ConfigParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_config("{\"alpha\": \"big\"}"), ConfigParseError);
  CHECK_THROWS_AS(parse_config("{\"env\": {\"kind\": \"chess\"}}"), ConfigError);
  CHECK_THROWS_AS(parse_config("{\"sweep\": {\"alpha\": []}}"), ConfigError);
  CHECK_THROWS_AS(parse_config("not json"), ConfigParseError);
}

TEST_CASE("parse_config defaults and round trip") {
  const auto d = parse_config("{}");
  CHECK(d.train.algorithm == Algorithm::FGO);
  CHECK(d.train.alpha == 0.01);
  CHECK(d.train.group_size == 8);
  CHECK(d.train.env.kind == EnvKind::PadSum);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    ExperimentConfig c;
    c.train.algorithm = static_cast<Algorithm>(rng() % 3);
    c.train.alpha = std::uniform_real_distribution<double>(0, 2)(rng);
    c.train.beta = std::uniform_real_distribution<double>(0, 2)(rng);
    c.train.kl_coeff = (rng() % 2) ? 0.0 : 0.1 * (rng() % 5);
    c.train.seed = rng();
    c.train.group_size = 1 + rng() % 9;
    if (rng() % 2) c.train.env = make_tinyseq(2 + rng() % 2, 1 + rng() % 3, {0});
    c.compare = {Algorithm::GRPO, Algorithm::FGO};
    c.sweep = {true, {0.0, 0.5}, {1.0}};
    c.seeds = 1 + rng() % 3;
    const auto text = to_json(c).dump(2);
    const auto back = parse_config(text);
    CHECK(to_json(back).dump(2) == text);
    CHECK(back.train.alpha == c.train.alpha);
    CHECK(back.train.seed == c.train.seed);
  }
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::uniform_real_distribution<double>(-1e6, 1e6)(rng) /
                     std::pow(10.0, static_cast<int>(rng() % 12));
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("training log csv is byte stable") {
  TrainConfig c;
  c.env = make_tinyseq(3, 3, {0, 1});
  c.outer_steps = 8;
  c.group_size = 4;
  c.batch_questions = 2;
  const auto log = run_training(c);
  const auto text = training_log_csv(log);
  CHECK(text.rfind(std::string(kTrainingLogHeader) + "\n", 0) == 0);
  CHECK(count_lines(text) == 9);
  CHECK(training_log_csv(run_training(c)) == text);
  std::istringstream in(text);
  TrainingLog reread;
  reread.steps = read_training_log(in);
  CHECK(training_log_csv(reread) == text);
  std::istringstream bad("step,x\n1,2\n");
  CHECK_THROWS(read_training_log(bad));
}

TEST_CASE("svg plot") {
  const auto svg = render_line_plot({"Reward", "step", "reward"},
                                    {{"a", {0, 0.5, 1}}, {"b", {1, 1, 1}}, {"c", {}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count_of(svg, "class=\"series\"") == 3);
  CHECK(svg.find("data-name=\"b\"") != std::string::npos);
  CHECK(svg.find("Reward") != std::string::npos);
}

TEST_CASE("train writes three files and is reproducible") {
  const auto root = scratch("train");
  const auto cfg = root / "c.json";
  spit(cfg, small_config(root / "run"));
  std::ostringstream out, err;
  REQUIRE(cmd_train(cfg, std::nullopt, out, err) == kExitOk);
  for (const char* f : {kTrainingLogFile, kFinalReportFile, kResolvedConfigFile}) {
    CHECK(fs::is_regular_file(root / "run" / f));
  }
  const auto first = slurp(root / "run" / kTrainingLogFile);
  CHECK(count_lines(first) == 7);
  const auto report = nlohmann::json::parse(slurp(root / "run" / kFinalReportFile));
  CHECK(report.contains("accuracy"));
  CHECK(report.contains("act"));
  CHECK(report.contains("invalid_samples"));
  // Resolved config parses back to the same config.
  const auto resolved = slurp(root / "run" / kResolvedConfigFile);
  CHECK(to_json(parse_config(resolved)).dump(2) == to_json(load_config(cfg)).dump(2));

  REQUIRE(cmd_train(cfg, std::nullopt, out, err) == kExitOk);
  CHECK(slurp(root / "run" / kTrainingLogFile) == first);
  CHECK(cmd_train(cfg, 99, out, err) == kExitOk);
  CHECK(nlohmann::json::parse(slurp(root / "run" / kResolvedConfigFile))["seed"] == 99);
}

TEST_CASE("train rejects a bad config before writing anything") {
  const auto root = scratch("bad");
  const auto cfg = root / "c.json";
  spit(cfg, small_config(root / "run", "  \"group_size\": 0,\n"));
  std::ostringstream out, err;
  CHECK(cmd_train(cfg, std::nullopt, out, err) == kExitConfig);
  CHECK_FALSE(fs::exists(root / "run"));
  CHECK(err.str().find("group_size") != std::string::npos);
  CHECK(cmd_train(root / "missing.json", std::nullopt, out, err) != kExitOk);
}

TEST_CASE("sweep over alpha") {
  const auto root = scratch("sweep");
  const auto cfg = root / "c.json";
  spit(cfg, small_config(root / "out", "  \"sweep\": {\"alpha\": [0, 0.01, 1]},\n"));
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(cfg, std::nullopt, out, err) == kExitOk);
  CHECK(count_subdirs(root / "out") == 3);
  const auto summary = slurp(root / "out" / "sweep_summary.csv");
  CHECK(count_lines(summary) == 4);
  CHECK(fs::is_regular_file(root / "out" / "reward.svg"));
  CHECK(fs::is_directory(root / "out" / "FGO_a0.01_b1_s0"));
}

TEST_CASE("sweep comparing algorithms over seeds") {
  const auto root = scratch("compare");
  const auto cfg = root / "c.json";
  spit(cfg, small_config(root / "out", "  \"compare\": [\"FGO\", \"GRPO\"],\n  \"seeds\": 3,\n"));
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(cfg, std::nullopt, out, err) == kExitOk);
  CHECK(count_subdirs(root / "out") == 6);
  CHECK(count_lines(slurp(root / "out" / "sweep_summary.csv")) == 7);
  CHECK(fs::is_directory(root / "out" / "GRPO_s2"));
}

TEST_CASE("sweep with an empty grid") {
  const auto root = scratch("empty");
  const auto cfg = root / "c.json";
  spit(cfg, small_config(root / "out", "  \"sweep\": {\"alpha\": []},\n"));
  std::ostringstream out, err;
  CHECK(cmd_sweep(cfg, std::nullopt, out, err) == kExitConfig);
  CHECK_FALSE(fs::exists(root / "out"));
}

TEST_CASE("report and eval") {
  const auto root = scratch("report");
  const auto cfg = root / "c.json";
  spit(cfg, small_config(root / "out", "  \"compare\": [\"FGO\", \"GRPO\", \"DrGRPO\"],\n"));
  std::ostringstream out, err;
  REQUIRE(cmd_sweep(cfg, std::nullopt, out, err) == kExitOk);
  const std::vector<fs::path> dirs{root / "out" / "FGO_a0.01_b1_s0", root / "out" / "GRPO_s0",
                                   root / "out" / "DrGRPO_s0"};
  REQUIRE(cmd_report(dirs, root / "rep", out, err) == kExitOk);
  for (const char* f : {"reward.svg", "length.svg", "entropy.svg"}) {
    CHECK(count_of(slurp(root / "rep" / f), "class=\"series\"") == 3);
  }
  CHECK(count_lines(slurp(root / "rep" / "metrics.csv")) == 4);

  std::ostringstream err2;
  CHECK(cmd_report({root / "nope"}, root / "rep2", out, err2) == kExitConfig);
  CHECK(err2.str().find("nope") != std::string::npos);

  std::ostringstream e1, e2;
  REQUIRE(cmd_eval(dirs[0], 100, 5, e1, err) == kExitOk);
  REQUIRE(cmd_eval(dirs[0], 100, 5, e2, err) == kExitOk);
  CHECK(e1.str() == e2.str());
  const auto j = nlohmann::json::parse(e1.str());
  CHECK(j["samples"] == 100);
  CHECK(j["accuracy"].get<double>() >= 0.0);
  CHECK(cmd_eval(root / "nope", std::nullopt, std::nullopt, out, err) != kExitOk);
}

TEST_CASE("output root") {
  const auto root = scratch("root");
  setenv(kOutputRootEnv, root.c_str(), 1);
  CHECK(resolve_output("a/b") == root / "a/b");
  CHECK(resolve_output("/abs") == fs::path("/abs"));
  unsetenv(kOutputRootEnv);
  CHECK(resolve_output("a/b") == fs::path("a/b"));
}

TEST_CASE("cli binary exit codes") {
  const char* cli = std::getenv("FGO_CLI");
  if (!cli) {
    MESSAGE("FGO_CLI not set; skipping");
    return;
  }
  const auto root = scratch("cli");
  const auto cfg = root / "c.json";
  spit(cfg, small_config(root / "run"));
  const std::string bin = std::string("\"") + cli + "\"";
  const auto run = [&](const std::string& args) {
    const int status = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("--help") == 0);
  CHECK(run("") == 2);
  CHECK(run("train") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("train " + cfg.string()) == 0);
  CHECK(run("train " + cfg.string() + " --seed 4") == 0);
  CHECK(nlohmann::json::parse(slurp(root / "run" / kResolvedConfigFile))["seed"] == 4);
  CHECK(run("eval " + (root / "run").string() + " --samples 10") == 0);
  CHECK(run("report " + (root / "run").string() + " --out " + (root / "rep").string()) == 0);
  CHECK(run("report " + (root / "missing").string()) == 2);
  spit(root / "bad.json", "{\"nope\": 1}");
  CHECK(run("train " + (root / "bad.json").string()) == 2);
}
