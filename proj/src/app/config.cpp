#include "fgo/app/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace fgo::app {

using nlohmann::json;

ConfigParseError::ConfigParseError(const std::string& source, int line,
                                   const std::string& message)
    : ConfigError(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  int line = 1;
  for (std::size_t i = 0; i < offset; ++i) line += text[i] == '\n';
  return line;
}

// Locates a key in the raw text: the first match at or after `from`.
class KeyLocator {
 public:
  KeyLocator(const std::string& text, std::string source)
      : text_(text), source_(std::move(source)) {}

  std::size_t offset(const std::string& key, std::size_t from = 0) const {
    const auto pos = text_.find("\"" + key + "\"", from);
    return pos == std::string::npos ? from : pos;
  }
  int line(const std::string& key, std::size_t from = 0) const {
    return line_of_offset(text_, offset(key, from));
  }
  [[noreturn]] void fail(const std::string& key, std::size_t from,
                         const std::string& message) const {
    throw ConfigParseError(source_, line(key, from), message);
  }

 private:
  const std::string& text_;
  std::string source_;
};

void reject_unknown(const json& obj, const std::set<std::string>& known, const KeyLocator& loc,
                    std::size_t from, const std::string& where) {
  for (const auto& item : obj.items()) {
    if (!known.contains(item.key())) {
      loc.fail(item.key(), from, "unknown key '" + item.key() + "' in " + where);
    }
  }
}

template <typename T>
T get_as(const json& obj, const std::string& key, const KeyLocator& loc, std::size_t from) {
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) loc.fail(key, from, "'" + key + "' must be a boolean");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) loc.fail(key, from, "'" + key + "' must be a string");
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) loc.fail(key, from, "'" + key + "' must be a number");
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_unsigned()) {
      loc.fail(key, from, "'" + key + "' must be a non-negative integer");
    }
  } else {
    if (!v.is_number_integer()) loc.fail(key, from, "'" + key + "' must be an integer");
    const auto wide = v.get<long long>();
    if (wide < std::numeric_limits<T>::min() || wide > std::numeric_limits<T>::max()) {
      loc.fail(key, from, "'" + key + "' out of range");
    }
  }
  return v.get<T>();
}

template <typename T>
void read_opt(const json& obj, const std::string& key, T& out, const KeyLocator& loc,
              std::size_t from = 0) {
  if (obj.contains(key)) out = get_as<T>(obj, key, loc, from);
}

std::vector<double> number_list(const json& obj, const std::string& key,
                                const KeyLocator& loc, std::size_t from) {
  const json& v = obj.at(key);
  if (!v.is_array()) loc.fail(key, from, "'" + key + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) loc.fail(key, from, "'" + key + "' must contain only numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

EnvSpec parse_env(const json& j, const KeyLocator& loc) {
  const std::size_t from = loc.offset("env");
  if (!j.is_object()) loc.fail("env", 0, "'env' must be an object");
  reject_unknown(j, {"kind", "horizon", "num_questions", "question_seed", "vocab_size", "targets"},
                 loc, from, "env");
  std::string kind = "PadSum";
  read_opt(j, "kind", kind, loc, from);
  try {
    const EnvKind k = env_kind_from_string(kind);
    if (k == EnvKind::PadSum) {
      int horizon = 16, nq = 8;
      std::uint64_t qseed = 7;
      read_opt(j, "horizon", horizon, loc, from);
      read_opt(j, "num_questions", nq, loc, from);
      read_opt(j, "question_seed", qseed, loc, from);
      if (j.contains("targets") || j.contains("vocab_size")) {
        loc.fail(j.contains("targets") ? "targets" : "vocab_size", from,
                 "PadSum takes no 'targets' or 'vocab_size'");
      }
      return make_padsum(nq, horizon, qseed);
    }
    int vocab = 3, horizon = 3;
    read_opt(j, "vocab_size", vocab, loc, from);
    read_opt(j, "horizon", horizon, loc, from);
    if (j.contains("num_questions") || j.contains("question_seed")) {
      loc.fail(j.contains("num_questions") ? "num_questions" : "question_seed", from,
               "TinySeq takes 'targets', not 'num_questions'/'question_seed'");
    }
    std::vector<Token> targets{0};
    if (j.contains("targets")) {
      targets.clear();
      for (double t : number_list(j, "targets", loc, from)) targets.push_back(static_cast<Token>(t));
    }
    return make_tinyseq(vocab, horizon, targets);
  } catch (const ConfigParseError&) {
    throw;
  } catch (const ConfigError& e) {
    loc.fail("env", 0, e.what());
  }
}

}  // namespace

EnvSpec env_from_json(const json& j) {
  const std::string text = j.dump();
  return parse_env(j, KeyLocator(text, "env"));
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(source, line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1),
                           "malformed JSON");
  }
  const KeyLocator loc(text, source);
  if (!root.is_object()) throw ConfigParseError(source, 1, "config must be a JSON object");
  reject_unknown(root,
                 {"algorithm", "alpha", "beta", "clip_eps", "kl_coeff", "group_size",
                  "batch_questions", "learning_rate", "outer_steps", "inner_epochs", "seed",
                  "entropy_floor", "per_token_entropy", "eval_samples", "env", "output_dir",
                  "compare", "sweep", "seeds", "plots"},
                 loc, 0, "config");

  ExperimentConfig cfg;
  TrainConfig& t = cfg.train;
  if (root.contains("algorithm")) {
    try {
      t.algorithm = algorithm_from_string(get_as<std::string>(root, "algorithm", loc, 0));
    } catch (const ConfigParseError&) {
      throw;
    } catch (const ConfigError& e) {
      loc.fail("algorithm", 0, e.what());
    }
  }
  read_opt(root, "alpha", t.alpha, loc);
  read_opt(root, "beta", t.beta, loc);
  read_opt(root, "clip_eps", t.clip_eps, loc);
  read_opt(root, "kl_coeff", t.kl_coeff, loc);
  read_opt(root, "group_size", t.group_size, loc);
  read_opt(root, "batch_questions", t.batch_questions, loc);
  read_opt(root, "learning_rate", t.learning_rate, loc);
  read_opt(root, "outer_steps", t.outer_steps, loc);
  read_opt(root, "inner_epochs", t.inner_epochs, loc);
  read_opt(root, "seed", t.seed, loc);
  read_opt(root, "entropy_floor", t.entropy_floor, loc);
  read_opt(root, "per_token_entropy", t.per_token_entropy, loc);
  read_opt(root, "eval_samples", t.eval_samples, loc);
  if (root.contains("env")) t.env = parse_env(root.at("env"), loc);
  read_opt(root, "output_dir", cfg.output_dir, loc);
  read_opt(root, "seeds", cfg.seeds, loc);
  read_opt(root, "plots", cfg.plots, loc);

  if (root.contains("compare")) {
    const json& c = root.at("compare");
    if (!c.is_array()) loc.fail("compare", 0, "'compare' must be a list of algorithm names");
    for (const auto& e : c) {
      if (!e.is_string()) loc.fail("compare", 0, "'compare' entries must be strings");
      try {
        cfg.compare.push_back(algorithm_from_string(e.get<std::string>()));
      } catch (const ConfigError& err) {
        loc.fail("compare", 0, err.what());
      }
    }
  }
  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    const std::size_t from = loc.offset("sweep");
    if (!s.is_object()) loc.fail("sweep", 0, "'sweep' must be an object");
    reject_unknown(s, {"alpha", "beta"}, loc, from, "sweep");
    cfg.sweep.present = true;
    if (s.contains("alpha")) cfg.sweep.alpha = number_list(s, "alpha", loc, from);
    if (s.contains("beta")) cfg.sweep.beta = number_list(s, "beta", loc, from);
    if ((s.contains("alpha") && cfg.sweep.alpha.empty()) ||
        (s.contains("beta") && cfg.sweep.beta.empty()) || s.empty()) {
      loc.fail("sweep", 0, "sweep grid is empty");
    }
  }

  // Semantic checks, reported at the line of the offending key.
  const std::pair<const char*, bool> checks[] = {
      {"group_size", t.group_size >= 1},
      {"batch_questions", t.batch_questions >= 1},
      {"outer_steps", t.outer_steps >= 0},
      {"inner_epochs", t.inner_epochs >= 1},
      {"learning_rate", t.learning_rate > 0.0},
      {"alpha", t.alpha >= 0.0},
      {"beta", t.beta >= 0.0},
      {"clip_eps", t.clip_eps > 0.0 && t.clip_eps < 1.0},
      {"kl_coeff", t.kl_coeff >= 0.0},
      {"entropy_floor", t.entropy_floor > 0.0},
      {"eval_samples", t.eval_samples >= 1},
      {"seeds", cfg.seeds >= 1},
  };
  for (const auto& [key, ok] : checks) {
    if (!ok) loc.fail(key, 0, std::string("invalid value for '") + key + "'");
  }
  for (double a : cfg.sweep.alpha) {
    if (!(a >= 0.0)) loc.fail("sweep", 0, "sweep alpha values must be >= 0");
  }
  for (double b : cfg.sweep.beta) {
    if (!(b >= 0.0)) loc.fail("sweep", 0, "sweep beta values must be >= 0");
  }
  try {
    t.validate();
  } catch (const ConfigError& e) {
    throw ConfigParseError(source, 0, e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

nlohmann::ordered_json env_to_json(const EnvSpec& env) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(env.kind);
  j["horizon"] = env.horizon;
  if (env.kind == EnvKind::PadSum) {
    j["num_questions"] = env.num_questions();
    j["question_seed"] = env.question_seed;
  } else {
    j["vocab_size"] = env.vocab_size;
    std::vector<Token> targets;
    for (const auto& q : env.questions) targets.push_back(q.gold_answer);
    j["targets"] = targets;
  }
  return j;
}

nlohmann::ordered_json to_json(const ExperimentConfig& config) {
  const TrainConfig& t = config.train;
  nlohmann::ordered_json j;
  j["algorithm"] = to_string(t.algorithm);
  j["alpha"] = t.alpha;
  j["beta"] = t.beta;
  j["clip_eps"] = t.clip_eps;
  j["kl_coeff"] = t.kl_coeff;
  j["group_size"] = t.group_size;
  j["batch_questions"] = t.batch_questions;
  j["learning_rate"] = t.learning_rate;
  j["outer_steps"] = t.outer_steps;
  j["inner_epochs"] = t.inner_epochs;
  j["seed"] = t.seed;
  j["entropy_floor"] = t.entropy_floor;
  j["per_token_entropy"] = t.per_token_entropy;
  j["eval_samples"] = t.eval_samples;
  j["env"] = env_to_json(t.env);
  j["output_dir"] = config.output_dir;
  nlohmann::ordered_json compare = nlohmann::ordered_json::array();
  for (auto a : config.compare) compare.push_back(to_string(a));
  j["compare"] = compare;
  if (config.sweep.present) {
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    if (!config.sweep.alpha.empty()) s["alpha"] = config.sweep.alpha;
    if (!config.sweep.beta.empty()) s["beta"] = config.sweep.beta;
    j["sweep"] = s;
  }
  j["seeds"] = config.seeds;
  j["plots"] = config.plots;
  return j;
}

}  // namespace fgo::app
