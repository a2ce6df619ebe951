#include "fgo/environment.hpp"

#include <cmath>
#include <stdexcept>

#include "fgo/errors.hpp"
#include "fgo/rng.hpp"

namespace fgo {

std::string to_string(EnvKind kind) {
  return kind == EnvKind::PadSum ? "PadSum" : "TinySeq";
}

EnvKind env_kind_from_string(const std::string& name) {
  if (name == "PadSum") return EnvKind::PadSum;
  if (name == "TinySeq") return EnvKind::TinySeq;
  throw ConfigError("unknown env kind '" + name + "' (expected PadSum or TinySeq)");
}

void EnvSpec::validate() const {
  if (questions.empty()) throw ConfigError("env needs at least one question");
  if (kind == EnvKind::PadSum) {
    if (vocab_size != padsum::kVocabSize) throw ConfigError("PadSum vocabulary has 14 tokens");
    if (horizon < 2) throw ConfigError("PadSum horizon must be >= 2");
  } else {
    if (vocab_size < 2 || vocab_size > 3) throw ConfigError("TinySeq vocab_size must be 2 or 3");
    if (horizon < 1 || horizon > 3) throw ConfigError("TinySeq horizon must be in [1, 3]");
  }
  for (std::size_t i = 0; i < questions.size(); ++i) {
    const auto& q = questions[i];
    if (q.id != static_cast<int>(i)) throw ConfigError("question ids must be 0..n-1");
    if (q.gold_answer < 0 || q.gold_answer >= eos()) {
      throw ConfigError("gold answer must be a non-EOS vocabulary token");
    }
    if (kind == EnvKind::PadSum) {
      if (q.operands.size() != 2) throw ConfigError("PadSum questions carry two operands");
      if (q.gold_answer != padsum::digit((q.operands[0] + q.operands[1]) % 10)) {
        throw ConfigError("PadSum gold answer must be (a+b) mod 10");
      }
    }
  }
}

EnvSpec make_padsum(int num_questions, int horizon, std::uint64_t question_seed) {
  if (num_questions < 1) throw ConfigError("num_questions must be >= 1");
  EnvSpec env;
  env.kind = EnvKind::PadSum;
  env.vocab_size = padsum::kVocabSize;
  env.horizon = horizon;
  env.question_seed = question_seed;
  Rng rng = Rng::substream(question_seed, kEnvStream, 0);
  for (int i = 0; i < num_questions; ++i) {
    const int a = static_cast<int>(rng.next_u64() % 10);
    const int b = static_cast<int>(rng.next_u64() % 10);
    env.questions.push_back({i, {a, b}, padsum::digit((a + b) % 10)});
  }
  env.validate();
  return env;
}

EnvSpec make_tinyseq(int vocab_size, int horizon, std::vector<Token> targets) {
  EnvSpec env;
  env.kind = EnvKind::TinySeq;
  env.vocab_size = vocab_size;
  env.horizon = horizon;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    env.questions.push_back({static_cast<int>(i), {}, targets[i]});
  }
  env.validate();
  return env;
}

std::optional<Token> extract_answer(std::span<const Token> tokens, const EnvSpec& env) {
  if (env.kind == EnvKind::TinySeq) {
    if (tokens.empty() || tokens.front() == env.eos()) return std::nullopt;
    return tokens.front();
  }
  bool seen_ans = false;
  for (Token t : tokens) {
    if (!seen_ans) {
      seen_ans = t == padsum::kAns;
    } else if (padsum::is_digit(t)) {
      return t;
    }
  }
  return std::nullopt;
}

int verify(const Question& question, std::span<const Token> tokens, const EnvSpec& env) {
  const auto answer = extract_answer(tokens, env);
  return answer && *answer == question.gold_answer ? 1 : 0;
}

namespace {

void extend(std::vector<Token>& prefix, int vocab_size, int horizon,
            std::vector<std::vector<Token>>& out) {
  const Token eos = vocab_size - 1;
  for (Token t = 0; t < vocab_size; ++t) {
    prefix.push_back(t);
    if (t == eos || static_cast<int>(prefix.size()) == horizon) {
      out.push_back(prefix);
    } else {
      extend(prefix, vocab_size, horizon, out);
    }
    prefix.pop_back();
  }
}

}  // namespace

std::vector<std::vector<Token>> enumerate_trajectories(int vocab_size, int horizon,
                                                       std::size_t cap) {
  if (vocab_size < 1 || horizon < 1) throw std::domain_error("empty vocabulary or horizon");
  if (std::pow(static_cast<double>(vocab_size), horizon) > static_cast<double>(cap)) {
    throw std::domain_error("enumeration refused: " + std::to_string(vocab_size) + "^" +
                            std::to_string(horizon) + " exceeds cap " + std::to_string(cap));
  }
  std::vector<std::vector<Token>> out;
  std::vector<Token> prefix;
  extend(prefix, vocab_size, horizon, out);
  return out;
}

std::vector<std::vector<Token>> enumerate_trajectories(const EnvSpec& env, std::size_t cap) {
  return enumerate_trajectories(env.vocab_size, env.horizon, cap);
}

}  // namespace fgo
