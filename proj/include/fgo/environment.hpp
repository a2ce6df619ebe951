#ifndef FGO_ENVIRONMENT_HPP_
#define FGO_ENVIRONMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fgo/policy.hpp"

namespace fgo {

enum class EnvKind { PadSum, TinySeq };

std::string to_string(EnvKind kind);
EnvKind env_kind_from_string(const std::string& name);

struct Question {
  int id = 0;
  std::vector<int> operands;  // (a, b) for PadSum, empty for TinySeq
  Token gold_answer = 0;
};

// PadSum layout: digit tokens D0..D9 are 0..9, then THINK, MARK, ANS, EOS.
namespace padsum {
inline constexpr Token kThink = 10;
inline constexpr Token kMark = 11;
inline constexpr Token kAns = 12;
inline constexpr Token kEos = 13;
inline constexpr int kVocabSize = 14;
inline constexpr Token digit(int d) { return d; }
inline constexpr bool is_digit(Token t) { return t >= 0 && t <= 9; }
}  // namespace padsum

struct EnvSpec {
  EnvKind kind = EnvKind::PadSum;
  int vocab_size = padsum::kVocabSize;
  int horizon = 16;
  std::vector<Question> questions;
  // Construction parameters, kept so the environment can be serialized back.
  std::uint64_t question_seed = 0;

  Token eos() const { return vocab_size - 1; }
  int num_questions() const { return static_cast<int>(questions.size()); }
  // Throws ConfigError on a malformed environment.
  void validate() const;
};

// `num_questions` operand pairs drawn from [0, 9]^2 with `question_seed`.
EnvSpec make_padsum(int num_questions = 8, int horizon = 16,
                    std::uint64_t question_seed = 7);

// Plain tokens 0..vocab_size-2 plus EOS; question q is correct iff its first
// token equals targets[q].
EnvSpec make_tinyseq(int vocab_size, int horizon, std::vector<Token> targets);

// PadSum: first digit strictly after the first ANS. TinySeq: the first token
// unless it is EOS.
std::optional<Token> extract_answer(std::span<const Token> tokens, const EnvSpec& env);

// Verified reward in {0, 1}.
int verify(const Question& question, std::span<const Token> tokens, const EnvSpec& env);
inline int verify(const Question& question, const Trajectory& trajectory,
                  const EnvSpec& env) {
  return verify(question, trajectory.tokens, env);
}

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

// Every token sequence that ends at its first EOS or runs to the horizon
// without one, for a vocabulary whose last token is EOS. Refuses (domain
// error) when vocab_size^horizon exceeds `cap`.
std::vector<std::vector<Token>> enumerate_trajectories(
    int vocab_size, int horizon, std::size_t cap = kDefaultEnumerationCap);
std::vector<std::vector<Token>> enumerate_trajectories(
    const EnvSpec& env, std::size_t cap = kDefaultEnumerationCap);

}  // namespace fgo

#endif  // FGO_ENVIRONMENT_HPP_
