#ifndef FGO_POLICY_HPP_
#define FGO_POLICY_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fgo/rng.hpp"

namespace fgo {

using Token = std::int32_t;

// Tabular autoregressive softmax policy.
//
// One row of `vocab_size` logits per context (question, position, previous
// token). The previous token at position 0 is the distinguished BOS index
// `vocab_size`, so each (question, position) owns vocab_size + 1 rows. The
// last vocabulary entry is EOS.
struct PolicyParams {
  int vocab_size = 0;
  int horizon = 0;
  int num_questions = 0;
  std::vector<double> logits;

  Token eos() const { return vocab_size - 1; }
  Token bos() const { return vocab_size; }

  std::size_t num_rows() const {
    return static_cast<std::size_t>(num_questions) * horizon * (vocab_size + 1);
  }
  // Throws std::domain_error when the context is out of range.
  std::size_t row_index(int question, int position, Token prev) const;

  std::span<const double> row(std::size_t r) const {
    return {logits.data() + r * vocab_size, static_cast<std::size_t>(vocab_size)};
  }
  std::span<double> row(std::size_t r) {
    return {logits.data() + r * vocab_size, static_cast<std::size_t>(vocab_size)};
  }

  bool same_shape(const PolicyParams& other) const {
    return vocab_size == other.vocab_size && horizon == other.horizon &&
           num_questions == other.num_questions;
  }

  // Unrolls the context keys visited by a token sequence.
  std::size_t context_row(int question, std::span<const Token> tokens,
                          std::size_t t) const {
    return row_index(question, static_cast<int>(t), t == 0 ? bos() : tokens[t - 1]);
  }
};

// One sampled response. `length()` counts the terminal EOS when emitted.
struct Trajectory {
  int question_id = 0;
  std::vector<Token> tokens;
  std::vector<double> step_logprobs;
  std::vector<double> step_entropies;

  std::size_t length() const { return tokens.size(); }
};

// All logits zero. `seed` is accepted for interface stability; zero
// initialization consumes no randomness.
PolicyParams init_policy(int vocab_size, int horizon, int num_questions,
                         std::uint64_t seed = 0);

// Max-subtracted softmax into `out` (same size as `logits`).
void softmax(std::span<const double> logits, std::span<double> out);
double log_sum_exp(std::span<const double> logits);
// Shannon entropy (nats) of a probability vector; 0·log 0 = 0.
double entropy(std::span<const double> probs);

std::vector<double> action_distribution(const PolicyParams& params, int question_id,
                                        int position, Token prev_token);

Trajectory sample_trajectory(const PolicyParams& params, int question_id, Rng& rng);

struct RowGradient {
  std::size_t row = 0;
  std::vector<double> values;
};

// Gradient of the total log-probability with respect to the logits, stored
// sparsely: one entry per visited context (contexts along a trajectory are
// distinct because the position is part of the key).
struct LogProbGrad {
  double logprob = 0.0;
  std::vector<RowGradient> rows;
};

LogProbGrad logprob_and_grad(const PolicyParams& params, const Trajectory& trajectory);

// Log-probability of token t of the trajectory under `params`.
double token_logprob(const PolicyParams& params, const Trajectory& trajectory,
                     std::size_t t);

// Checks that the trajectory fits the parameter shapes; throws
// std::domain_error otherwise.
void check_trajectory(const PolicyParams& params, const Trajectory& trajectory);

}  // namespace fgo

#endif  // FGO_POLICY_HPP_
