#include "fgo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fgo/errors.hpp"

namespace fgo {

std::size_t PolicyParams::row_index(int question, int position, Token prev) const {
  if (question < 0 || question >= num_questions) {
    throw std::domain_error("question id " + std::to_string(question) + " out of range");
  }
  if (position < 0 || position >= horizon) {
    throw std::domain_error("position " + std::to_string(position) +
                            " outside horizon " + std::to_string(horizon));
  }
  if (prev < 0 || prev > vocab_size) {
    throw std::domain_error("previous token " + std::to_string(prev) + " out of range");
  }
  return (static_cast<std::size_t>(question) * horizon + position) * (vocab_size + 1) +
         prev;
}

PolicyParams init_policy(int vocab_size, int horizon, int num_questions,
                         std::uint64_t /*seed*/) {
  if (vocab_size < 2) throw ConfigError("vocab_size must be >= 2 (EOS plus one token)");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (num_questions < 1) throw ConfigError("num_questions must be >= 1");
  PolicyParams p;
  p.vocab_size = vocab_size;
  p.horizon = horizon;
  p.num_questions = num_questions;
  p.logits.assign(p.num_rows() * vocab_size, 0.0);
  return p;
}

void softmax(std::span<const double> logits, std::span<double> out) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp(logits[k] - mx);
    z += out[k];
  }
  for (auto& v : out) v /= z;
}

double log_sum_exp(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  return mx + std::log(z);
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

std::vector<double> action_distribution(const PolicyParams& params, int question_id,
                                        int position, Token prev_token) {
  const auto r = params.row_index(question_id, position, prev_token);
  std::vector<double> probs(params.vocab_size);
  softmax(params.row(r), probs);
  return probs;
}

Trajectory sample_trajectory(const PolicyParams& params, int question_id, Rng& rng) {
  Trajectory traj;
  traj.question_id = question_id;
  std::vector<double> probs(params.vocab_size);
  Token prev = params.bos();
  for (int pos = 0; pos < params.horizon; ++pos) {
    const auto row = params.row(params.row_index(question_id, pos, prev));
    softmax(row, probs);

    // Inverse CDF; the fallback guards against u landing past a cumulative
    // sum that rounded below 1.
    const double u = rng.uniform();
    double cum = 0.0;
    Token tok = -1;
    for (int k = 0; k < params.vocab_size; ++k) {
      cum += probs[k];
      if (u < cum) {
        tok = k;
        break;
      }
    }
    if (tok < 0) {
      for (int k = params.vocab_size - 1; k >= 0; --k) {
        if (probs[k] > 0.0) {
          tok = k;
          break;
        }
      }
    }

    traj.tokens.push_back(tok);
    traj.step_logprobs.push_back(row[tok] - log_sum_exp(row));
    traj.step_entropies.push_back(entropy(probs));
    if (tok == params.eos()) break;
    prev = tok;
  }
  return traj;
}

void check_trajectory(const PolicyParams& params, const Trajectory& trajectory) {
  const auto n = trajectory.tokens.size();
  if (n == 0 || n > static_cast<std::size_t>(params.horizon)) {
    throw std::domain_error("trajectory length " + std::to_string(n) +
                            " incompatible with horizon " + std::to_string(params.horizon));
  }
  for (std::size_t t = 0; t < n; ++t) {
    const Token tok = trajectory.tokens[t];
    if (tok < 0 || tok >= params.vocab_size) {
      throw std::domain_error("token " + std::to_string(tok) + " outside vocabulary");
    }
    if (tok == params.eos() && t + 1 != n) {
      throw std::domain_error("tokens after EOS");
    }
  }
  if (trajectory.question_id < 0 || trajectory.question_id >= params.num_questions) {
    throw std::domain_error("question id out of range");
  }
}

double token_logprob(const PolicyParams& params, const Trajectory& trajectory,
                     std::size_t t) {
  const auto row = params.row(params.context_row(trajectory.question_id, trajectory.tokens, t));
  return row[trajectory.tokens[t]] - log_sum_exp(row);
}

LogProbGrad logprob_and_grad(const PolicyParams& params, const Trajectory& trajectory) {
  check_trajectory(params, trajectory);
  LogProbGrad out;
  out.rows.reserve(trajectory.length());
  for (std::size_t t = 0; t < trajectory.length(); ++t) {
    const auto r = params.context_row(trajectory.question_id, trajectory.tokens, t);
    const auto row = params.row(r);
    RowGradient g{r, std::vector<double>(params.vocab_size)};
    softmax(row, g.values);
    const Token tok = trajectory.tokens[t];
    out.logprob += row[tok] - log_sum_exp(row);
    // d log softmax_tok / d z = onehot(tok) - p
    for (auto& v : g.values) v = -v;
    g.values[tok] += 1.0;
    out.rows.push_back(std::move(g));
  }
  return out;
}

}  // namespace fgo
