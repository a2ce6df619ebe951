#include "fgo/metrics.hpp"

#include <stdexcept>

#include "fgo/environment.hpp"

namespace fgo {

double act(double accuracy, double mean_length) {
  if (mean_length <= 0.0) {
    if (accuracy == 0.0 && mean_length == 0.0) return 0.0;
    throw std::domain_error("ACT needs a positive mean length");
  }
  return accuracy / (mean_length / 100.0);
}

double marker_frequency(std::span<const Trajectory> trajectories, Token marker_token) {
  if (trajectories.empty()) throw std::domain_error("no trajectories");
  long long markers = 0;
  long long tokens = 0;
  for (const auto& t : trajectories) {
    tokens += static_cast<long long>(t.tokens.size());
    for (Token tok : t.tokens) markers += tok == marker_token;
  }
  if (tokens == 0) return 0.0;
  return 100.0 * static_cast<double>(markers) / static_cast<double>(tokens);
}

long long invalid_sample_count(const TrainingLog& log) {
  return log.steps.empty() ? 0 : log.steps.back().invalid_groups_cum;
}

EvalReport make_report(const TrainingLog& log, std::span<const Trajectory> samples,
                       const EnvSpec& env) {
  EvalReport r;
  const auto eval = summarize(samples, env);
  r.accuracy = 100.0 * eval.accuracy;
  r.mean_length = eval.mean_length;
  r.mean_entropy = eval.mean_entropy;
  r.act = act(r.accuracy, r.mean_length);
  if (!samples.empty()) {
    const Token marker = env.kind == EnvKind::PadSum ? padsum::kMark : Token{-1};
    r.marker_per_hundred = marker >= 0 ? marker_frequency(samples, marker) : 0.0;
  }
  r.invalid_samples = invalid_sample_count(log);
  for (const auto& s : log.steps) {
    r.entropy_series.push_back(s.mean_entropy);
    r.length_series.push_back(s.mean_length);
    r.reward_series.push_back(s.mean_reward);
  }
  return r;
}

}  // namespace fgo
