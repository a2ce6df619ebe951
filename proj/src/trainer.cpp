#include "fgo/trainer.hpp"

#include <cstddef>
#include <stdexcept>

#include "fgo/advantage.hpp"
#include "fgo/errors.hpp"
#include "fgo/rng.hpp"

namespace fgo {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::FGO:
      return "FGO";
    case Algorithm::GRPO:
      return "GRPO";
    case Algorithm::DrGRPO:
      return "DrGRPO";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "FGO") return Algorithm::FGO;
  if (name == "GRPO") return Algorithm::GRPO;
  if (name == "DrGRPO") return Algorithm::DrGRPO;
  throw ConfigError("unknown algorithm '" + name + "' (expected FGO, GRPO or DrGRPO)");
}

void TrainConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(beta >= 0.0)) throw ConfigError("beta must be >= 0");
  objective().validate();
  if (group_size < 1) throw ConfigError("group_size must be >= 1");
  if (batch_questions < 1) throw ConfigError("batch_questions must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (outer_steps < 0) throw ConfigError("outer_steps must be >= 0");
  if (inner_epochs < 1) throw ConfigError("inner_epochs must be >= 1");
  if (!(entropy_floor > 0.0)) throw ConfigError("entropy_floor must be > 0");
  if (eval_samples < 1) throw ConfigError("eval_samples must be >= 1");
  env.validate();
}

int question_for_slot(int step, int slot, int batch_questions, int num_questions) {
  const long long k = static_cast<long long>(step) * batch_questions + slot;
  return static_cast<int>(k % num_questions);
}

namespace {

GroupSample sample_slot(const PolicyParams& params, const EnvSpec& env, int step, int slot,
                        int batch_questions, int group_size, std::uint64_t seed) {
  const int nq = env.num_questions();
  const int q = question_for_slot(step, slot, batch_questions, nq);
  // Occurrences of q at earlier slots of this step.
  int occurrence = 0;
  for (int s = 0; s < slot; ++s) {
    if (question_for_slot(step, s, batch_questions, nq) == q) ++occurrence;
  }
  Rng rng = Rng::substream(seed, kSampleStream,
                           static_cast<std::uint64_t>(step),
                           (static_cast<std::uint64_t>(occurrence) << 32) |
                               static_cast<std::uint64_t>(q));
  GroupSample g;
  g.question_id = q;
  g.trajectories.reserve(group_size);
  g.rewards.reserve(group_size);
  for (int i = 0; i < group_size; ++i) {
    g.trajectories.push_back(sample_trajectory(params, q, rng));
    g.rewards.push_back(verify(env.questions[q], g.trajectories.back(), env));
  }
  return g;
}

}  // namespace

std::vector<GroupSample> sample_groups(const PolicyParams& params, const EnvSpec& env,
                                       int step, int batch_questions, int group_size,
                                       std::uint64_t seed) {
  std::vector<GroupSample> groups(batch_questions);
#pragma omp parallel for schedule(static)
  for (int b = 0; b < batch_questions; ++b) {
    groups[b] = sample_slot(params, env, step, b, batch_questions, group_size, seed);
  }
  return groups;
}

namespace serial {
std::vector<GroupSample> sample_groups(const PolicyParams& params, const EnvSpec& env,
                                       int step, int batch_questions, int group_size,
                                       std::uint64_t seed) {
  std::vector<GroupSample> groups;
  groups.reserve(batch_questions);
  for (int b = 0; b < batch_questions; ++b) {
    groups.push_back(sample_slot(params, env, step, b, batch_questions, group_size, seed));
  }
  return groups;
}
}  // namespace serial

GroupAdvantage compute_advantages(const GroupSample& group, const TrainConfig& cfg) {
  AdvantageResult res;
  if (cfg.algorithm == Algorithm::FGO) {
    const auto shaped = shape_group(group.trajectories, group.rewards, cfg.shaping());
    res = fgo_advantage(shaped.shaped_rewards);
  } else {
    const std::vector<double> raw(group.rewards.begin(), group.rewards.end());
    res = cfg.algorithm == Algorithm::GRPO ? grpo_advantage(raw) : fgo_advantage(raw);
  }
  return {std::move(res.advantages), res.degenerate};
}

TrainingLog run_training(const TrainConfig& config, const StepObserver& observer) {
  config.validate();
  const EnvSpec& env = config.env;
  PolicyParams params =
      init_policy(env.vocab_size, env.horizon, env.num_questions(), config.seed);
  const PolicyParams reference = params;
  const ObjectiveConfig obj = config.objective();

  TrainingLog log;
  log.steps.reserve(config.outer_steps);
  long long invalid_cum = 0;
  for (int step = 0; step < config.outer_steps; ++step) {
    const PolicyParams old = params;
    const auto groups = sample_groups(old, env, step, config.batch_questions,
                                      config.group_size, config.seed);

    const auto nb = static_cast<int>(groups.size());
    std::vector<GroupAdvantages> advantages(nb);
    std::vector<char> degenerate(nb, 0);
#pragma omp parallel for schedule(static)
    for (int b = 0; b < nb; ++b) {
      auto ga = compute_advantages(groups[b], config);
      advantages[b] = std::move(ga.advantages);
      degenerate[b] = ga.degenerate ? 1 : 0;
    }

    if (observer) observer(step, groups, advantages);

    for (int epoch = 0; epoch < config.inner_epochs; ++epoch) {
      const auto grad = surrogate_gradient(groups, advantages, params, old, obj, &reference);
      for (std::size_t k = 0; k < grad.size(); ++k) {
        params.logits[k] += config.learning_rate * grad[k];
      }
    }

    StepRecord rec;
    rec.step = step;
    double n = 0.0, correct = 0.0, len = 0.0, ent = 0.0;
    for (const auto& g : groups) {
      for (std::size_t i = 0; i < g.trajectories.size(); ++i) {
        n += 1.0;
        correct += g.rewards[i];
        len += static_cast<double>(g.trajectories[i].length());
        ent += trajectory_entropy(g.trajectories[i]);
      }
    }
    for (char d : degenerate) rec.invalid_groups_step += d;
    invalid_cum += rec.invalid_groups_step;
    rec.mean_reward = correct / n;
    rec.accuracy = 100.0 * rec.mean_reward;
    rec.mean_length = len / n;
    rec.mean_entropy = ent / n;
    rec.invalid_groups_cum = invalid_cum;
    log.steps.push_back(rec);
  }
  log.final_params = std::move(params);
  return log;
}

std::vector<Trajectory> sample_for_eval(const PolicyParams& params, const EnvSpec& env,
                                        int n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::domain_error("n_samples must be >= 1");
  std::vector<Trajectory> out(n_samples);
  const int nq = env.num_questions();
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n_samples; ++i) {
    Rng rng = Rng::substream(seed, kEvalStream, static_cast<std::uint64_t>(i));
    out[i] = sample_trajectory(params, i % nq, rng);
  }
  return out;
}

EvalResult summarize(std::span<const Trajectory> samples, const EnvSpec& env) {
  EvalResult r;
  if (samples.empty()) return r;
  double correct = 0.0, len = 0.0, ent = 0.0;
  for (const auto& t : samples) {
    correct += verify(env.questions.at(t.question_id), t, env);
    len += static_cast<double>(t.length());
    ent += trajectory_entropy(t);
  }
  const double n = static_cast<double>(samples.size());
  r.accuracy = correct / n;
  r.mean_length = len / n;
  r.mean_entropy = ent / n;
  return r;
}

EvalResult evaluate(const PolicyParams& params, const EnvSpec& env, int n_samples,
                    std::uint64_t seed) {
  const auto samples = sample_for_eval(params, env, n_samples, seed);
  return summarize(samples, env);
}

}  // namespace fgo
