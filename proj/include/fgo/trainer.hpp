#ifndef FGO_TRAINER_HPP_
#define FGO_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fgo/environment.hpp"
#include "fgo/objective.hpp"
#include "fgo/policy.hpp"
#include "fgo/shaping.hpp"

namespace fgo {

enum class Algorithm { FGO, GRPO, DrGRPO };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);  // throws ConfigError

struct TrainConfig {
  Algorithm algorithm = Algorithm::FGO;
  double alpha = 0.01;
  double beta = 1.0;
  double clip_eps = 0.2;
  double kl_coeff = 0.0;
  int group_size = 8;
  int batch_questions = 8;
  double learning_rate = 100.0;
  int outer_steps = 300;
  int inner_epochs = 1;
  std::uint64_t seed = 0;
  EnvSpec env = make_padsum();
  double entropy_floor = kDefaultEntropyFloor;
  bool per_token_entropy = false;
  int eval_samples = 1024;

  void validate() const;  // throws ConfigError

  ShapingConfig shaping() const { return {alpha, beta, entropy_floor, per_token_entropy}; }
  ObjectiveConfig objective() const { return {clip_eps, kl_coeff, kl_coeff > 0.0}; }
};

struct StepRecord {
  int step = 0;
  double mean_reward = 0.0;   // fraction of verified-correct samples
  double accuracy = 0.0;      // the same, as a percentage
  double mean_length = 0.0;
  double mean_entropy = 0.0;  // mean trajectory entropy (sum over steps)
  int invalid_groups_step = 0;
  long long invalid_groups_cum = 0;
};

struct TrainingLog {
  std::vector<StepRecord> steps;
  PolicyParams final_params;
};

// Question for batch slot `slot` at `step`: round-robin over the question list.
int question_for_slot(int step, int slot, int batch_questions, int num_questions);

// Samples one group per batch slot from `params`. The group for (step,
// question, k-th occurrence of that question within the step) always comes
// from the same RNG substream, so batch layout and thread count do not
// change the data.
std::vector<GroupSample> sample_groups(const PolicyParams& params, const EnvSpec& env,
                                       int step, int batch_questions, int group_size,
                                       std::uint64_t seed);

namespace serial {
std::vector<GroupSample> sample_groups(const PolicyParams& params, const EnvSpec& env,
                                       int step, int batch_questions, int group_size,
                                       std::uint64_t seed);
}  // namespace serial

struct GroupAdvantage {
  GroupAdvantages advantages;
  bool degenerate = false;
};

// Advantages for one group under the configured algorithm.
GroupAdvantage compute_advantages(const GroupSample& group, const TrainConfig& cfg);

// Called once per outer step after advantages are computed, before the
// update.
using StepObserver = std::function<void(int step, std::span<const GroupSample> groups,
                                        std::span<const GroupAdvantages> advantages)>;

TrainingLog run_training(const TrainConfig& config, const StepObserver& observer = {});

struct EvalResult {
  double accuracy = 0.0;  // fraction in [0, 1]
  double mean_length = 0.0;
  double mean_entropy = 0.0;
};

// n_samples trajectories, question i mod num_questions for sample i, each
// from its own substream of `seed`.
std::vector<Trajectory> sample_for_eval(const PolicyParams& params, const EnvSpec& env,
                                        int n_samples, std::uint64_t seed);
EvalResult summarize(std::span<const Trajectory> samples, const EnvSpec& env);
EvalResult evaluate(const PolicyParams& params, const EnvSpec& env, int n_samples,
                    std::uint64_t seed);

}  // namespace fgo

#endif  // FGO_TRAINER_HPP_
