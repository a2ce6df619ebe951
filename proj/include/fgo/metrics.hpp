#ifndef FGO_METRICS_HPP_
#define FGO_METRICS_HPP_

#include <span>
#include <vector>

#include "fgo/policy.hpp"
#include "fgo/trainer.hpp"

namespace fgo {

struct EvalReport {
  double accuracy = 0.0;     // percentage, 0-100
  double mean_length = 0.0;  // tokens
  double mean_entropy = 0.0;
  double act = 0.0;          // accuracy per hundred tokens
  double marker_per_hundred = 0.0;
  long long invalid_samples = 0;
  std::vector<double> entropy_series;
  std::vector<double> length_series;
  std::vector<double> reward_series;
};

// Accuracy contribution per hundred tokens: accuracy / (mean_length / 100).
// (0, 0) -> 0; a positive accuracy with mean_length <= 0 is a domain error.
double act(double accuracy, double mean_length);

// 100 * (marker occurrences) / (total tokens).
double marker_frequency(std::span<const Trajectory> trajectories, Token marker_token);

// Cumulative number of groups with degenerate advantages.
long long invalid_sample_count(const TrainingLog& log);

// Combines the per-step series of a log with an evaluation of its final
// policy on `samples`.
EvalReport make_report(const TrainingLog& log, std::span<const Trajectory> samples,
                       const EnvSpec& env);

}  // namespace fgo

#endif  // FGO_METRICS_HPP_
