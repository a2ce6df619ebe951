#ifndef FGO_SHAPING_HPP_
#define FGO_SHAPING_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "fgo/policy.hpp"

namespace fgo {

inline constexpr double kDefaultEntropyFloor = 1e-8;

struct ShapingConfig {
  double alpha = 0.01;  // length exponent
  double beta = 1.0;    // entropy exponent
  double entropy_floor = kDefaultEntropyFloor;
  // Divide each trajectory entropy by its length before weighting.
  bool per_token_entropy = false;
};

struct Subgroups {
  std::vector<std::size_t> correct;
  std::vector<std::size_t> incorrect;
};

// Fine-grained shaping of one group. Empty subgroups contribute nothing.
struct ShapedGroup {
  std::vector<std::size_t> correct_indices;
  std::vector<std::size_t> incorrect_indices;
  std::vector<double> weights_pos;  // aligned with correct_indices
  std::vector<double> weights_neg;  // aligned with incorrect_indices
  std::vector<double> shaped_rewards;  // original group order
  std::vector<double> lengths;
  std::vector<double> entropies;
};

// Throws std::domain_error on a reward outside {0, 1} or an empty group.
Subgroups split_subgroups(std::span<const int> verified_rewards);

// Sum of per-step conditional entropies along the sampled prefix.
double trajectory_entropy(const Trajectory& trajectory);

// Softmax over (mean(L)/l)^alpha * (mean(H)/h)^beta. Shorter and
// lower-entropy correct responses get larger weight.
std::vector<double> correct_weights(std::span<const double> lengths,
                                    std::span<const double> entropies, double alpha,
                                    double beta,
                                    double entropy_floor = kDefaultEntropyFloor);

// Softmax over (l/mean(L))^alpha * (mean(H)/h)^beta. Longer and lower-entropy
// incorrect responses get larger weight, hence a larger penalty.
std::vector<double> incorrect_weights(std::span<const double> lengths,
                                      std::span<const double> entropies, double alpha,
                                      double beta,
                                      double entropy_floor = kDefaultEntropyFloor);

// w+ * 1 for correct members, w- * (-1) for incorrect ones, in group order.
std::vector<double> shaped_rewards(std::span<const int> verified_rewards,
                                   std::span<const double> weights_pos,
                                   std::span<const double> weights_neg);

ShapedGroup shape_group(std::span<const Trajectory> trajectories,
                        std::span<const int> verified_rewards, const ShapingConfig& cfg);

}  // namespace fgo

#endif  // FGO_SHAPING_HPP_
