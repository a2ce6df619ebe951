#ifndef FGO_OBJECTIVE_HPP_
#define FGO_OBJECTIVE_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "fgo/policy.hpp"

namespace fgo {

struct ObjectiveConfig {
  double clip_eps = 0.2;
  double kl_coeff = 0.0;
  bool use_reference = false;

  // KL to the reference is active only when both are set.
  bool kl_active() const { return use_reference && kl_coeff > 0.0; }
  void validate() const;  // throws ConfigError
};

// G responses to one question with their verified rewards.
struct GroupSample {
  int question_id = 0;
  std::vector<Trajectory> trajectories;
  std::vector<int> rewards;
};

// Per-group advantages, one entry per trajectory.
using GroupAdvantages = std::vector<double>;

// pi_new(o_t) / pi_old(o_t), evaluated in log space.
double token_ratio(const PolicyParams& params_new, const PolicyParams& params_old,
                   const Trajectory& trajectory, std::size_t t);

// Exact KL(pi(.|row) || pi_ref(.|row)) at one context row.
double kl_to_reference(const PolicyParams& params, const PolicyParams& ref_params,
                       std::size_t row);

// Clipped surrogate averaged over the batch:
//   mean_b (1/G) sum_i (1/|o_i|) sum_t [min(rho A, clip(rho) A) - kl_coeff KL_t]
// `ref_params` is required when cfg.kl_active().
//
// The OpenMP kernels split work by group and reduce partial results in group
// order, so they agree bit-for-bit with the serial:: references regardless
// of the thread count.
double clipped_surrogate(std::span<const GroupSample> groups,
                         std::span<const GroupAdvantages> advantages,
                         const PolicyParams& params_new, const PolicyParams& params_old,
                         const ObjectiveConfig& cfg,
                         const PolicyParams* ref_params = nullptr);

// Exact gradient of clipped_surrogate with respect to params_new.logits.
// The policy term is dropped for tokens whose clipped branch is strictly
// smaller; ties take the unclipped branch.
std::vector<double> surrogate_gradient(std::span<const GroupSample> groups,
                                       std::span<const GroupAdvantages> advantages,
                                       const PolicyParams& params_new,
                                       const PolicyParams& params_old,
                                       const ObjectiveConfig& cfg,
                                       const PolicyParams* ref_params = nullptr);

namespace serial {

double clipped_surrogate(std::span<const GroupSample> groups,
                         std::span<const GroupAdvantages> advantages,
                         const PolicyParams& params_new, const PolicyParams& params_old,
                         const ObjectiveConfig& cfg,
                         const PolicyParams* ref_params = nullptr);

std::vector<double> surrogate_gradient(std::span<const GroupSample> groups,
                                       std::span<const GroupAdvantages> advantages,
                                       const PolicyParams& params_new,
                                       const PolicyParams& params_old,
                                       const ObjectiveConfig& cfg,
                                       const PolicyParams* ref_params = nullptr);

}  // namespace serial

}  // namespace fgo

#endif  // FGO_OBJECTIVE_HPP_
