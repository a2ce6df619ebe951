#ifndef FGO_TESTS_INSTANCES_HPP_
#define FGO_TESTS_INSTANCES_HPP_

// Random tiny surrogate-objective instances shared by the gradient tests and
// the acceptance suite.

#include <cmath>
#include <random>
#include <vector>

#include "fgo/objective.hpp"
#include "fgo/trainer.hpp"
#include "oracles.hpp"

namespace testing_support {

struct SurrogateInstance {
  fgo::PolicyParams params_old;
  fgo::PolicyParams params_new;
  fgo::PolicyParams reference;
  std::vector<fgo::GroupSample> groups;
  std::vector<fgo::GroupAdvantages> advantages;
  fgo::ObjectiveConfig cfg;
};

inline fgo::PolicyParams random_params(int v, int t, int q, std::mt19937_64& gen, double scale) {
  auto p = fgo::init_policy(v, t, q);
  std::normal_distribution<double> n(0.0, scale);
  for (auto& l : p.logits) l = n(gen);
  return p;
}

// Smallest distance from any token ratio to a clip boundary.
inline double clip_margin(const SurrogateInstance& inst) {
  double margin = 1e9;
  for (const auto& g : inst.groups) {
    for (const auto& t : g.trajectories) {
      for (std::size_t k = 0; k < t.length(); ++k) {
        const double rho = fgo::token_ratio(inst.params_new, inst.params_old, t, k);
        margin = std::min({margin, std::abs(rho - (1 - inst.cfg.clip_eps)),
                           std::abs(rho - (1 + inst.cfg.clip_eps))});
      }
    }
  }
  return margin;
}

// V <= 4, T <= 4, G <= 4. With inner_epochs > 1 the evaluation point is
// reached by inner_epochs - 1 ascent steps from the sampling policy, so
// clipping is exercised. Instances with a ratio within 1e-3 of a clip
// boundary (where the objective has a kink) are redrawn.
inline SurrogateInstance make_instance(std::uint64_t seed, fgo::Algorithm algorithm,
                                       double kl_coeff, int inner_epochs) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    std::mt19937_64 gen(seed * 7919 + attempt * 104729 + 1);
    const int v = 2 + static_cast<int>(gen() % 3);
    const int t = 1 + static_cast<int>(gen() % 4);
    const int g = 1 + static_cast<int>(gen() % 4);
    const int b = 1 + static_cast<int>(gen() % 2);
    SurrogateInstance inst;
    inst.params_old = random_params(v, t, b, gen, 1.0);
    inst.reference = random_params(v, t, b, gen, 1.0);
    inst.cfg = {0.2, kl_coeff, kl_coeff > 0.0};

    fgo::TrainConfig tc;
    tc.algorithm = algorithm;
    tc.alpha = 0.5;
    tc.beta = 1.0;
    fgo::Rng rng(gen());
    for (int q = 0; q < b; ++q) {
      fgo::GroupSample gs;
      gs.question_id = q;
      for (int i = 0; i < g; ++i) {
        gs.trajectories.push_back(fgo::sample_trajectory(inst.params_old, q, rng));
        gs.rewards.push_back(static_cast<int>(gen() % 2));
      }
      inst.advantages.push_back(fgo::compute_advantages(gs, tc).advantages);
      inst.groups.push_back(std::move(gs));
    }

    inst.params_new = inst.params_old;
    for (int e = 1; e < inner_epochs; ++e) {
      const auto grad = fgo::surrogate_gradient(inst.groups, inst.advantages, inst.params_new,
                                                inst.params_old, inst.cfg, &inst.reference);
      for (std::size_t k = 0; k < grad.size(); ++k) inst.params_new.logits[k] += 3.0 * grad[k];
    }
    if (clip_margin(inst) > 1e-3) return inst;
  }
}

inline double gradient_check_error(const SurrogateInstance& inst) {
  const auto analytic = fgo::surrogate_gradient(inst.groups, inst.advantages, inst.params_new,
                                                inst.params_old, inst.cfg, &inst.reference);
  auto f = [&](const std::vector<double>& x) {
    fgo::PolicyParams p = inst.params_new;
    p.logits = x;
    return fgo::clipped_surrogate(inst.groups, inst.advantages, p, inst.params_old, inst.cfg,
                                  &inst.reference);
  };
  const auto fd = oracle::central_differences(f, inst.params_new.logits, 1e-5);
  return oracle::max_relative_error(analytic, fd);
}

}  // namespace testing_support

#endif  // FGO_TESTS_INSTANCES_HPP_
