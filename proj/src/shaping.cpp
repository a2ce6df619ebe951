#include "fgo/shaping.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fgo {

namespace {

enum class LengthSense { kShorterWins, kLongerWins };

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::vector<double> subgroup_weights(std::span<const double> lengths,
                                     std::span<const double> entropies, double alpha,
                                     double beta, double entropy_floor, LengthSense sense) {
  if (lengths.empty()) throw std::domain_error("empty subgroup has no weights");
  if (lengths.size() != entropies.size()) {
    throw std::domain_error("lengths and entropies differ in size");
  }
  for (double l : lengths) {
    if (!(l >= 1.0)) throw std::domain_error("response length must be >= 1");
  }
  const std::size_t n = lengths.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = std::max(entropies[i], entropy_floor);
  const double mean_l = mean(lengths);
  const double mean_h = mean(h);

  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double len_ratio =
        sense == LengthSense::kShorterWins ? mean_l / lengths[i] : lengths[i] / mean_l;
    scores[i] = std::pow(len_ratio, alpha) * std::pow(mean_h / h[i], beta);
  }
  std::vector<double> w(n);
  softmax(scores, w);
  return w;
}

}  // namespace

Subgroups split_subgroups(std::span<const int> verified_rewards) {
  if (verified_rewards.empty()) throw std::domain_error("empty group");
  Subgroups out;
  for (std::size_t i = 0; i < verified_rewards.size(); ++i) {
    const int r = verified_rewards[i];
    if (r == 1) {
      out.correct.push_back(i);
    } else if (r == 0) {
      out.incorrect.push_back(i);
    } else {
      throw std::domain_error("verified reward must be 0 or 1, got " + std::to_string(r));
    }
  }
  return out;
}

double trajectory_entropy(const Trajectory& trajectory) {
  return std::accumulate(trajectory.step_entropies.begin(), trajectory.step_entropies.end(),
                         0.0);
}

std::vector<double> correct_weights(std::span<const double> lengths,
                                    std::span<const double> entropies, double alpha,
                                    double beta, double entropy_floor) {
  return subgroup_weights(lengths, entropies, alpha, beta, entropy_floor,
                          LengthSense::kShorterWins);
}

std::vector<double> incorrect_weights(std::span<const double> lengths,
                                      std::span<const double> entropies, double alpha,
                                      double beta, double entropy_floor) {
  return subgroup_weights(lengths, entropies, alpha, beta, entropy_floor,
                          LengthSense::kLongerWins);
}

std::vector<double> shaped_rewards(std::span<const int> verified_rewards,
                                   std::span<const double> weights_pos,
                                   std::span<const double> weights_neg) {
  const auto groups = split_subgroups(verified_rewards);
  if (groups.correct.size() != weights_pos.size() ||
      groups.incorrect.size() != weights_neg.size()) {
    throw std::domain_error("weights do not align with subgroup memberships");
  }
  std::vector<double> out(verified_rewards.size());
  for (std::size_t k = 0; k < groups.correct.size(); ++k) {
    out[groups.correct[k]] = weights_pos[k] * 1.0;
  }
  for (std::size_t k = 0; k < groups.incorrect.size(); ++k) {
    out[groups.incorrect[k]] = weights_neg[k] * -1.0;
  }
  return out;
}

ShapedGroup shape_group(std::span<const Trajectory> trajectories,
                        std::span<const int> verified_rewards, const ShapingConfig& cfg) {
  if (trajectories.size() != verified_rewards.size()) {
    throw std::domain_error("trajectories and rewards differ in size");
  }
  const auto groups = split_subgroups(verified_rewards);
  ShapedGroup out;
  out.correct_indices = groups.correct;
  out.incorrect_indices = groups.incorrect;
  const std::size_t g = trajectories.size();
  out.lengths.resize(g);
  out.entropies.resize(g);
  for (std::size_t i = 0; i < g; ++i) {
    out.lengths[i] = static_cast<double>(trajectories[i].length());
    out.entropies[i] = trajectory_entropy(trajectories[i]);
    if (cfg.per_token_entropy) out.entropies[i] /= out.lengths[i];
  }

  auto gather = [](const std::vector<double>& v, const std::vector<std::size_t>& idx) {
    std::vector<double> r;
    r.reserve(idx.size());
    for (auto i : idx) r.push_back(v[i]);
    return r;
  };
  if (!groups.correct.empty()) {
    out.weights_pos = correct_weights(gather(out.lengths, groups.correct),
                                      gather(out.entropies, groups.correct), cfg.alpha,
                                      cfg.beta, cfg.entropy_floor);
  }
  if (!groups.incorrect.empty()) {
    out.weights_neg = incorrect_weights(gather(out.lengths, groups.incorrect),
                                        gather(out.entropies, groups.incorrect), cfg.alpha,
                                        cfg.beta, cfg.entropy_floor);
  }
  out.shaped_rewards = shaped_rewards(verified_rewards, out.weights_pos, out.weights_neg);
  return out;
}

}  // namespace fgo
