#include "fgo/advantage.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fgo {

namespace {

double mean_of(std::span<const double> r) {
  return std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
}

AdvantageResult degenerate_result(std::size_t n) {
  return {std::vector<double>(n, 0.0), true};
}

}  // namespace

AdvantageResult grpo_advantage(std::span<const double> rewards) {
  if (rewards.empty()) throw std::domain_error("empty group");
  const double mean = mean_of(rewards);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std = std::sqrt(var / static_cast<double>(rewards.size()));
  if (std < kDegenerateStd) return degenerate_result(rewards.size());
  AdvantageResult out;
  out.advantages.reserve(rewards.size());
  for (double r : rewards) out.advantages.push_back((r - mean) / std);
  return out;
}

AdvantageResult fgo_advantage(std::span<const double> rewards) {
  if (rewards.empty()) throw std::domain_error("empty group");
  const bool tied = std::all_of(rewards.begin(), rewards.end(),
                                [&](double r) { return r == rewards.front(); });
  if (tied) return degenerate_result(rewards.size());
  const double mean = mean_of(rewards);
  AdvantageResult out;
  out.advantages.reserve(rewards.size());
  for (double r : rewards) out.advantages.push_back(r - mean);
  return out;
}

}  // namespace fgo
