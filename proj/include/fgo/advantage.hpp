#ifndef FGO_ADVANTAGE_HPP_
#define FGO_ADVANTAGE_HPP_

#include <span>
#include <vector>

namespace fgo {

// One advantage per group member, broadcast to every token of that member.
struct AdvantageResult {
  std::vector<double> advantages;
  bool degenerate = false;  // every advantage is exactly zero
};

inline constexpr double kDegenerateStd = 1e-12;

// (r - mean) / std with the population std. Degenerate when std < 1e-12.
AdvantageResult grpo_advantage(std::span<const double> rewards);

// r - mean. Used on shaped rewards (FGO) and on raw rewards (Dr.GRPO).
// Degenerate exactly when all rewards are equal.
AdvantageResult fgo_advantage(std::span<const double> rewards);

}  // namespace fgo

#endif  // FGO_ADVANTAGE_HPP_
