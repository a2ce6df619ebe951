#ifndef FGO_RNG_HPP_
#define FGO_RNG_HPP_

#include <cstdint>
#include <random>

namespace fgo {

// Deterministic random stream. The engine (mt19937_64) and the bit-to-double
// conversion are both fully specified, so a given seed yields the same
// numbers on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream derived from (seed, tag, a, b), e.g. (seed, kSample,
  // step, question slot).
  static Rng substream(std::uint64_t seed, std::uint64_t tag, std::uint64_t a,
                       std::uint64_t b = 0);

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Stream tags.
inline constexpr std::uint64_t kSampleStream = 0x53414d50;  // "SAMP"
inline constexpr std::uint64_t kEvalStream = 0x4556414c;    // "EVAL"
inline constexpr std::uint64_t kEnvStream = 0x454e5621;

}  // namespace fgo

#endif  // FGO_RNG_HPP_
