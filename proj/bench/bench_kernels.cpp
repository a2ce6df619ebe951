// Serial reference vs OpenMP kernels on PadSum-sized batches.
// Arg: batch_questions (groups per step); group size fixed at 8.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "fgo/advantage.hpp"
#include "fgo/environment.hpp"
#include "fgo/objective.hpp"
#include "fgo/trainer.hpp"

using namespace fgo;

namespace {

constexpr int kGroupSize = 8;

PolicyParams noisy_policy(const EnvSpec& env) {
  auto p = init_policy(env.vocab_size, env.horizon, env.num_questions());
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (auto& x : p.logits) x = n(gen);
  return p;
}

struct Batch {
  EnvSpec env = make_padsum();
  PolicyParams params = noisy_policy(env);
  PolicyParams ref = init_policy(env.vocab_size, env.horizon, env.num_questions());
  std::vector<GroupSample> groups;
  std::vector<GroupAdvantages> adv;

  explicit Batch(int b) {
    groups = serial::sample_groups(params, env, 0, b, kGroupSize, 1);
    TrainConfig cfg;
    for (const auto& g : groups) adv.push_back(compute_advantages(g, cfg).advantages);
  }
};

void BM_SampleSerial(benchmark::State& st) {
  Batch b(1);
  for (auto _ : st) {
    benchmark::DoNotOptimize(serial::sample_groups(b.params, b.env, 0, st.range(0), kGroupSize, 1));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * kGroupSize);
}

void BM_SampleParallel(benchmark::State& st) {
  Batch b(1);
  for (auto _ : st) {
    benchmark::DoNotOptimize(sample_groups(b.params, b.env, 0, st.range(0), kGroupSize, 1));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * kGroupSize);
  st.counters["threads"] = omp_get_max_threads();
}

void BM_GradientSerial(benchmark::State& st) {
  Batch b(st.range(0));
  const ObjectiveConfig cfg{0.2, 0.1, true};
  for (auto _ : st) {
    benchmark::DoNotOptimize(
        serial::surrogate_gradient(b.groups, b.adv, b.params, b.params, cfg, &b.ref));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * kGroupSize);
}

void BM_GradientParallel(benchmark::State& st) {
  Batch b(st.range(0));
  const ObjectiveConfig cfg{0.2, 0.1, true};
  for (auto _ : st) {
    benchmark::DoNotOptimize(surrogate_gradient(b.groups, b.adv, b.params, b.params, cfg, &b.ref));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0) * kGroupSize);
  st.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(BM_SampleSerial)->Arg(8)->Arg(64)->Arg(512);
BENCHMARK(BM_SampleParallel)->Arg(8)->Arg(64)->Arg(512);
BENCHMARK(BM_GradientSerial)->Arg(8)->Arg(64)->Arg(512);
BENCHMARK(BM_GradientParallel)->Arg(8)->Arg(64)->Arg(512);

BENCHMARK_MAIN();
