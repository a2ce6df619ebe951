#include <stdexcept>
#include <algorithm>
#include <cmath>
#include <omp.h>

#include "doctest.h"
#include "fgo/errors.hpp"
#include "fgo/objective.hpp"
#include "instances.hpp"

using namespace fgo;
using testing_support::make_instance;

namespace {

// Two-token vocabulary, horizon 1: one row whose probabilities we control.
PolicyParams one_row(double p0) {
  auto p = init_policy(2, 1, 1);
  auto r = p.row(p.row_index(0, 0, p.bos()));
  r[0] = std::log(p0);
  r[1] = std::log(1 - p0);
  return p;
}

GroupSample single(Token tok) {
  GroupSample g;
  g.trajectories.push_back(Trajectory{0, {tok}, {}, {}});
  g.rewards.push_back(1);
  return g;
}

}  // namespace

TEST_CASE("token_ratio") {
  const auto a = one_row(0.5);
  const Trajectory t{0, {0}, {}, {}};
  CHECK(token_ratio(a, a, t, 0) == 1.0);
  CHECK(token_ratio(one_row(0.5), one_row(0.25), t, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(token_ratio(one_row(0.1), one_row(0.4), t, 0) == doctest::Approx(0.25).epsilon(1e-14));
  auto big = init_policy(2, 1, 1);
  big.row(0)[0] = 700;
  auto small = init_policy(2, 1, 1);
  small.row(0)[0] = -700;
  CHECK(std::isfinite(token_ratio(small, big, Trajectory{0, {1}, {}, {}}, 0)));
}

TEST_CASE("kl_to_reference") {
  const auto u = init_policy(3, 2, 1);
  CHECK(kl_to_reference(u, u, 0) == 0.0);
  const auto r = one_row(0.6);
  CHECK(kl_to_reference(r, r, 2) == doctest::Approx(0.0).epsilon(1e-15));
  const double expected = 0.75 * std::log(1.5) + 0.25 * std::log(0.5);
  CHECK(kl_to_reference(one_row(0.75), one_row(0.5), 2) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(0.1308).epsilon(1e-3));
}

TEST_CASE("clipped_surrogate examples") {
  const ObjectiveConfig cfg{0.2, 0.0, false};
  SUBCASE("rho = 1 gives the mean advantage") {
    const auto p = one_row(0.3);
    std::vector<GroupSample> groups{single(0), single(1)};
    groups[0].trajectories.push_back(Trajectory{0, {1}, {}, {}});
    std::vector<GroupAdvantages> adv{{0.5, -1.5}, {2.0}};
    const double expected = ((0.5 - 1.5) / 2 + 2.0) / 2;
    CHECK(clipped_surrogate(groups, adv, p, p, cfg) == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("positive advantage clipped at 1 + eps") {
    std::vector<GroupSample> groups{single(0)};
    std::vector<GroupAdvantages> adv{{1.0}};
    CHECK(clipped_surrogate(groups, adv, one_row(0.5), one_row(0.25), cfg) ==
          doctest::Approx(1.2).epsilon(1e-14));
    // Clipped branch is active: no policy gradient.
    const auto g = surrogate_gradient(groups, adv, one_row(0.5), one_row(0.25), cfg);
    for (double v : g) CHECK(v == 0.0);
  }
  SUBCASE("negative advantage takes the pessimistic branch") {
    std::vector<GroupSample> groups{single(0)};
    std::vector<GroupAdvantages> adv{{-1.0}};
    CHECK(clipped_surrogate(groups, adv, one_row(0.25), one_row(0.5), cfg) ==
          doctest::Approx(-0.8).epsilon(1e-14));
  }
  SUBCASE("errors") {
    const auto p = one_row(0.5);
    CHECK_THROWS_AS(clipped_surrogate({}, {}, p, p, cfg), std::domain_error);
    std::vector<GroupSample> groups{single(0)};
    std::vector<GroupAdvantages> bad{{1.0, 2.0}};
    CHECK_THROWS_AS(clipped_surrogate(groups, bad, p, p, cfg), std::domain_error);
    const ObjectiveConfig kl{0.2, 0.1, true};
    std::vector<GroupAdvantages> adv{{1.0}};
    CHECK_THROWS_AS(clipped_surrogate(groups, adv, p, p, kl, nullptr), std::domain_error);
    CHECK_THROWS_AS((ObjectiveConfig{1.0, 0.0, false}.validate()), ConfigError);
    CHECK_THROWS_AS((ObjectiveConfig{0.2, -1.0, false}.validate()), ConfigError);
  }
}

TEST_CASE("surrogate_gradient examples") {
  const ObjectiveConfig cfg{0.2, 0.0, false};
  SUBCASE("zero advantages give zero gradient") {
    const auto inst = make_instance(3, Algorithm::GRPO, 0.0, 3);
    std::vector<GroupAdvantages> zero;
    for (const auto& a : inst.advantages) zero.emplace_back(a.size(), 0.0);
    const auto g = surrogate_gradient(inst.groups, zero, inst.params_new, inst.params_old, cfg);
    for (double v : g) CHECK(v == 0.0);
  }
  SUBCASE("rho = 1, single token, A = 1 is grad log pi") {
    const auto p = one_row(0.3);
    std::vector<GroupSample> groups{single(0)};
    std::vector<GroupAdvantages> adv{{1.0}};
    const auto g = surrogate_gradient(groups, adv, p, p, cfg);
    CHECK(g[4] == doctest::Approx(0.7));
    CHECK(g[5] == doctest::Approx(-0.7));
  }
}

TEST_CASE("gradient matches central differences") {
  for (auto alg : {Algorithm::FGO, Algorithm::GRPO, Algorithm::DrGRPO}) {
    for (double gamma : {0.0, 0.1}) {
      for (int epochs : {1, 3}) {
        for (std::uint64_t s = 0; s < 8; ++s) {
          const auto inst = make_instance(s, alg, gamma, epochs);
          CHECK(testing_support::gradient_check_error(inst) <= 1e-4);
        }
      }
    }
  }
}

TEST_CASE("rho = 1 gives the advantage-weighted log-likelihood value") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto inst = make_instance(s, Algorithm::FGO, 0.0, 1);
    double expected = 0.0;
    for (std::size_t b = 0; b < inst.groups.size(); ++b) {
      double gsum = 0.0;
      for (std::size_t i = 0; i < inst.groups[b].trajectories.size(); ++i) {
        gsum += inst.advantages[b][i];  // (1/|o|) sum_t A
      }
      expected += gsum / inst.groups[b].trajectories.size();
    }
    expected /= inst.groups.size();
    CHECK(clipped_surrogate(inst.groups, inst.advantages, inst.params_old, inst.params_old,
                            inst.cfg) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("objective is invariant to response order within a group") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto inst = make_instance(s, Algorithm::GRPO, 0.1, 3);
    const double v0 = clipped_surrogate(inst.groups, inst.advantages, inst.params_new,
                                        inst.params_old, inst.cfg, &inst.reference);
    for (std::size_t b = 0; b < inst.groups.size(); ++b) {
      std::reverse(inst.groups[b].trajectories.begin(), inst.groups[b].trajectories.end());
      std::reverse(inst.advantages[b].begin(), inst.advantages[b].end());
    }
    const double v1 = clipped_surrogate(inst.groups, inst.advantages, inst.params_new,
                                        inst.params_old, inst.cfg, &inst.reference);
    CHECK(v1 == doctest::Approx(v0).epsilon(1e-13));
  }
}

TEST_CASE("KL term vanishes when the policy equals the reference") {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = make_instance(s, Algorithm::DrGRPO, 0.0, 1);
    const ObjectiveConfig with_kl{0.2, 0.5, true};
    const double a = clipped_surrogate(inst.groups, inst.advantages, inst.params_old,
                                       inst.params_old, inst.cfg);
    const double b = clipped_surrogate(inst.groups, inst.advantages, inst.params_old,
                                       inst.params_old, with_kl, &inst.params_old);
    CHECK(a == b);
  }
}

TEST_CASE("parallel kernels agree bit-for-bit with the serial references") {
  const int saved = omp_get_max_threads();
  for (int threads : {1, 3, 4}) {
    omp_set_num_threads(threads);
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto inst = make_instance(s, Algorithm::FGO, 0.1, 3);
      CHECK(clipped_surrogate(inst.groups, inst.advantages, inst.params_new, inst.params_old,
                              inst.cfg, &inst.reference) ==
            serial::clipped_surrogate(inst.groups, inst.advantages, inst.params_new,
                                      inst.params_old, inst.cfg, &inst.reference));
      CHECK(surrogate_gradient(inst.groups, inst.advantages, inst.params_new, inst.params_old,
                               inst.cfg, &inst.reference) ==
            serial::surrogate_gradient(inst.groups, inst.advantages, inst.params_new,
                                       inst.params_old, inst.cfg, &inst.reference));
    }
  }
  omp_set_num_threads(saved);
}
