#include "fgo/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fgo/errors.hpp"

namespace fgo {

void ObjectiveConfig::validate() const {
  if (!(clip_eps > 0.0 && clip_eps < 1.0)) throw ConfigError("clip_eps must be in (0, 1)");
  if (!(kl_coeff >= 0.0)) throw ConfigError("kl_coeff must be >= 0");
}

double token_ratio(const PolicyParams& params_new, const PolicyParams& params_old,
                   const Trajectory& trajectory, std::size_t t) {
  return std::exp(token_logprob(params_new, trajectory, t) -
                  token_logprob(params_old, trajectory, t));
}

double kl_to_reference(const PolicyParams& params, const PolicyParams& ref_params,
                       std::size_t row) {
  const auto z = params.row(row);
  const auto zr = ref_params.row(row);
  const double lse = log_sum_exp(z);
  const double lse_ref = log_sum_exp(zr);
  double kl = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double lp = z[k] - lse;
    kl += std::exp(lp) * (lp - (zr[k] - lse_ref));
  }
  return std::max(kl, 0.0);
}

namespace {

void check_inputs(std::span<const GroupSample> groups,
                  std::span<const GroupAdvantages> advantages, const PolicyParams& params_new,
                  const PolicyParams& params_old, const ObjectiveConfig& cfg,
                  const PolicyParams* ref_params) {
  if (groups.empty()) throw std::domain_error("empty batch");
  if (groups.size() != advantages.size()) {
    throw std::domain_error("one advantage vector per group required");
  }
  if (!params_new.same_shape(params_old)) throw std::domain_error("policy shapes differ");
  if (cfg.kl_active() && (ref_params == nullptr || !ref_params->same_shape(params_new))) {
    throw std::domain_error("KL term needs a reference policy of matching shape");
  }
  for (std::size_t b = 0; b < groups.size(); ++b) {
    if (groups[b].trajectories.empty()) throw std::domain_error("empty group");
    if (groups[b].trajectories.size() != advantages[b].size()) {
      throw std::domain_error("advantages misaligned with group members");
    }
  }
}

// Contribution of one group, (1/G) sum_i (1/|o_i|) sum_t [...]. When `grad`
// is non-empty the gradient of the same quantity is accumulated into it.
double group_term(const GroupSample& group, const GroupAdvantages& adv,
                  const PolicyParams& params_new, const PolicyParams& params_old,
                  const ObjectiveConfig& cfg, const PolicyParams* ref, std::span<double> grad) {
  const double inv_g = 1.0 / static_cast<double>(group.trajectories.size());
  const double lo = 1.0 - cfg.clip_eps;
  const double hi = 1.0 + cfg.clip_eps;
  const bool with_grad = !grad.empty();
  const std::size_t v = static_cast<std::size_t>(params_new.vocab_size);
  std::vector<double> p(v);
  double value = 0.0;

  for (std::size_t i = 0; i < group.trajectories.size(); ++i) {
    const Trajectory& traj = group.trajectories[i];
    const double a = adv[i];
    const double scale = inv_g / static_cast<double>(traj.length());
    double traj_sum = 0.0;
    for (std::size_t t = 0; t < traj.length(); ++t) {
      const std::size_t r = params_new.context_row(traj.question_id, traj.tokens, t);
      const auto z = params_new.row(r);
      const double lse = log_sum_exp(z);
      const Token tok = traj.tokens[t];
      const double lp_new = z[tok] - lse;
      const double lp_old = params_old.row(r)[tok] - log_sum_exp(params_old.row(r));
      const double rho = std::exp(lp_new - lp_old);
      const double unclipped = rho * a;
      const double clipped = std::clamp(rho, lo, hi) * a;
      const bool clip_active = clipped < unclipped;
      double term = std::min(unclipped, clipped);

      double kl = 0.0;
      if (cfg.kl_active()) {
        kl = kl_to_reference(params_new, *ref, r);
        term -= cfg.kl_coeff * kl;
      }
      traj_sum += term;

      if (!with_grad) continue;
      const bool policy_term = !clip_active && a != 0.0;
      if (!policy_term && !cfg.kl_active()) continue;
      for (std::size_t k = 0; k < v; ++k) p[k] = std::exp(z[k] - lse);
      double* g = grad.data() + r * v;
      if (policy_term) {
        const double c = scale * unclipped;
        for (std::size_t k = 0; k < v; ++k) g[k] -= c * p[k];
        g[tok] += c;
      }
      if (cfg.kl_active()) {
        // d KL / d z_k = p_k (log p_k - log q_k - KL)
        const auto zr = ref->row(r);
        const double lse_ref = log_sum_exp(zr);
        const double c = scale * cfg.kl_coeff;
        for (std::size_t k = 0; k < v; ++k) {
          const double dk = p[k] * ((z[k] - lse) - (zr[k] - lse_ref) - kl);
          g[k] -= c * dk;
        }
      }
    }
    value += traj_sum / static_cast<double>(traj.length());
  }
  return value * inv_g;
}

double reduce_values(const std::vector<double>& per_group) {
  double total = 0.0;
  for (double v : per_group) total += v;
  return total / static_cast<double>(per_group.size());
}

}  // namespace

double clipped_surrogate(std::span<const GroupSample> groups,
                         std::span<const GroupAdvantages> advantages,
                         const PolicyParams& params_new, const PolicyParams& params_old,
                         const ObjectiveConfig& cfg, const PolicyParams* ref_params) {
  check_inputs(groups, advantages, params_new, params_old, cfg, ref_params);
  const auto n = static_cast<std::ptrdiff_t>(groups.size());
  std::vector<double> per_group(groups.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < n; ++b) {
    per_group[b] =
        group_term(groups[b], advantages[b], params_new, params_old, cfg, ref_params, {});
  }
  return reduce_values(per_group);
}

std::vector<double> surrogate_gradient(std::span<const GroupSample> groups,
                                       std::span<const GroupAdvantages> advantages,
                                       const PolicyParams& params_new,
                                       const PolicyParams& params_old,
                                       const ObjectiveConfig& cfg,
                                       const PolicyParams* ref_params) {
  check_inputs(groups, advantages, params_new, params_old, cfg, ref_params);
  const std::size_t dim = params_new.logits.size();
  const auto n = static_cast<std::ptrdiff_t>(groups.size());
  std::vector<std::vector<double>> partial(groups.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < n; ++b) {
    partial[b].assign(dim, 0.0);
    group_term(groups[b], advantages[b], params_new, params_old, cfg, ref_params, partial[b]);
  }
  std::vector<double> grad(dim, 0.0);
  const double inv_b = 1.0 / static_cast<double>(groups.size());
  const auto d = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < d; ++k) {
    double s = 0.0;
    for (const auto& part : partial) s += part[k];
    grad[k] = s * inv_b;
  }
  return grad;
}

namespace serial {

double clipped_surrogate(std::span<const GroupSample> groups,
                         std::span<const GroupAdvantages> advantages,
                         const PolicyParams& params_new, const PolicyParams& params_old,
                         const ObjectiveConfig& cfg, const PolicyParams* ref_params) {
  check_inputs(groups, advantages, params_new, params_old, cfg, ref_params);
  std::vector<double> per_group(groups.size());
  for (std::size_t b = 0; b < groups.size(); ++b) {
    per_group[b] =
        group_term(groups[b], advantages[b], params_new, params_old, cfg, ref_params, {});
  }
  return reduce_values(per_group);
}

std::vector<double> surrogate_gradient(std::span<const GroupSample> groups,
                                       std::span<const GroupAdvantages> advantages,
                                       const PolicyParams& params_new,
                                       const PolicyParams& params_old,
                                       const ObjectiveConfig& cfg,
                                       const PolicyParams* ref_params) {
  check_inputs(groups, advantages, params_new, params_old, cfg, ref_params);
  const std::size_t dim = params_new.logits.size();
  std::vector<std::vector<double>> partial(groups.size());
  for (std::size_t b = 0; b < groups.size(); ++b) {
    partial[b].assign(dim, 0.0);
    group_term(groups[b], advantages[b], params_new, params_old, cfg, ref_params, partial[b]);
  }
  std::vector<double> grad(dim, 0.0);
  const double inv_b = 1.0 / static_cast<double>(groups.size());
  for (std::size_t k = 0; k < dim; ++k) {
    double s = 0.0;
    for (const auto& part : partial) s += part[k];
    grad[k] = s * inv_b;
  }
  return grad;
}

}  // namespace serial

}  // namespace fgo
