#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "musyn/game/game_env.hpp"
#include "musyn/game/lspi.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::game {

struct RarlConfig {
  double inner_tol = 1e-6;  // adversary gain change, max norm
  double outer_tol = 1e-5;  // protagonist gain change, max norm
  int max_inner = 200;
  int max_outer = 600;
  GameSamplingConfig sampling;
  double ridge = 1e-8;
  // Gauss-Newton damping of the outer update: K <- K + outer_step (K+ - K).
  // The full improvement step (1.0) can leave the admissible set when the
  // level is tight; 0.5 is the stability-certified choice.
  double outer_step = 0.5;
  int max_pullbacks = 4;  // step halvings when an update lands outside the set
};

/// Worst-case adversary for a fixed protagonist: iterated LSTDQ fits and
/// greedy improvements on one off-policy dataset (sampled once; LSPI is
/// off-policy, so every policy evaluation reuses it). Starts from L_warm.
inline lti::Gain inner_loop_maximize(GameEnv& env, const lti::Gain& K, const RarlConfig& cfg,
                                     std::uint64_t seed,
                                     const lti::Gain* L_warm = nullptr) {
  lti::Gain L = L_warm ? *L_warm : lti::Gain::zero(env.mh(), env.state_dim());
  const GameDataset data = env.sample(Player::adversary, K, L, cfg.sampling, seed);
  for (int i = 0; i < cfg.max_inner; ++i) {
    const QFunctionParams qf = lstdq_fit(data, L.K, cfg.ridge);
    const lti::Gain L_new = policy_improve(qf);
    const double change = (L_new.K - L.K).cwiseAbs().maxCoeff();
    L = L_new;
    if (change < cfg.inner_tol) return L;
  }
  // a maximization that will not settle within the budget is the data-side
  // face of an (almost) unbounded inner problem: the level is too tight
  throw GammaInfeasibleError("inner_loop_maximize: no convergence within max_inner");
}

/// Spec-level overload: the cost carries (gamma, D) through Rv; the scaling
/// must match the one the caller wrapped the game with.
inline lti::Gain inner_loop_maximize(sim::Simulator& sim, const lti::Gain& K,
                                     const GameCost& cost, const lti::DScaling& D,
                                     const RarlConfig& cfg, std::uint64_t seed) {
  GameEnv env(sim, D, cost.gamma);
  return inner_loop_maximize(env, K, cfg, seed);
}

struct RarlResult {
  lti::Gain K;
  lti::Gain L_adv;
  int k_updates = 0;
  bool converged = false;
};

using KUpdateCallback = std::function<void(const lti::Gain&)>;

/// Double-loop adversarial solver for the minimum-entropy center of the
/// gamma-admissible set: alternates the inner maximization (adversary to
/// convergence) with one-step LSPI updates of the protagonist, resampling
/// data for every outer step. Infeasibility of the level surfaces as
/// GammaInfeasibleError from the improvement steps; an unstable behavior
/// loop surfaces as DivergedError from the rollouts.
inline RarlResult rarl_solve(double gamma, const lti::Gain& K_init, const lti::DScaling& D,
                             sim::Simulator& sim, const RarlConfig& cfg, std::uint64_t seed,
                             const KUpdateCallback& on_k_update = {}) {
  GameEnv env(sim, D, gamma);
  RarlResult res;
  res.K = K_init;
  res.L_adv = lti::Gain::zero(env.mh(), env.state_dim());
  lti::Gain K_prev = res.K;
  int pullbacks = 0;
  for (int n = 0; n < cfg.max_outer; ++n) {
    try {
      res.L_adv = inner_loop_maximize(env, res.K, cfg, shard_seed(seed, 2 * n),
                                      n == 0 ? nullptr : &res.L_adv);
    } catch (const GammaInfeasibleError&) {
      // the last update stepped outside the admissible set: pull it back
      if (n == 0 || ++pullbacks > cfg.max_pullbacks) throw;
      res.K = lti::Gain(0.5 * (res.K.K + K_prev.K));
      --n;
      continue;
    }

    const GameDataset data =
        env.sample(Player::protagonist, res.K, res.L_adv, cfg.sampling, shard_seed(seed, 2 * n + 1));
    const QFunctionParams qf = lstdq_fit(data, res.K.K, cfg.ridge);
    const lti::Gain K_improved = policy_improve(qf);

    K_prev = res.K;
    res.K = lti::Gain(res.K.K + cfg.outer_step * (K_improved.K - res.K.K));
    const double change = (res.K.K - K_prev.K).cwiseAbs().maxCoeff();
    ++res.k_updates;
    if (on_k_update) on_k_update(res.K);
    if (change < cfg.outer_tol) {
      res.converged = true;
      return res;
    }
  }
  return res;  // budget exhausted; caller decides how strict to be
}

}  // namespace musyn::game
