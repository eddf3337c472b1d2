#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "musyn/dk/eval.hpp"
#include "musyn/dk/trace.hpp"
#include "musyn/game/rarl.hpp"
#include "musyn/hinf/power_iteration.hpp"
#include "musyn/lti/plant.hpp"
#include "musyn/sim/simulator.hpp"
#include "musyn/util/rng.hpp"

namespace musyn::dk {

struct DminConfig {
  int t_iters = 10;
  double alpha = 0.2;  // gradient step size
  double eps = 0.05;   // central-difference perturbation
  hinf::PowerIterConfig hinf;
  // relative slack before the step-halving guard trips; zero enforces strict
  // descent (exact-evaluation mode), a small positive value absorbs
  // estimator noise in model-free mode
  double noise_floor = 0.0;
  int max_halvings = 5;

  void validate() const {
    if (!(alpha > 0.0) || !(eps > 0.0)) throw Error("DminConfig: alpha, eps must be positive");
    if (t_iters < 0) throw Error("DminConfig: t_iters must be nonnegative");
  }
};

struct KminConfig {
  int t_iters = 30;
  hinf::PowerIterConfig hinf;
  std::vector<double> delta_schedule{1e-1, 5e-3};  // level padding per iteration
  double theta = 0.0;                              // interpolation factor in [0, 1)
  double stall_rel = 1e-3;  // stop once gamma decreases by less than this fraction

  double delta_for(int tau) const {
    if (delta_schedule.empty()) throw Error("KminConfig: empty delta schedule");
    const auto i = std::min<std::size_t>(tau, delta_schedule.size() - 1);
    return delta_schedule[i];
  }

  void validate() const {
    for (double d : delta_schedule)
      if (!(d > 0.0)) throw Error("KminConfig: deltas must be positive");
    if (theta < 0.0 || theta >= 1.0) throw Error("KminConfig: theta must be in [0, 1)");
    if (t_iters < 0) throw Error("KminConfig: t_iters must be nonnegative");
  }
};

struct DminResult {
  lti::DScaling D;
  std::vector<double> h_values;  // H before the run, then after each iteration
};

/// Finite-difference descent on the log-parameterized scaling for a fixed
/// controller: d <- d - alpha g(d, eps). Steps that raise H beyond the
/// noise floor are halved and, failing that, skipped; with exact
/// evaluations the recorded H sequence is therefore nonincreasing.
inline DminResult approx_dmin(const HFunction& H, const Eigen::VectorXd& d0,
                              const DminConfig& cfg) {
  cfg.validate();
  Eigen::VectorXd d = d0;
  double h_cur = H(d);
  DminResult res;
  res.h_values.push_back(h_cur);
  for (int t = 0; t < cfg.t_iters; ++t) {
    const Eigen::VectorXd g = central_diff_grad(H, d, cfg.eps);
    double step = cfg.alpha;
    for (int halving = 0; halving <= cfg.max_halvings; ++halving, step *= 0.5) {
      const Eigen::VectorXd cand = d - step * g;
      if (!cand.allFinite()) continue;
      const double h_new = H(cand);
      if (h_new <= h_cur * (1.0 + 2.0 * cfg.noise_floor)) {
        d = cand;
        h_cur = h_new;
        break;
      }
    }
    res.h_values.push_back(h_cur);
  }
  res.D = lti::DScaling(d);
  return res;
}

/// Model-free spec entry point (power-iteration evaluations).
inline DminResult approx_dmin(const lti::Gain& K, const Eigen::VectorXd& d0,
                              const DminConfig& cfg, sim::Simulator& sim) {
  return approx_dmin(make_model_free_H(sim, K, cfg.hinf), d0, cfg);
}

struct KminResult {
  lti::Gain K;
  std::vector<double> gammas;  // estimator values, one per iteration
  int k_updates = 0;
  bool aborted = false;
  std::string abort_reason;
};

/// Central-path style H-infinity synthesis for a fixed scaling: estimate the
/// current level, pad it by delta_tau, recenter through the adversarial
/// solver, and repeat until the level stalls. On an infeasible level the
/// padding is doubled once before the step aborts with the last good gain.
inline KminResult approx_kmin(const lti::Gain& K0, const lti::DScaling& D,
                              const KminConfig& cfg, const game::RarlConfig& rarl_cfg,
                              sim::Simulator& sim, std::uint64_t seed,
                              TraceRecorder* recorder = nullptr) {
  cfg.validate();
  KminResult res;
  res.K = K0;
  double lambda_prev = 0.0;
  double gamma_prev = 0.0;
  for (int tau = 0; tau < cfg.t_iters; ++tau) {
    auto pi_cfg = cfg.hinf;
    pi_cfg.seed = shard_seed(seed, 1000 + tau);
    const auto est = hinf::hinf_oracle(sim.scaled_closed_loop(res.K, D), pi_cfg);
    const double gamma = est.value;
    res.gammas.push_back(gamma);
    // the first recentering uses the enlarged padding delta_0 and may bump
    // gamma up; the stall rule only applies once the schedule has settled
    if (tau >= 2 && gamma_prev - gamma < cfg.stall_rel * gamma_prev) break;

    const double lambda = tau == 0 ? gamma : (1.0 - cfg.theta) * gamma + cfg.theta * lambda_prev;
    if (recorder) recorder->begin_k_segment(gamma, res.K, D);
    auto cb = [&](const lti::Gain& K_new) {
      ++res.k_updates;
      if (recorder) recorder->on_k_update(K_new, D);
    };

    game::RarlResult rarl;
    try {
      rarl = game::rarl_solve(lambda + cfg.delta_for(tau), res.K, D, sim, rarl_cfg,
                              shard_seed(seed, tau), cb);
    } catch (const GammaInfeasibleError&) {
      try {
        rarl = game::rarl_solve(lambda + 2.0 * cfg.delta_for(tau), res.K, D, sim, rarl_cfg,
                                shard_seed(seed, 500 + tau), cb);
      } catch (const GammaInfeasibleError& ex2) {
        res.aborted = true;
        res.abort_reason = std::string("K-step aborted after doubled padding: ") + ex2.what();
        return res;
      }
    }
    res.K = rarl.K;
    gamma_prev = gamma;
    lambda_prev = lambda;
  }
  return res;
}

struct DkResult {
  lti::Gain K;
  lti::DScaling D;
  SynthesisTrace trace;
  bool completed = false;
  std::string abort_reason;
};

/// Model-free DK-iteration: alternating Approx-Kmin and Approx-Dmin from
/// D = I, with every protagonist update recorded. An aborted K-step stops
/// the run and hands back the partial trace.
inline DkResult dk_iterate(const lti::Gain& K_init, int n_rounds, const KminConfig& kcfg,
                           const DminConfig& dcfg, const game::RarlConfig& rarl_cfg,
                           sim::Simulator& sim, std::uint64_t seed,
                           TraceRecorder::ExactHook exact_hook = {}) {
  DkResult out;
  out.K = K_init;
  out.D = lti::DScaling::identity(sim.dims().mw);
  TraceRecorder recorder(std::move(exact_hook));
  for (int round = 0; round < n_rounds; ++round) {
    auto kres =
        approx_kmin(out.K, out.D, kcfg, rarl_cfg, sim, shard_seed(seed, 2 * round), &recorder);
    out.K = kres.K;
    if (kres.aborted) {
      out.trace = recorder.take();
      out.abort_reason = kres.abort_reason;
      return out;
    }
    auto dres = approx_dmin(make_model_free_H(sim, out.K, dcfg.hinf), out.D.log_params(), dcfg);
    out.D = dres.D;
    recorder.on_d_step(dres.h_values.back(), out.K, out.D);
  }
  out.trace = recorder.take();
  out.completed = true;
  return out;
}

}  // namespace musyn::dk
