#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "musyn/game/cost.hpp"
#include "musyn/game/lspi.hpp"
#include "musyn/lti/plant.hpp"
#include "musyn/sim/simulator.hpp"
#include "musyn/util/rng.hpp"

namespace musyn::game {

struct GameSamplingConfig {
  int rollouts = 20;
  int horizon = 200;
  double noise_std = 0.1;  // exploration on the acting channel
};

/// Model-free view of the scaled game. Wraps the black-box simulator with
/// the known (gamma, D): adversary actions are the scaled disturbance
/// h = (w~, d), fed to the raw plant as w = D^-1 w~, and stage costs are
/// read off the observed signals, e'e + v'D^2 v - gamma^2 h' diag(D^2,I) h.
/// No plant matrix ever crosses this layer.
class GameEnv {
 public:
  GameEnv(sim::Simulator& sim, lti::DScaling D, double gamma)
      : sim_(sim), D_(std::move(D)), gamma_(gamma) {
    const auto dims = sim_.dims();
    n_ = dims.n;
    mu_ = dims.mu;
    mw_ = dims.mw;
    md_ = dims.md;
    if (D_.dim() != mw_) throw DimensionError("GameEnv: dim(d) != mw");
    if (!(gamma_ > 0.0)) throw Error("GameEnv: gamma must be positive");
  }

  Eigen::Index state_dim() const { return n_; }
  Eigen::Index mu() const { return mu_; }
  Eigen::Index mh() const { return mw_ + md_; }
  double gamma() const { return gamma_; }
  const lti::DScaling& scaling() const { return D_; }
  sim::Simulator& simulator() { return sim_; }

  /// Off-policy transition samples for one player: behavior is
  /// u = -K x (+ noise if acting), h = -L x (+ noise if acting), with the
  /// exploration noise on the acting channel only. Rollout seeds are sharded
  /// deterministically from `seed`, so results are independent of scheduling.
  GameDataset sample(Player acting, const lti::Gain& K, const lti::Gain& L,
                     const GameSamplingConfig& cfg, std::uint64_t seed) {
    if (K.inputs() != mu_ || K.states() != n_) throw DimensionError("GameEnv: K must be mu x n");
    if (L.inputs() != mh() || L.states() != n_)
      throw DimensionError("GameEnv: L must be (mw+md) x n");

    const Eigen::Index ma = acting == Player::protagonist ? mu_ : mh();
    const Eigen::Index total = static_cast<Eigen::Index>(cfg.rollouts) * cfg.horizon;
    GameDataset data;
    data.x.resize(n_, total);
    data.a.resize(ma, total);
    data.x_next.resize(n_, total);
    data.cost.resize(total);

    const Eigen::VectorXd dinv = D_.inverse_diagonal();
    Eigen::Index col = 0;
    for (int r = 0; r < cfg.rollouts; ++r) {
      Rng rng(shard_seed(seed, static_cast<std::uint64_t>(r)));
      sim_.reset(rng.gaussian_vector(n_));  // x0 ~ N(0, I)
      for (int k = 0; k < cfg.horizon; ++k, ++col) {
        const Eigen::VectorXd x = sim_.state();
        Eigen::VectorXd u = -K.K * x;
        Eigen::VectorXd h = -L.K * x;
        if (acting == Player::protagonist)
          u += cfg.noise_std * rng.gaussian_vector(mu_);
        else
          h += cfg.noise_std * rng.gaussian_vector(mh());

        const Eigen::VectorXd w_raw = dinv.cwiseProduct(h.head(mw_));
        auto out = sim_.step(u, w_raw, h.tail(md_));
        const double c = stage_cost_signals(gamma_, D_, out.v, out.e, h);

        data.x.col(col) = x;
        data.a.col(col) = acting == Player::protagonist ? u : h;
        data.x_next.col(col) = sim_.state();
        data.cost[col] = acting == Player::adversary ? -c : c;
      }
    }
    return data;
  }

 private:
  sim::Simulator& sim_;
  lti::DScaling D_;
  double gamma_;
  Eigen::Index n_, mu_, mw_, md_;
};

}  // namespace musyn::game
