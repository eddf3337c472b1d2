#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>

#include "musyn/hinf/exact_norm.hpp"
#include "musyn/hinf/power_iteration.hpp"
#include "musyn/lti/plant.hpp"
#include "musyn/sim/simulator.hpp"

namespace musyn::dk {

/// H(d): the scaled closed-loop norm as a function of the log-parameters.
using HFunction = std::function<double(const Eigen::VectorXd&)>;

/// Model-free evaluation: power-iteration estimate on the opaque scaled
/// closed loop the simulator hands out.
inline HFunction make_model_free_H(sim::Simulator& sim, lti::Gain K,
                                   hinf::PowerIterConfig cfg) {
  return [&sim, K = std::move(K), cfg](const Eigen::VectorXd& d) {
    const auto map = sim.scaled_closed_loop(K, lti::DScaling(d));
    return hinf::hinf_oracle(map, cfg).value;
  };
}

/// Verification mode: the exact bisection norm on the materialized loop.
inline HFunction make_exact_H(lti::PartitionedPlant G, lti::Gain K) {
  return [G = std::move(G), K = std::move(K)](const Eigen::VectorXd& d) {
    return hinf::hinf_exact(lti::scaled_closed_loop(G, K, lti::DScaling(d)));
  };
}

inline double eval_H(const Eigen::VectorXd& d, const lti::Gain& K, sim::Simulator& sim,
                     Eigen::Index n_win) {
  hinf::PowerIterConfig cfg;
  cfg.n_win = n_win;
  return make_model_free_H(sim, K, cfg)(d);
}

/// Central-difference gradient g_j = (H(d + eps e_j) - H(d - eps e_j)) / 2 eps.
/// A failing evaluation aborts with the offending coordinate in the message.
inline Eigen::VectorXd central_diff_grad(const HFunction& H, const Eigen::VectorXd& d,
                                         double eps) {
  if (!(eps > 0.0)) throw Error("central_diff_grad: eps must be positive");
  Eigen::VectorXd g(d.size());
  Eigen::VectorXd probe = d;
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    double plus = 0.0, minus = 0.0;
    try {
      probe[j] = d[j] + eps;
      plus = H(probe);
      probe[j] = d[j] - eps;
      minus = H(probe);
      probe[j] = d[j];
    } catch (const Error& ex) {
      throw Error("central_diff_grad: evaluation failed at coordinate " + std::to_string(j) +
                  ": " + ex.what());
    }
    g[j] = (plus - minus) / (2.0 * eps);
  }
  return g;
}

}  // namespace musyn::dk
