#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>

#include "musyn/sim/lti_map.hpp"
#include "musyn/util/rng.hpp"

namespace musyn::hinf {

struct PowerIterConfig {
  Eigen::Index n_win = 100;  // finite window length
  int max_iters = 200;
  double tol = 1e-6;  // relative change of successive estimates
  std::uint64_t seed = 0x5eed5eedull;
  int restarts = 1;  // fresh-seed retries on non-convergence

  void validate() const {
    if (n_win < 1) throw Error("PowerIterConfig: n_win must be >= 1");
    if (!(tol > 0.0)) throw Error("PowerIterConfig: tol must be positive");
    if (max_iters < 1) throw Error("PowerIterConfig: max_iters must be >= 1");
  }
};

struct HinfEstimate {
  double value = 0.0;  // estimate of the largest singular value of G_N
  int iterations = 0;
  bool converged = false;
  Eigen::Index n_win = 0;
};

namespace detail {

inline HinfEstimate power_iterate_once(const sim::LtiMapSim& g, const PowerIterConfig& cfg,
                                       std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd u = rng.gaussian_matrix(g.input_dim(), cfg.n_win);
  double norm_u = u.norm();
  if (norm_u == 0.0) u.setOnes(), norm_u = u.norm();
  u /= norm_u;

  HinfEstimate est;
  est.n_win = cfg.n_win;
  double prev = -1.0;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const Eigen::MatrixXd y = g.forward(u);
    const double sigma = y.norm();  // ||G u|| with ||u|| = 1
    est.value = sigma;
    est.iterations = it;
    if (sigma == 0.0) {
      // u is annihilated; for a zero map this is the answer
      est.converged = true;
      return est;
    }
    if (prev >= 0.0 && std::abs(sigma - prev) <= cfg.tol * sigma) {
      est.converged = true;
      return est;
    }
    prev = sigma;
    const Eigen::MatrixXd z = g.adjoint(y);  // G^T G u, up to the sigma factor
    const double norm_z = z.norm();
    if (norm_z == 0.0) {
      est.converged = true;
      return est;
    }
    u = z / norm_z;
  }
  return est;
}

}  // namespace detail

/// Model-free estimate of the largest singular value of the window-N
/// truncation of a stable LTI map, by power iteration on G_N^T G_N. Each
/// iteration is one forward rollout and one time-reversed adjoint pass. The
/// returned value is a lower bound on sigma_max(G_N), hence on the
/// H-infinity norm; it converges upward as iterations proceed.
///
/// Unstable interconnections surface as DivergedError from the rollout.
inline HinfEstimate hinf_oracle(const sim::LtiMapSim& g, const PowerIterConfig& cfg) {
  cfg.validate();
  HinfEstimate est = detail::power_iterate_once(g, cfg, cfg.seed);
  for (int r = 1; !est.converged && r <= cfg.restarts; ++r) {
    HinfEstimate retry = detail::power_iterate_once(g, cfg, splitmix64(cfg.seed + r));
    retry.iterations += est.iterations;
    if (retry.converged || retry.value > est.value) est = retry;
  }
  return est;
}

}  // namespace musyn::hinf
