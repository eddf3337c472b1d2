#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "musyn/lti/plant.hpp"
#include "musyn/sim/lti_map.hpp"
#include "musyn/sim/trajectory.hpp"
#include "musyn/util/errors.hpp"
#include "musyn/util/rng.hpp"

namespace musyn::sim {

struct ChannelDims {
  Eigen::Index n, mu, mw, md, mv, me;
};

/// Per-channel exploration noise for policy rollouts: i.i.d. zero-mean
/// Gaussian with the given standard deviations.
struct ExcitationSpec {
  double std_u = 0.0;
  double std_h = 0.0;  // applied to the stacked disturbance h = (w, d)
};

/// The model-free boundary. A Simulator owns the plant realization privately
/// and exposes only trajectory generation; nothing in the public interface
/// returns plant matrices. Synthesis code works exclusively through this
/// class (and the LtiMapSim maps it hands out), so it provably never reads
/// the model.
///
/// One Simulator is single-caller: it owns mutable state and an RNG.
/// Independent instances with independent seeds may run concurrently.
class Simulator {
 public:
  Simulator(lti::PartitionedPlant plant, std::uint64_t seed,
            std::optional<Eigen::MatrixXd> sigma0 = std::nullopt,
            double overflow_guard = 1e12)
      : plant_(std::move(plant)), rng_(seed), guard_(overflow_guard) {
    const Eigen::Index n = plant_.n();
    Eigen::MatrixXd S = sigma0 ? std::move(*sigma0) : Eigen::MatrixXd::Identity(n, n);
    if (S.rows() != n || S.cols() != n)
      throw DimensionError("Simulator: sigma0 must be n x n");
    if (!S.isApprox(S.transpose(), 1e-12))
      throw Error("Simulator: sigma0 must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(S + 1e-14 * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() != Eigen::Success)
      throw Error("Simulator: sigma0 must be positive semidefinite");
    sigma0_chol_ = llt.matrixL();
    x_ = Eigen::VectorXd::Zero(n);
  }

  const ChannelDims dims() const {
    return {plant_.n(), plant_.mu(), plant_.mw(), plant_.md(), plant_.mv(), plant_.me()};
  }

  /// Draws x0 from the initial-state distribution.
  void reset() { x_ = sigma0_chol_ * rng_.gaussian_vector(plant_.n()); }
  void reset(const Eigen::VectorXd& x0) {
    if (x0.size() != plant_.n()) throw DimensionError("Simulator: x0 dimension mismatch");
    x_ = x0;
  }

  const Eigen::VectorXd& state() const { return x_; }

  struct StepOutput {
    Eigen::VectorXd v, e;
  };

  /// Emits (v_k, e_k) at the current state, then advances it.
  StepOutput step(const Eigen::VectorXd& u, const Eigen::VectorXd& w,
                  const Eigen::VectorXd& d) {
    if (u.size() != plant_.mu() || w.size() != plant_.mw() || d.size() != plant_.md())
      throw DimensionError("Simulator: input dimension mismatch");
    StepOutput out;
    out.v = plant_.Cv * x_ + plant_.Duv * u;
    out.e = plant_.Ce * x_ + plant_.Due * u;
    x_ = plant_.A * x_ + plant_.Bw * w + plant_.Bd * d + plant_.Bu * u;
    check_guard();
    return out;
  }

  /// Open-loop rollout under given input sequences. Passing no x0 samples
  /// one from the initial-state distribution.
  Trajectory rollout(const Eigen::MatrixXd& u, const Eigen::MatrixXd& w,
                     const Eigen::MatrixXd& d,
                     std::optional<Eigen::VectorXd> x0 = std::nullopt) {
    const Eigen::Index T = u.cols();
    if (w.cols() != T || d.cols() != T)
      throw DimensionError("Simulator: input sequences must share one horizon");
    if (x0)
      reset(*x0);
    else
      reset();

    Trajectory traj;
    traj.u = u;
    traj.w = w;
    traj.d = d;
    traj.x.resize(plant_.n(), T);
    traj.v.resize(plant_.mv(), T);
    traj.e.resize(plant_.me(), T);
    for (Eigen::Index k = 0; k < T; ++k) {
      traj.x.col(k) = x_;
      auto out = step(u.col(k), w.col(k), d.col(k));
      traj.v.col(k) = out.v;
      traj.e.col(k) = out.e;
    }
    traj.x_final = x_;
    return traj;
  }

  /// Closed-loop rollout u = -K x + noise, h = -L x + noise with
  /// h = (w, d) stacked. The noise source is the simulator's seeded RNG,
  /// so a fixed seed reproduces the trajectory bit for bit.
  Trajectory rollout_with_policies(const lti::Gain& K, const lti::Gain& L_adv,
                                   const ExcitationSpec& excitation, Eigen::Index horizon,
                                   std::optional<Eigen::VectorXd> x0 = std::nullopt) {
    const Eigen::Index n = plant_.n();
    const Eigen::Index mh = plant_.mw() + plant_.md();
    if (K.inputs() != plant_.mu() || K.states() != n)
      throw DimensionError("Simulator: K must be mu x n");
    if (L_adv.inputs() != mh || L_adv.states() != n)
      throw DimensionError("Simulator: L_adv must be (mw+md) x n");
    if (x0)
      reset(*x0);
    else
      reset();

    Trajectory traj;
    traj.u.resize(plant_.mu(), horizon);
    traj.w.resize(plant_.mw(), horizon);
    traj.d.resize(plant_.md(), horizon);
    traj.x.resize(n, horizon);
    traj.v.resize(plant_.mv(), horizon);
    traj.e.resize(plant_.me(), horizon);
    for (Eigen::Index k = 0; k < horizon; ++k) {
      traj.x.col(k) = x_;
      Eigen::VectorXd u = -K.K * x_;
      if (excitation.std_u > 0.0) u += excitation.std_u * rng_.gaussian_vector(u.size());
      Eigen::VectorXd h = -L_adv.K * x_;
      if (excitation.std_h > 0.0) h += excitation.std_h * rng_.gaussian_vector(h.size());
      traj.u.col(k) = u;
      traj.w.col(k) = h.head(plant_.mw());
      traj.d.col(k) = h.tail(plant_.md());
      auto out = step(traj.u.col(k), traj.w.col(k), traj.d.col(k));
      traj.v.col(k) = out.v;
      traj.e.col(k) = out.e;
    }
    traj.x_final = x_;
    return traj;
  }

  /// Hands out the scaled closed loop diag(D,I) F_l(G,K) diag(D^-1,I) as an
  /// opaque forward/adjoint map. The interconnection is assembled behind the
  /// model-free boundary; the caller never sees the matrices.
  LtiMapSim scaled_closed_loop(const lti::Gain& K, const lti::DScaling& D) const {
    return LtiMapSim(lti::scaled_closed_loop(plant_, K, D), guard_);
  }

  /// The unscaled closed loop (w, d) -> (v, e) as an opaque map.
  LtiMapSim closed_loop_map(const lti::Gain& K) const {
    return LtiMapSim(lti::close_loop(plant_, K), guard_);
  }

  /// Deterministically derived seed for spawning independent workers.
  std::uint64_t spawn_seed() { return rng_.raw(); }

 private:
  void check_guard() const {
    if (x_.size() > 0 && (!x_.allFinite() || x_.cwiseAbs().maxCoeff() > guard_))
      throw DivergedError("Simulator: state exceeded overflow guard (diverged)");
  }

  lti::PartitionedPlant plant_;  // hidden realization
  Eigen::VectorXd x_;
  Rng rng_;
  Eigen::MatrixXd sigma0_chol_;
  double guard_;
};

}  // namespace musyn::sim
