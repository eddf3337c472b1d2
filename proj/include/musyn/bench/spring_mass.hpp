#pragma once

#include <Eigen/Dense>
#include <utility>

#include "musyn/game/riccati.hpp"
#include "musyn/lti/plant.hpp"
#include "musyn/lti/state_space.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::bench {

/// Uncertain coupled spring-mass benchmark: two masses joined by a spring,
/// two control inputs, input-multiplicative uncertainty of relative size
/// alpha on each input channel, disturbances entering through the input
/// channel, and LQ performance weights (Q, R).
struct SpringMassParams {
  double m1 = 1.0;
  double m2 = 0.5;
  double k = 1.0;
  double ts = 0.1;
  double alpha = 0.25;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(4, 4);
  Eigen::MatrixXd R = 0.1 * Eigen::MatrixXd::Identity(2, 2);

  void validate() const {
    if (!(m1 > 0.0 && m2 > 0.0 && k > 0.0 && ts > 0.0 && alpha > 0.0))
      throw Error("SpringMassParams: parameters must be positive");
    if (Q.rows() != 4 || Q.cols() != 4 || R.rows() != 2 || R.cols() != 2)
      throw DimensionError("SpringMassParams: Q must be 4x4 and R 2x2");
  }
};

/// Continuous-time (A, Bu) with state (p1, p2, p1dot, p2dot).
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> spring_mass_continuous(
    const SpringMassParams& p) {
  p.validate();
  Eigen::MatrixXd A(4, 4);
  A << 0, 0, 1, 0,  //
      0, 0, 0, 1,   //
      -p.k / p.m1, p.k / p.m1, 0, 0,  //
      p.k / p.m2, -p.k / p.m2, 0, 0;
  Eigen::MatrixXd B(4, 2);
  B << 0, 0, 0, 0, 1.0 / p.m1, 0, 0, 1.0 / p.m2;
  return {A, B};
}

/// ZOH-discretized uncertain plant. The uncertainty and the disturbance
/// enter through the control channel (Bw = alpha Bu, Bd = Bu); the
/// uncertainty input is tapped at the control signal (Cv = 0, Duv = I), so
/// that ||Delta|| <= 1 models a relative input error of size alpha. The
/// performance output stacks the control effort above the weighted state:
/// e = (R^1/2 u, Q^1/2 x).
inline lti::PartitionedPlant build_spring_mass(const SpringMassParams& p = {}) {
  auto [Ac, Bc] = spring_mass_continuous(p);
  auto [Ad, Bud] = lti::zoh_discretize(Ac, Bc, p.ts);

  Eigen::MatrixXd Ce(6, 4), Due(6, 2);
  Ce << Eigen::MatrixXd::Zero(2, 4), Eigen::MatrixXd(p.Q.llt().matrixU());
  Due << Eigen::MatrixXd(p.R.llt().matrixU()), Eigen::MatrixXd::Zero(4, 2);
  return lti::PartitionedPlant(Ad, p.alpha * Bud, Bud, Bud, Eigen::MatrixXd::Zero(2, 4), Ce,
                               Eigen::MatrixXd::Identity(2, 2), Due);
}

/// Nominal stabilizing controller: the LQR gain for (A, Bu) under the
/// plant's own performance weights, recovered as Ce'Ce and Due'Due. This is
/// harness-side model knowledge; the synthesis path only ever receives the
/// resulting gain.
inline lti::Gain initial_controller(const lti::PartitionedPlant& G) {
  const Eigen::MatrixXd Q = G.Ce.transpose() * G.Ce;
  const Eigen::MatrixXd R = G.Due.transpose() * G.Due;
  const Eigen::MatrixXd N = G.Ce.transpose() * G.Due;
  auto K = game::lqr_gain(G.A, G.Bu, Q, R, N);
  if (!lti::is_stable(G.A - G.Bu * K.K))
    throw Error("initial_controller: LQR gain failed to stabilize");
  return K;
}

}  // namespace musyn::bench
