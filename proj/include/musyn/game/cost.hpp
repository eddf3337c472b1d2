#pragma once

#include <Eigen/Dense>
#include <utility>

#include "musyn/lti/plant.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::game {

/// Quadratic cost of the zero-sum game behind scaled H-infinity synthesis:
///   J = E sum x'Q x + u'Ru u + 2 x'N u - h'Rv h,
/// where h = (w~, d) stacks the scaled uncertainty input and the
/// disturbance. The protagonist u minimizes, the adversary h maximizes.
struct GameCost {
  Eigen::MatrixXd Q;        // n x n
  Eigen::MatrixXd Ru;       // mu x mu, positive definite
  Eigen::MatrixXd N_cross;  // n x mu
  Eigen::MatrixXd Rv;       // mh x mh, positive definite
  double gamma = 0.0;

  Eigen::Index state_dim() const { return Q.rows(); }
  Eigen::Index mu() const { return Ru.rows(); }
  Eigen::Index mh() const { return Rv.rows(); }

  void validate() const {
    if (Q.rows() != Q.cols() || Ru.rows() != Ru.cols() || Rv.rows() != Rv.cols())
      throw DimensionError("GameCost: Q, Ru, Rv must be square");
    if (N_cross.rows() != Q.rows() || N_cross.cols() != Ru.rows())
      throw DimensionError("GameCost: N must be n x mu");
    if (!Q.isApprox(Q.transpose(), 1e-10) || !Ru.isApprox(Ru.transpose(), 1e-10) ||
        !Rv.isApprox(Rv.transpose(), 1e-10))
      throw Error("GameCost: Q, Ru, Rv must be symmetric");
    if (Eigen::LLT<Eigen::MatrixXd>(Ru).info() != Eigen::Success)
      throw Error("GameCost: Ru must be positive definite");
    if (Eigen::LLT<Eigen::MatrixXd>(Rv).info() != Eigen::Success)
      throw Error("GameCost: Rv must be positive definite");
    if (!(gamma > 0.0)) throw Error("GameCost: gamma must be positive");
  }
};

/// Cost matrices of the scaled game, expressed through the plant's output
/// maps:
///   Q  = Cv' D^2 Cv + Ce' Ce        Ru = Duv' D^2 Duv + Due' Due
///   N  = Cv' D^2 Duv + Ce' Due      Rv = gamma^2 diag(D^2, I)
inline GameCost build_game_cost(const lti::PartitionedPlant& G, const lti::DScaling& D,
                                double gamma) {
  if (D.dim() != G.mw()) throw DimensionError("build_game_cost: dim(d) != mw");
  if (!(gamma > 0.0)) throw Error("build_game_cost: gamma must be positive");

  const Eigen::VectorXd d2 = D.diagonal().array().square().matrix();
  const Eigen::MatrixXd CvD2 = d2.asDiagonal() * G.Cv;

  GameCost c;
  c.gamma = gamma;
  c.Q = G.Cv.transpose() * CvD2 + G.Ce.transpose() * G.Ce;
  c.Ru = G.Duv.transpose() * d2.asDiagonal() * G.Duv + G.Due.transpose() * G.Due;
  c.N_cross = G.Cv.transpose() * d2.asDiagonal() * G.Duv + G.Ce.transpose() * G.Due;
  c.Rv = Eigen::MatrixXd::Zero(G.mw() + G.md(), G.mw() + G.md());
  c.Rv.topLeftCorner(G.mw(), G.mw()) = (gamma * gamma * d2).asDiagonal();
  c.Rv.bottomRightCorner(G.md(), G.md()) =
      gamma * gamma * Eigen::MatrixXd::Identity(G.md(), G.md());
  c.Q = 0.5 * (c.Q + c.Q.transpose());
  c.Ru = 0.5 * (c.Ru + c.Ru.transpose());
  c.validate();
  return c;
}

/// Scaled disturbance input matrix Bh = [Bw D^-1, Bd]. Model-side helper for
/// the Riccati oracles; the model-free path never forms it.
inline Eigen::MatrixXd game_input_matrix(const lti::PartitionedPlant& G,
                                         const lti::DScaling& D) {
  Eigen::MatrixXd Bh(G.n(), G.mw() + G.md());
  Bh.leftCols(G.mw()) = G.Bw * D.inverse_diagonal().asDiagonal();
  Bh.rightCols(G.md()) = G.Bd;
  return Bh;
}

/// Stage cost from the cost matrices; h is the scaled disturbance (w~, d).
inline double stage_cost(const GameCost& c, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& u, const Eigen::VectorXd& h) {
  return x.dot(c.Q * x) + u.dot(c.Ru * u) + 2.0 * x.dot(c.N_cross * u) - h.dot(c.Rv * h);
}

/// The same stage cost evaluated from observed signals only:
///   e'e + v' D^2 v - gamma^2 h' diag(D^2, I) h.
/// This is what the model-free path uses; it needs nothing but the
/// trajectory outputs, the played disturbance and the known (gamma, D).
inline double stage_cost_signals(double gamma, const lti::DScaling& D,
                                 const Eigen::VectorXd& v, const Eigen::VectorXd& e,
                                 const Eigen::VectorXd& h) {
  const Eigen::Index mw = D.dim();
  const Eigen::VectorXd d2 = D.diagonal().array().square().matrix();
  const double attack = d2.dot(h.head(mw).array().square().matrix()) +
                        h.tail(h.size() - mw).squaredNorm();
  return e.squaredNorm() + d2.dot(v.array().square().matrix()) -
         gamma * gamma * attack;
}

}  // namespace musyn::game
