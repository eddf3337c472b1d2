#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "musyn/game/cost.hpp"
#include "musyn/lti/plant.hpp"
#include "musyn/lti/state_space.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::game {

struct GainPair {
  lti::Gain K;      // protagonist, u = -K x
  lti::Gain L_adv;  // adversary on the stacked channel, h = -L x
};

/// Stabilizing solution of the discrete algebraic Riccati equation with
/// cross terms, by value iteration from P = Q:
///   P = Q + A'PA - (N + A'PB)(R + B'PB)^-1 (N' + B'PA)
inline Eigen::MatrixXd dare_solve(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                  const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                                  std::optional<Eigen::MatrixXd> N = std::nullopt,
                                  double tol = 1e-13, int max_iter = 2000000) {
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXd Nc = N ? *N : Eigen::MatrixXd::Zero(n, B.cols());
  Eigen::MatrixXd P = Q;
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd BtP = B.transpose() * P;
    Eigen::LLT<Eigen::MatrixXd> llt(R + BtP * B);
    if (llt.info() != Eigen::Success) throw NumericalError("dare_solve: R + B'PB not PD");
    const Eigen::MatrixXd rhs = Nc.transpose() + BtP * A;
    Eigen::MatrixXd Pn = Q + A.transpose() * P * A - rhs.transpose() * llt.solve(rhs);
    Pn = 0.5 * (Pn + Pn.transpose());
    const double diff = (Pn - P).cwiseAbs().maxCoeff();
    P = Pn;
    if (diff <= tol * std::max(1.0, P.cwiseAbs().maxCoeff())) return P;
    if (!P.allFinite() || P.cwiseAbs().maxCoeff() > 1e14)
      throw NumericalError("dare_solve: iteration diverged");
  }
  throw NumericalError("dare_solve: no convergence");
}

/// LQR gain K = (R + B'PB)^-1 (N' + B'PA) for u = -K x.
inline lti::Gain lqr_gain(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                          const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R,
                          std::optional<Eigen::MatrixXd> N = std::nullopt) {
  const Eigen::MatrixXd P = dare_solve(A, B, Q, R, N);
  const Eigen::MatrixXd Nc = N ? *N : Eigen::MatrixXd::Zero(A.rows(), B.cols());
  const Eigen::MatrixXd BtP = B.transpose() * P;
  Eigen::LLT<Eigen::MatrixXd> llt(R + BtP * B);
  return lti::Gain(llt.solve(Nc.transpose() + BtP * A));
}

struct GameSolution {
  Eigen::MatrixXd P;
  lti::Gain K;
  lti::Gain L_adv;
};

/// Stabilizing saddle solution of the game Riccati equation
///   P = Q + A'PA - rhs' M^-1 rhs,
///   M = [Ru + Bu'PBu, Bu'PBh; Bh'PBu, -Rv + Bh'PBh],  rhs = [N' + Bu'PA; Bh'PA]
/// by value iteration from P = 0. Feasibility of the level gamma (hidden in
/// Rv) is equivalent to Rv - Bh'PBh staying positive definite along the
/// iteration and the iteration converging; violation throws
/// GammaInfeasibleError.
inline GameSolution solve_game_riccati(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Bu,
                                       const Eigen::MatrixXd& Bh, const GameCost& cost,
                                       double tol = 1e-12, int max_iter = 200000) {
  const Eigen::Index n = A.rows();
  const Eigen::Index mu = Bu.cols();
  const Eigen::Index mh = Bh.cols();

  auto assemble = [&](const Eigen::MatrixXd& P, Eigen::MatrixXd& M, Eigen::MatrixXd& rhs) {
    const Eigen::MatrixXd BuP = Bu.transpose() * P;
    const Eigen::MatrixXd BhP = Bh.transpose() * P;
    M.resize(mu + mh, mu + mh);
    M.topLeftCorner(mu, mu) = cost.Ru + BuP * Bu;
    M.topRightCorner(mu, mh) = BuP * Bh;
    M.bottomLeftCorner(mh, mu) = M.topRightCorner(mu, mh).transpose();
    M.bottomRightCorner(mh, mh) = -cost.Rv + BhP * Bh;
    rhs.resize(mu + mh, n);
    rhs.topRows(mu) = cost.N_cross.transpose() + BuP * A;
    rhs.bottomRows(mh) = BhP * A;
    // saddle inertia: minimizing block PD, maximizing block ND
    if (mu > 0 &&
        Eigen::LLT<Eigen::MatrixXd>(M.topLeftCorner(mu, mu)).info() != Eigen::Success)
      throw NumericalError("solve_game_riccati: Ru + Bu'PBu not PD");
    if (mh > 0 && Eigen::LLT<Eigen::MatrixXd>((-M.bottomRightCorner(mh, mh)).eval()).info() !=
                      Eigen::Success)
      throw GammaInfeasibleError("solve_game_riccati: gamma at or below the optimal level");
  };

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd M, rhs;
  for (int it = 0; it < max_iter; ++it) {
    assemble(P, M, rhs);
    Eigen::MatrixXd Pn =
        cost.Q + A.transpose() * P * A - rhs.transpose() * M.partialPivLu().solve(rhs);
    Pn = 0.5 * (Pn + Pn.transpose());
    const double diff = (Pn - P).cwiseAbs().maxCoeff();
    const bool done = diff <= tol * std::max(1.0, Pn.cwiseAbs().maxCoeff());
    P = Pn;
    if (!P.allFinite() || P.cwiseAbs().maxCoeff() > 1e14)
      throw GammaInfeasibleError("solve_game_riccati: value iteration diverged");
    if (done) break;
    if (it + 1 == max_iter)
      throw GammaInfeasibleError("solve_game_riccati: no convergence (level too tight)");
  }

  assemble(P, M, rhs);
  const Eigen::MatrixXd KL = M.partialPivLu().solve(rhs);
  GameSolution sol;
  sol.P = P;
  sol.K = lti::Gain(KL.topRows(mu));
  sol.L_adv = lti::Gain(KL.bottomRows(mh));
  const Eigen::MatrixXd Acl = A - Bu * sol.K.K - Bh * sol.L_adv.K;
  if (!lti::is_stable(Acl))
    throw GammaInfeasibleError("solve_game_riccati: saddle gains not stabilizing");
  return sol;
}

/// Model-based Nash solution of the scaled game for level gamma.
inline GainPair riccati_game_oracle(const lti::PartitionedPlant& G, const lti::DScaling& D,
                                    double gamma, const GameCost& cost) {
  if (!(gamma > 0.0)) throw Error("riccati_game_oracle: gamma must be positive");
  auto sol = solve_game_riccati(G.A, G.Bu, game_input_matrix(G, D), cost);
  return {sol.K, sol.L_adv};
}

inline GainPair riccati_game_oracle(const lti::PartitionedPlant& G, const lti::DScaling& D,
                                    double gamma) {
  return riccati_game_oracle(G, D, gamma, build_game_cost(G, D, gamma));
}

/// Worst-case adversary against a fixed protagonist gain: the indefinite-LQR
/// maximizer L(K) = argmax_L J(K, L), solved through the same machinery with
/// the protagonist channel folded into the dynamics.
inline lti::Gain riccati_inner_max(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Bu,
                                   const Eigen::MatrixXd& Bh, const GameCost& cost,
                                   const lti::Gain& K) {
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXd Abar = A - Bu * K.K;
  GameCost folded;
  folded.gamma = cost.gamma;
  folded.Q = cost.Q + K.K.transpose() * cost.Ru * K.K - cost.N_cross * K.K -
             K.K.transpose() * cost.N_cross.transpose();
  folded.Q = 0.5 * (folded.Q + folded.Q.transpose());
  folded.Ru = Eigen::MatrixXd(0, 0);
  folded.N_cross = Eigen::MatrixXd::Zero(n, 0);
  folded.Rv = cost.Rv;
  auto sol = solve_game_riccati(Abar, Eigen::MatrixXd::Zero(n, 0), Bh, folded);
  return sol.L_adv;
}

/// Model-based Gauss-Newton step on the protagonist with the adversary
/// frozen: evaluates the policy value by a Lyapunov solve and takes the
/// greedy gain. Reference implementation for the one-step LSPI update.
inline lti::Gain gauss_newton_step(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Bu,
                                   const Eigen::MatrixXd& Bh, const GameCost& cost,
                                   const lti::Gain& K, const lti::Gain& L) {
  const Eigen::MatrixXd Abar = A - Bh * L.K;
  Eigen::MatrixXd Qstage = cost.Q - L.K.transpose() * cost.Rv * L.K +
                           K.K.transpose() * cost.Ru * K.K - cost.N_cross * K.K -
                           K.K.transpose() * cost.N_cross.transpose();
  Qstage = 0.5 * (Qstage + Qstage.transpose());
  const Eigen::MatrixXd P = lti::dlyap(Abar - Bu * K.K, Qstage);
  const Eigen::MatrixXd BtP = Bu.transpose() * P;
  return lti::Gain((cost.Ru + BtP * Bu)
                       .ldlt()
                       .solve(cost.N_cross.transpose() + BtP * Abar));
}

/// Closed-loop value J(K, L) = tr(P Sigma0) with P from the Lyapunov
/// equation of the joint policy. Test-build evaluator for saddle checks.
inline double game_policy_value(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Bu,
                                const Eigen::MatrixXd& Bh, const GameCost& cost,
                                const lti::Gain& K, const lti::Gain& L,
                                std::optional<Eigen::MatrixXd> sigma0 = std::nullopt) {
  const Eigen::MatrixXd Acl = A - Bu * K.K - Bh * L.K;
  if (!lti::is_stable(Acl)) throw Error("game_policy_value: joint policy not stabilizing");
  Eigen::MatrixXd Qc = cost.Q + K.K.transpose() * cost.Ru * K.K - cost.N_cross * K.K -
                       K.K.transpose() * cost.N_cross.transpose() -
                       L.K.transpose() * cost.Rv * L.K;
  Qc = 0.5 * (Qc + Qc.transpose());
  const Eigen::MatrixXd P = lti::dlyap(Acl, Qc);
  const Eigen::MatrixXd S = sigma0 ? *sigma0 : Eigen::MatrixXd::Identity(A.rows(), A.rows());
  return (P * S).trace();
}

}  // namespace musyn::game
