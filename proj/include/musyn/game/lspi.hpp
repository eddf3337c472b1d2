#pragma once

#include <Eigen/Dense>
#include <vector>

#include "musyn/game/cost.hpp"
#include "musyn/lti/plant.hpp"
#include "musyn/sim/trajectory.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::game {

enum class Player { protagonist, adversary };

/// Quadratic action-value model Q(x, a) = (x, a)' H (x, a) for the acting
/// player. Fits are always done in minimizing convention: the adversary's
/// stage cost is negated before fitting, so a positive definite action block
/// means the underlying maximization is concave (gamma feasible).
struct QFunctionParams {
  Eigen::MatrixXd H;
  Eigen::Index state_dim = 0;
  Eigen::Index action_dim = 0;

  Eigen::MatrixXd Hxx() const { return H.topLeftCorner(state_dim, state_dim); }
  Eigen::MatrixXd Hxa() const { return H.topRightCorner(state_dim, action_dim); }
  Eigen::MatrixXd Hax() const { return H.bottomLeftCorner(action_dim, state_dim); }
  Eigen::MatrixXd Haa() const { return H.bottomRightCorner(action_dim, action_dim); }
};

/// One-step transition samples (x, a, c, x+) for the acting player. Costs
/// are the acting player's own (already negated for the adversary).
struct GameDataset {
  Eigen::MatrixXd x;       // n x Ns
  Eigen::MatrixXd a;       // ma x Ns
  Eigen::MatrixXd x_next;  // n x Ns
  Eigen::VectorXd cost;    // Ns

  Eigen::Index size() const { return cost.size(); }
};

namespace detail {

inline Eigen::Index quad_feature_count(Eigen::Index nz) { return nz * (nz + 1) / 2; }

/// phi(z): upper-triangular monomials, scaled so theta maps straight onto
/// the entries of the symmetric H.
inline void quad_features(const Eigen::VectorXd& z, Eigen::Ref<Eigen::VectorXd> out) {
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    out[t++] = z[i] * z[i];
    for (Eigen::Index j = i + 1; j < z.size(); ++j) out[t++] = 2.0 * z[i] * z[j];
  }
}

inline Eigen::MatrixXd unpack_symmetric(const Eigen::VectorXd& theta, Eigen::Index nz) {
  Eigen::MatrixXd H(nz, nz);
  Eigen::Index t = 0;
  for (Eigen::Index i = 0; i < nz; ++i) {
    H(i, i) = theta[t++];
    for (Eigen::Index j = i + 1; j < nz; ++j) {
      H(i, j) = theta[t];
      H(j, i) = theta[t];
      ++t;
    }
  }
  return H;
}

}  // namespace detail

/// Least-squares temporal-difference fit of the quadratic action-value
/// function of the policy a = -F_eval x, from off-policy transition samples:
/// solves  sum phi_k (phi_k - phi'_k)' theta = sum phi_k c_k  with
/// phi'_k = phi(x_{k+1}, -F_eval x_{k+1}). Exact on noiseless LQ data up to
/// regression conditioning.
inline QFunctionParams lstdq_fit(const GameDataset& data, const Eigen::MatrixXd& eval_gain,
                                 double ridge = 1e-8) {
  const Eigen::Index n = data.x.rows();
  const Eigen::Index ma = data.a.rows();
  const Eigen::Index ns = data.size();
  const Eigen::Index nz = n + ma;
  const Eigen::Index nf = detail::quad_feature_count(nz);
  if (eval_gain.rows() != ma || eval_gain.cols() != n)
    throw DimensionError("lstdq_fit: eval gain must be ma x n");
  if (ns < nf) throw InsufficientExcitationError("lstdq_fit: fewer samples than features");

  const Eigen::MatrixXd a_next = -eval_gain * data.x_next;
  Eigen::MatrixXd amat = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nf);
  Eigen::VectorXd z(nz), phi(nf), phi_next(nf);
  for (Eigen::Index k = 0; k < ns; ++k) {
    z.head(n) = data.x.col(k);
    z.tail(ma) = data.a.col(k);
    detail::quad_features(z, phi);
    z.head(n) = data.x_next.col(k);
    z.tail(ma) = a_next.col(k);
    detail::quad_features(z, phi_next);
    amat.noalias() += phi * (phi - phi_next).transpose();
    b.noalias() += phi * data.cost[k];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(amat);
  if (qr.rank() < nf)
    throw InsufficientExcitationError("lstdq_fit: rank-deficient regression");
  amat.diagonal().array() += ridge;
  const Eigen::VectorXd theta = amat.partialPivLu().solve(b);
  if (!theta.allFinite()) throw NumericalError("lstdq_fit: solve produced non-finite values");

  QFunctionParams qf;
  qf.H = detail::unpack_symmetric(theta, nz);
  qf.state_dim = n;
  qf.action_dim = ma;
  return qf;
}

/// Greedy gain of a quadratic action-value model: a = -Haa^-1 Hax x. The
/// action block must be positive definite; in the minimizing convention used
/// by lstdq_fit an indefinite block means the level gamma is infeasible for
/// the current opponent.
inline lti::Gain policy_improve(const QFunctionParams& qf) {
  Eigen::LLT<Eigen::MatrixXd> llt(qf.Haa());
  if (llt.info() != Eigen::Success)
    throw GammaInfeasibleError("policy_improve: action block not positive definite");
  return lti::Gain(llt.solve(qf.Hax()));
}

/// Builds the acting player's dataset out of raw trajectories and the game
/// cost matrices: a = u or h = (w, d) per player, c from (x, u, h), with the
/// adversary's cost negated. Disturbance channels are taken as recorded, so
/// with a non-identity scaling in play the caller supplies scaled-channel
/// trajectories.
inline GameDataset dataset_from_trajectories(const std::vector<sim::Trajectory>& trajs,
                                             const GameCost& cost, Player player) {
  Eigen::Index total = 0;
  for (const auto& t : trajs) total += t.horizon();
  if (total == 0) throw InsufficientExcitationError("lstdq_fit: empty trajectory set");

  const Eigen::Index n = trajs[0].x.rows();
  const Eigen::Index ma =
      player == Player::protagonist ? trajs[0].u.rows() : trajs[0].w.rows() + trajs[0].d.rows();
  GameDataset data;
  data.x.resize(n, total);
  data.a.resize(ma, total);
  data.x_next.resize(n, total);
  data.cost.resize(total);

  Eigen::Index col = 0;
  Eigen::VectorXd h(cost.mh());
  for (const auto& t : trajs) {
    for (Eigen::Index k = 0; k < t.horizon(); ++k, ++col) {
      h.head(t.w.rows()) = t.w.col(k);
      h.tail(t.d.rows()) = t.d.col(k);
      const double c = stage_cost(cost, t.x.col(k), t.u.col(k), h);
      data.x.col(col) = t.x.col(k);
      data.a.col(col) = player == Player::protagonist ? t.u.col(k) : h;
      data.x_next.col(col) = k + 1 < t.horizon() ? t.x.col(k + 1) : t.x_final;
      data.cost[col] = player == Player::adversary ? -c : c;
    }
  }
  return data;
}

/// Spec-level convenience: LSTDQ for one player of the game, from raw
/// trajectories. `acting_gain` is the policy being evaluated; the opposing
/// gain is fixed inside the data (it generated the trajectories).
inline QFunctionParams lstdq_fit(const std::vector<sim::Trajectory>& trajs,
                                 const GameCost& cost, Player player,
                                 const lti::Gain& /*opposing_gain*/,
                                 const lti::Gain& acting_gain, double ridge = 1e-8) {
  return lstdq_fit(dataset_from_trajectories(trajs, cost, player), acting_gain.K, ridge);
}

}  // namespace musyn::game
