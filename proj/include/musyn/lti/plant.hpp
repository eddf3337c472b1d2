#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "musyn/lti/state_space.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::lti {

/// Uncertain plant with partitioned channels
///   x+ = A x + Bw w + Bd d + Bu u
///   v  = Cv x + Duv u
///   e  = Ce x + Due u
/// There are no disturbance feedthrough blocks by construction, and the
/// uncertainty channel is square (mv == mw) so that a diagonal scaling
/// commutes with the uncertainty.
struct PartitionedPlant {
  Eigen::MatrixXd A;
  Eigen::MatrixXd Bw, Bd, Bu;
  Eigen::MatrixXd Cv, Ce;
  Eigen::MatrixXd Duv, Due;

  PartitionedPlant() = default;
  PartitionedPlant(Eigen::MatrixXd A_, Eigen::MatrixXd Bw_, Eigen::MatrixXd Bd_,
                   Eigen::MatrixXd Bu_, Eigen::MatrixXd Cv_, Eigen::MatrixXd Ce_,
                   Eigen::MatrixXd Duv_, Eigen::MatrixXd Due_)
      : A(std::move(A_)),
        Bw(std::move(Bw_)),
        Bd(std::move(Bd_)),
        Bu(std::move(Bu_)),
        Cv(std::move(Cv_)),
        Ce(std::move(Ce_)),
        Duv(std::move(Duv_)),
        Due(std::move(Due_)) {
    validate();
  }

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index mw() const { return Bw.cols(); }
  Eigen::Index md() const { return Bd.cols(); }
  Eigen::Index mu() const { return Bu.cols(); }
  Eigen::Index mv() const { return Cv.rows(); }
  Eigen::Index me() const { return Ce.rows(); }

  void validate() const {
    const Eigen::Index ns = A.rows();
    if (A.cols() != ns) throw DimensionError("PartitionedPlant: A must be square");
    for (const auto* b : {&Bw, &Bd, &Bu})
      if (b->rows() != ns) throw DimensionError("PartitionedPlant: input matrix row count != n");
    for (const auto* c : {&Cv, &Ce})
      if (c->cols() != ns) throw DimensionError("PartitionedPlant: output matrix column count != n");
    if (Duv.rows() != Cv.rows() || Duv.cols() != Bu.cols())
      throw DimensionError("PartitionedPlant: Duv must be mv x mu");
    if (Due.rows() != Ce.rows() || Due.cols() != Bu.cols())
      throw DimensionError("PartitionedPlant: Due must be me x mu");
    if (Cv.rows() != Bw.cols())
      throw DimensionError("PartitionedPlant: uncertainty channel must be square (mv == mw)");
    if (mu() < 1 || md() < 1 || me() < 1)
      throw DimensionError("PartitionedPlant: u, d, e channels must be non-empty");
    for (const auto* m : {&A, &Bw, &Bd, &Bu, &Cv, &Ce, &Duv, &Due})
      if (!m->allFinite()) throw Error("PartitionedPlant: non-finite entries");
  }
};

/// Static diagonal scaling D = exp(diag(d)), stored by its log-parameters.
/// The realized matrix is positive diagonal for every d, and commutes with
/// any diagonal uncertainty of matching structure.
class DScaling {
 public:
  DScaling() = default;
  explicit DScaling(Eigen::VectorXd log_params) : d_(std::move(log_params)) {
    if (!d_.allFinite()) throw Error("DScaling: non-finite log-parameters");
  }

  static DScaling identity(Eigen::Index m) { return DScaling(Eigen::VectorXd::Zero(m)); }

  Eigen::Index dim() const { return d_.size(); }
  const Eigen::VectorXd& log_params() const { return d_; }

  Eigen::VectorXd diagonal() const { return d_.array().exp().matrix(); }
  Eigen::VectorXd inverse_diagonal() const { return (-d_).array().exp().matrix(); }
  Eigen::MatrixXd matrix() const { return diagonal().asDiagonal(); }

  DScaling inverse() const { return DScaling(-d_); }

 private:
  Eigen::VectorXd d_;
};

/// Static state feedback u = -K x.
struct Gain {
  Eigen::MatrixXd K;

  Gain() = default;
  explicit Gain(Eigen::MatrixXd K_) : K(std::move(K_)) {
    if (!K.allFinite()) throw Error("Gain: non-finite entries");
  }
  static Gain zero(Eigen::Index mu, Eigen::Index n) {
    return Gain(Eigen::MatrixXd::Zero(mu, n));
  }

  Eigen::Index inputs() const { return K.rows(); }
  Eigen::Index states() const { return K.cols(); }
};

/// Closes u = -K x around the plant: the map (w, d) -> (v, e) with state
/// matrix A - Bu K and zero feedthrough.
inline StateSpace close_loop(const PartitionedPlant& G, const Gain& K) {
  if (K.inputs() != G.mu() || K.states() != G.n())
    throw DimensionError("close_loop: gain must be mu x n");
  const Eigen::Index n = G.n();
  const Eigen::Index min = G.mw() + G.md();
  const Eigen::Index pout = G.mv() + G.me();

  Eigen::MatrixXd A = G.A - G.Bu * K.K;
  Eigen::MatrixXd B(n, min);
  B << G.Bw, G.Bd;
  Eigen::MatrixXd C(pout, n);
  C << G.Cv - G.Duv * K.K, G.Ce - G.Due * K.K;
  return StateSpace(std::move(A), std::move(B), std::move(C),
                    Eigen::MatrixXd::Zero(pout, min));
}

/// Wraps diag(D, I) . sys . diag(D^-1, I): the first dim(d) input columns are
/// right-multiplied by D^-1 and the first dim(d) output rows left-multiplied
/// by D. The state matrix is untouched.
inline StateSpace apply_d_scaling(const StateSpace& sys, const DScaling& D) {
  const Eigen::Index m = D.dim();
  if (sys.input_dim() < m || sys.output_dim() < m)
    throw DimensionError("apply_d_scaling: system smaller than the uncertainty channel");

  StateSpace out = sys;
  const Eigen::VectorXd dv = D.diagonal();
  const Eigen::VectorXd di = D.inverse_diagonal();
  for (Eigen::Index j = 0; j < m; ++j) out.B.col(j) *= di[j];
  for (Eigen::Index i = 0; i < m; ++i) out.C.row(i) *= dv[i];
  for (Eigen::Index j = 0; j < m; ++j) out.Dff.col(j) *= di[j];
  for (Eigen::Index i = 0; i < m; ++i) out.Dff.row(i) *= dv[i];
  return out;
}

/// diag(D, I) . F_l(G, K) . diag(D^-1, I), the scaled closed loop whose
/// H-infinity norm is the robust-performance upper bound being minimized.
inline StateSpace scaled_closed_loop(const PartitionedPlant& G, const Gain& K,
                                     const DScaling& D) {
  if (D.dim() != G.mw()) throw DimensionError("scaled_closed_loop: dim(d) != mw");
  return apply_d_scaling(close_loop(G, K), D);
}

}  // namespace musyn::lti
