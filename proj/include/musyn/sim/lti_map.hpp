#pragma once

#include <Eigen/Dense>
#include <utility>

#include "musyn/lti/state_space.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::sim {

/// A stable LTI system exposed as a plain input -> output map. Callers see
/// only forward and adjoint passes over finite windows; the realization
/// stays private, which is what keeps the synthesis path model-free.
///
/// The adjoint pass realizes the transpose of the windowed convolution
/// operator by the time-reversal recipe: reverse the signal, run it through
/// the channel-transposed dynamics, reverse the result.
class LtiMapSim {
 public:
  explicit LtiMapSim(lti::StateSpace ss, double overflow_guard = 1e12)
      : ss_(std::move(ss)), guard_(overflow_guard) {}

  Eigen::Index input_dim() const { return ss_.input_dim(); }
  Eigen::Index output_dim() const { return ss_.output_dim(); }

  /// y = G_N u from zero initial state; one column of U per step.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& U) const {
    if (U.rows() != input_dim()) throw DimensionError("LtiMapSim: input dimension mismatch");
    return run(ss_.A, ss_.B, ss_.C, ss_.Dff, U);
  }

  /// z = G_N^T y over the window given by Y's column count.
  Eigen::MatrixXd adjoint(const Eigen::MatrixXd& Y) const {
    if (Y.rows() != output_dim()) throw DimensionError("LtiMapSim: output dimension mismatch");
    const Eigen::MatrixXd rev = Y.rowwise().reverse();
    const Eigen::MatrixXd out = run(ss_.A.transpose(), ss_.C.transpose(), ss_.B.transpose(),
                                    ss_.Dff.transpose(), rev);
    return out.rowwise().reverse();
  }

 private:
  Eigen::MatrixXd run(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                      const Eigen::MatrixXd& C, const Eigen::MatrixXd& D,
                      const Eigen::MatrixXd& U) const {
    const Eigen::Index T = U.cols();
    Eigen::MatrixXd Y(C.rows(), T);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(A.rows());
    for (Eigen::Index k = 0; k < T; ++k) {
      Y.col(k) = C * x + D * U.col(k);
      x = A * x + B * U.col(k);
      if (x.size() > 0 && x.cwiseAbs().maxCoeff() > guard_)
        throw DivergedError("LtiMapSim: state exceeded overflow guard (unstable loop)");
    }
    return Y;
  }

  lti::StateSpace ss_;
  double guard_;
};

/// Truncated-adjoint application: pads or truncates y to the window, then
/// applies the window-N adjoint operator.
inline Eigen::MatrixXd adjoint_pass(const LtiMapSim& sim, const Eigen::MatrixXd& y,
                                    Eigen::Index n_win) {
  if (y.rows() != sim.output_dim()) throw DimensionError("adjoint_pass: channel mismatch");
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(y.rows(), n_win);
  const Eigen::Index T = std::min(n_win, y.cols());
  Y.leftCols(T) = y.leftCols(T);
  return sim.adjoint(Y);
}

}  // namespace musyn::sim
