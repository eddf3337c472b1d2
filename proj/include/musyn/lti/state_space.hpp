#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <string>
#include <utility>

#include "musyn/util/errors.hpp"

namespace musyn::lti {

/// Discrete-time LTI system
///   x+ = A x + B u
///   y  = C x + D u
/// All matrices are plain dense doubles; n may be zero (static map).
struct StateSpace {
  Eigen::MatrixXd A;    // n x n
  Eigen::MatrixXd B;    // n x m
  Eigen::MatrixXd C;    // p x n
  Eigen::MatrixXd Dff;  // p x m feedthrough

  StateSpace() = default;
  StateSpace(Eigen::MatrixXd A_, Eigen::MatrixXd B_, Eigen::MatrixXd C_, Eigen::MatrixXd D_)
      : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), Dff(std::move(D_)) {
    validate();
  }

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
  Eigen::Index output_dim() const { return C.rows(); }

  void validate() const {
    if (A.rows() != A.cols()) throw DimensionError("StateSpace: A must be square");
    if (B.rows() != A.rows()) throw DimensionError("StateSpace: B row count != n");
    if (C.cols() != A.rows()) throw DimensionError("StateSpace: C column count != n");
    if (Dff.rows() != C.rows() || Dff.cols() != B.cols())
      throw DimensionError("StateSpace: D must be p x m");
    if (B.cols() < 1 || C.rows() < 1)
      throw DimensionError("StateSpace: need at least one input and one output");
    if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !Dff.allFinite())
      throw Error("StateSpace: non-finite entries");
  }
};

/// Largest eigenvalue modulus of a square matrix; 0 for the empty matrix.
inline double spectral_radius(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw DimensionError("spectral_radius: matrix must be square");
  if (A.rows() == 0) return 0.0;
  if (!A.allFinite()) throw Error("spectral_radius: non-finite entries");
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("spectral_radius: eigen solver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Schur (discrete-time) stability predicate.
inline bool is_stable(const Eigen::MatrixXd& A) { return spectral_radius(A) < 1.0; }

/// Zero-order-hold discretization of the continuous pair (Ac, Bc) at step ts:
///   Ad = exp(Ac ts),   Bd = (integral_0^ts exp(Ac s) ds) Bc,
/// both read off the exponential of the augmented matrix [Ac Bc; 0 0] ts.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_discretize(const Eigen::MatrixXd& Ac,
                                                                  const Eigen::MatrixXd& Bc,
                                                                  double ts) {
  const Eigen::Index n = Ac.rows();
  const Eigen::Index m = Bc.cols();
  if (Ac.cols() != n) throw DimensionError("zoh_discretize: Ac must be square");
  if (Bc.rows() != n) throw DimensionError("zoh_discretize: Bc row count != n");
  if (!(ts > 0.0)) throw Error("zoh_discretize: ts must be positive");
  if (!Ac.allFinite() || !Bc.allFinite()) throw Error("zoh_discretize: non-finite entries");

  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = Ac * ts;
  aug.topRightCorner(n, m) = Bc * ts;
  const Eigen::MatrixXd phi = aug.exp();
  return {phi.topLeftCorner(n, n), phi.topRightCorner(n, m)};
}

/// Solves the discrete Lyapunov equation X = A^T X A + Q by Kronecker
/// vectorization. Intended for the small state dimensions used here.
inline Eigen::MatrixXd dlyap(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n)
    throw DimensionError("dlyap: dimension mismatch");
  if (n == 0) return Eigen::MatrixXd(0, 0);
  if (!is_stable(A)) throw Error("dlyap: A is not Schur stable");

  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n * n, n * n);
  // M = I - kron(A^T, A^T); vec(A^T X A) = kron(A^T, A^T) vec(X)
  const Eigen::MatrixXd At = A.transpose();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      M.block(i * n, j * n, n, n) -= At(i, j) * At;
  Eigen::VectorXd q(Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n));
  Eigen::VectorXd x = M.partialPivLu().solve(q);
  Eigen::MatrixXd X(Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n));
  return 0.5 * (X + X.transpose());
}

}  // namespace musyn::lti
