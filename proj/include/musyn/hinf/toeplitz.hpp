#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <vector>

#include "musyn/lti/state_space.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::hinf {

/// First `count` Markov parameters of a state-space system:
/// M_0 = D, M_k = C A^{k-1} B.
inline std::vector<Eigen::MatrixXd> markov_params(const lti::StateSpace& ss,
                                                  Eigen::Index count) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(count);
  if (count == 0) return out;
  out.push_back(ss.Dff);
  Eigen::MatrixXd CAk = ss.C;  // C A^{k-1} as k advances
  for (Eigen::Index k = 1; k < count; ++k) {
    out.push_back(CAk * ss.B);
    CAk = CAk * ss.A;
  }
  return out;
}

/// Brute-force largest singular value of the window-N convolution operator:
/// materializes the block-lower-triangular Toeplitz matrix of Markov
/// parameters and takes an exact SVD. Small-window verification tool.
inline double toeplitz_sigma(const std::vector<Eigen::MatrixXd>& markov, Eigen::Index n_win) {
  if (n_win < 1) throw Error("toeplitz_sigma: n_win must be >= 1");
  if (n_win > 512) throw Error("toeplitz_sigma: window guard exceeded (n_win <= 512)");
  if (markov.empty()) throw Error("toeplitz_sigma: need at least one Markov parameter");
  const Eigen::Index p = markov[0].rows();
  const Eigen::Index m = markov[0].cols();
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(p * n_win, m * n_win);
  for (Eigen::Index i = 0; i < n_win; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const Eigen::Index lag = i - j;
      if (lag < static_cast<Eigen::Index>(markov.size()))
        T.block(i * p, j * m, p, m) = markov[lag];
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(T);
  return svd.singularValues()(0);
}

inline double toeplitz_sigma(const lti::StateSpace& ss, Eigen::Index n_win) {
  return toeplitz_sigma(markov_params(ss, n_win), n_win);
}

}  // namespace musyn::hinf
