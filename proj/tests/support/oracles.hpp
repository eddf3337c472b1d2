#pragma once

// Independent reference implementations used only by tests. These
// deliberately avoid the library's computational paths so that agreement is
// meaningful: matrix exponentials come from a plain scaled Taylor series,
// discretization from sub-stepped RK4 integration, frequency responses from
// direct complex arithmetic on a grid.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "musyn/lti/plant.hpp"
#include "musyn/lti/state_space.hpp"
#include "musyn/util/rng.hpp"

namespace oracles {

/// exp(A) by scaling-and-squaring over a raw Taylor series.
inline Eigen::MatrixXd expm_taylor(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  int s = 0;
  double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();
  while (nrm > 0.25) {
    nrm /= 2.0;
    ++s;
  }
  const Eigen::MatrixXd B = A / std::pow(2.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 40; ++k) {
    term = (term * B) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-300) break;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

/// ZOH pair via the augmented exponential, evaluated with expm_taylor.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_taylor(const Eigen::MatrixXd& Ac,
                                                              const Eigen::MatrixXd& Bc,
                                                              double ts) {
  const Eigen::Index n = Ac.rows();
  const Eigen::Index m = Bc.cols();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = Ac * ts;
  aug.topRightCorner(n, m) = Bc * ts;
  Eigen::MatrixXd phi = expm_taylor(aug);
  return {phi.topLeftCorner(n, n), phi.topRightCorner(n, m)};
}

/// ZOH pair via sub-stepped RK4 on Phi' = Ac Phi, Psi' = Ac Psi + I.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> zoh_rk4(const Eigen::MatrixXd& Ac,
                                                           const Eigen::MatrixXd& Bc,
                                                           double ts, int steps = 20000) {
  const Eigen::Index n = Ac.rows();
  const double h = ts / steps;
  Eigen::MatrixXd Phi = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Psi = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  auto f_phi = [&](const Eigen::MatrixXd& P) { return Ac * P; };
  auto f_psi = [&](const Eigen::MatrixXd& P) { return Ac * P + I; };
  for (int k = 0; k < steps; ++k) {
    Eigen::MatrixXd k1 = f_phi(Phi), l1 = f_psi(Psi);
    Eigen::MatrixXd k2 = f_phi(Phi + 0.5 * h * k1), l2 = f_psi(Psi + 0.5 * h * l1);
    Eigen::MatrixXd k3 = f_phi(Phi + 0.5 * h * k2), l3 = f_psi(Psi + 0.5 * h * l2);
    Eigen::MatrixXd k4 = f_phi(Phi + h * k3), l4 = f_psi(Psi + h * l3);
    Phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    Psi += (h / 6.0) * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
  }
  return {Phi, Psi * Bc};
}

/// Largest singular value of the frequency response on a uniform grid over
/// [0, pi]; direct complex evaluation.
inline double sigma_grid_max(const musyn::lti::StateSpace& ss, int points) {
  using CMat = Eigen::MatrixXcd;
  double best = 0.0;
  const Eigen::Index n = ss.state_dim();
  for (int k = 0; k <= points; ++k) {
    const double theta = std::numbers::pi * k / points;
    const std::complex<double> z = std::polar(1.0, theta);
    CMat G = ss.Dff.cast<std::complex<double>>();
    if (n > 0) {
      CMat zIA = z * CMat::Identity(n, n) - ss.A.cast<std::complex<double>>();
      G += ss.C.cast<std::complex<double>>() *
           zIA.fullPivLu().solve(ss.B.cast<std::complex<double>>());
    }
    Eigen::JacobiSVD<CMat> svd(G);
    best = std::max(best, svd.singularValues()(0));
  }
  return best;
}

/// Modulus of the largest root of lambda^2 - tr lambda + det, for 2x2
/// spectral-radius cross-checks.
inline double spectral_radius_2x2_charpoly(const Eigen::Matrix2d& A) {
  const std::complex<double> tr(A.trace(), 0.0);
  const std::complex<double> det(A.determinant(), 0.0);
  const std::complex<double> disc = std::sqrt(tr * tr - 4.0 * det);
  return std::max(std::abs((tr + disc) / 2.0), std::abs((tr - disc) / 2.0));
}

/// Random plant with a pre-scaled (not necessarily stable) state matrix.
inline musyn::lti::PartitionedPlant random_plant(musyn::Rng& rng, Eigen::Index n,
                                                 Eigen::Index mw, Eigen::Index md,
                                                 Eigen::Index mu, Eigen::Index me,
                                                 double radius = 0.8) {
  Eigen::MatrixXd A = rng.gaussian_matrix(n, n);
  if (n > 0) {
    const double rho = musyn::lti::spectral_radius(A);
    if (rho > 0.0) A *= radius / rho;
  }
  return musyn::lti::PartitionedPlant(
      A, rng.gaussian_matrix(n, mw), rng.gaussian_matrix(n, md), rng.gaussian_matrix(n, mu),
      rng.gaussian_matrix(mw, n), rng.gaussian_matrix(me, n), rng.gaussian_matrix(mw, mu),
      rng.gaussian_matrix(me, mu));
}

/// Random stable state-space system with spectral radius <= radius.
inline musyn::lti::StateSpace random_stable_ss(musyn::Rng& rng, Eigen::Index n,
                                               Eigen::Index m, Eigen::Index p,
                                               double radius = 0.85, bool feedthrough = true) {
  Eigen::MatrixXd A = rng.gaussian_matrix(n, n);
  if (n > 0) {
    const double rho = musyn::lti::spectral_radius(A);
    if (rho > 0.0) A *= radius / rho;
  }
  Eigen::MatrixXd D = feedthrough ? rng.gaussian_matrix(p, m) : Eigen::MatrixXd::Zero(p, m);
  return musyn::lti::StateSpace(A, rng.gaussian_matrix(n, m), rng.gaussian_matrix(p, n), D);
}

}  // namespace oracles
