#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "musyn/lti/state_space.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::hinf {

/// Largest singular value of the frequency response G(e^{i theta}).
inline double sigma_at_theta(const lti::StateSpace& ss, double theta) {
  using CMat = Eigen::MatrixXcd;
  const std::complex<double> z = std::polar(1.0, theta);
  CMat G;
  if (ss.state_dim() == 0) {
    G = ss.Dff.cast<std::complex<double>>();
  } else {
    const Eigen::Index n = ss.state_dim();
    CMat zIA = z * CMat::Identity(n, n) - ss.A.cast<std::complex<double>>();
    CMat X = zIA.partialPivLu().solve(ss.B.cast<std::complex<double>>());
    G = ss.C.cast<std::complex<double>>() * X + ss.Dff.cast<std::complex<double>>();
  }
  Eigen::JacobiSVD<CMat> svd(G);
  return svd.singularValues()(0);
}

namespace detail {

struct ContinuousSS {
  Eigen::MatrixXd A, B, C, D;
};

/// Bilinear map z = (1+s)/(1-s); sends the unit circle onto the imaginary
/// axis, preserving the H-infinity norm exactly. Frequencies relate by
/// theta = 2 atan(omega).
inline ContinuousSS bilinear_to_continuous(const lti::StateSpace& ss) {
  const Eigen::Index n = ss.state_dim();
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(ss.A + I);
  Eigen::PartialPivLU<Eigen::MatrixXd> luT((ss.A + I).transpose());
  ContinuousSS c;
  c.A = lu.solve(ss.A - I);
  c.B = std::numbers::sqrt2 * lu.solve(ss.B);
  c.C = std::numbers::sqrt2 * luT.solve(ss.C.transpose()).transpose();
  c.D = ss.Dff - ss.C * lu.solve(ss.B);
  return c;
}

/// Frequencies where G(j omega) has a singular value equal to gamma: the
/// purely imaginary eigenvalues of the level-gamma Hamiltonian.
inline std::vector<double> level_crossing_freqs(const ContinuousSS& g, double gamma) {
  const Eigen::Index n = g.A.rows();
  const Eigen::Index m = g.B.cols();
  const Eigen::Index p = g.C.rows();
  const Eigen::MatrixXd R = gamma * gamma * Eigen::MatrixXd::Identity(m, m) -
                            g.D.transpose() * g.D;
  const Eigen::MatrixXd S = gamma * gamma * Eigen::MatrixXd::Identity(p, p) -
                            g.D * g.D.transpose();
  Eigen::LLT<Eigen::MatrixXd> lltR(R);
  Eigen::LLT<Eigen::MatrixXd> lltS(S);
  if (lltR.info() != Eigen::Success || lltS.info() != Eigen::Success)
    throw NumericalError("hinf_exact: level at or below the feedthrough gain");

  const Eigen::MatrixXd Rinv_Bt = lltR.solve(g.B.transpose());
  const Eigen::MatrixXd Acl = g.A + g.B * lltR.solve(g.D.transpose() * g.C);
  Eigen::MatrixXd M(2 * n, 2 * n);
  M.topLeftCorner(n, n) = Acl;
  M.topRightCorner(n, n) = gamma * g.B * Rinv_Bt;
  M.bottomLeftCorner(n, n) = -gamma * g.C.transpose() * lltS.solve(g.C);
  M.bottomRightCorner(n, n) = -Acl.transpose();

  Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericalError("hinf_exact: eigen solve failed");

  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  std::vector<double> omegas;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto lam = es.eigenvalues()(i);
    if (std::abs(lam.real()) <= 1e-9 * scale && lam.imag() >= 0.0)
      omegas.push_back(lam.imag());
  }
  std::sort(omegas.begin(), omegas.end());
  return omegas;
}

}  // namespace detail

/// Exact H-infinity norm of a stable discrete-time system, to relative
/// tolerance rel_tol. A singular-value sweep seeds a lower bound; candidate
/// levels are then certified through the Hamiltonian of the bilinear
/// transformed system, and the bound is pushed up through the midpoints of
/// the crossing frequencies until no level crossing remains
/// (Bruinsma-Steinbuch style iteration).
inline double hinf_exact(const lti::StateSpace& ss, double rel_tol = 1e-9) {
  if (ss.state_dim() == 0) return sigma_at_theta(ss, 0.0);
  if (!lti::is_stable(ss.A)) throw Error("hinf_exact: system is unstable");

  // seed: endpoints, resonance angles, coarse grid
  std::vector<double> thetas = {0.0, std::numbers::pi};
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(ss.A, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const double ang = std::abs(std::arg(es.eigenvalues()(i)));
      if (ang > 0.0 && ang < std::numbers::pi) thetas.push_back(ang);
    }
    for (int k = 1; k < 64; ++k) thetas.push_back(std::numbers::pi * k / 64.0);
  }
  double lb = 0.0;
  for (double th : thetas) lb = std::max(lb, sigma_at_theta(ss, th));
  if (lb == 0.0) return 0.0;  // zero map

  const detail::ContinuousSS g = detail::bilinear_to_continuous(ss);
  const double eps = std::max(rel_tol / 2.0, 1e-13);
  for (int iter = 0; iter < 80; ++iter) {
    const double gamma = lb * (1.0 + 2.0 * eps);
    std::vector<double> omegas;
    try {
      omegas = detail::level_crossing_freqs(g, gamma);
    } catch (const NumericalError&) {
      return lb;  // norm attained at the feedthrough limit
    }
    if (omegas.empty()) return lb * (1.0 + eps);

    double improved = lb;
    for (std::size_t i = 0; i + 1 < omegas.size(); ++i) {
      const double mid = 0.5 * (omegas[i] + omegas[i + 1]);
      improved = std::max(improved, sigma_at_theta(ss, 2.0 * std::atan(mid)));
    }
    if (omegas.size() == 1)
      improved = std::max(improved, sigma_at_theta(ss, 2.0 * std::atan(omegas[0])));
    if (improved <= lb * (1.0 + 1e-14)) return lb * (1.0 + eps);
    lb = improved;
  }
  return lb * (1.0 + eps);
}

}  // namespace musyn::hinf
