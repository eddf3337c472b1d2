#pragma once

#include <Eigen/Core>

#include "musyn/util/errors.hpp"

namespace musyn::sim {

/// Finite-horizon record of a simulation. One column per time step; all
/// blocks share the horizon. The state reached after the last step is kept
/// separately so that consecutive (x_k, x_{k+1}) pairs are available for
/// temporal-difference fits.
struct Trajectory {
  Eigen::MatrixXd u, w, d;  // inputs fed to the plant
  Eigen::MatrixXd x, v, e;  // measured state and outputs
  Eigen::VectorXd x_final;  // state after the final step

  Eigen::Index horizon() const { return u.cols(); }

  void validate() const {
    const Eigen::Index T = u.cols();
    for (const auto* m : {&u, &w, &d, &x, &v, &e})
      if (m->cols() != T) throw DimensionError("Trajectory: sequences must share one horizon");
    for (const auto* m : {&u, &w, &d, &x, &v, &e})
      if (!m->allFinite()) throw Error("Trajectory: non-finite entries");
    if (!x_final.allFinite()) throw Error("Trajectory: non-finite final state");
  }
};

}  // namespace musyn::sim
