#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include "musyn/sim/trajectory.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::sim {

/// CSV export with columns t, u1.., w1.., d1.., x1.., v1.., e1..
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  auto header = [&](const char* base, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) out << "," << base << (i + 1);
  };
  out << "t";
  header("u", traj.u.rows());
  header("w", traj.w.rows());
  header("d", traj.d.rows());
  header("x", traj.x.rows());
  header("v", traj.v.rows());
  header("e", traj.e.rows());
  out << "\n";
  out << std::setprecision(17);
  for (Eigen::Index k = 0; k < traj.horizon(); ++k) {
    out << k;
    for (const auto* m : {&traj.u, &traj.w, &traj.d, &traj.x, &traj.v, &traj.e})
      for (Eigen::Index i = 0; i < m->rows(); ++i) out << "," << (*m)(i, k);
    out << "\n";
  }
}

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw Error("trajectory: cannot write '" + path + "'");
  write_trajectory_csv(out, traj);
}

}  // namespace musyn::sim
