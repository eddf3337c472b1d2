#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "json.hpp"
#include "musyn/util/errors.hpp"

namespace musyn {

/// Row-major nested-array encoding of a matrix. An r x 0 or 0 x c matrix
/// encodes as [] (column count is recovered from context by the caller).
inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& name) {
  if (!j.is_array()) throw ParseError(name + ": expected nested array");
  const auto n_rows = static_cast<Eigen::Index>(j.size());
  if (n_rows == 0) return Eigen::MatrixXd(0, 0);
  if (!j[0].is_array()) throw ParseError(name + ": expected nested array of rows");
  const auto n_cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(n_rows, n_cols);
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const auto& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n_cols)
      throw ParseError(name + ": ragged rows");
    for (Eigen::Index k = 0; k < n_cols; ++k) {
      if (!row[k].is_number()) throw ParseError(name + ": non-numeric entry");
      m(i, k) = row[k].get<double>();
      if (!std::isfinite(m(i, k))) throw ParseError(name + ": non-finite entry");
    }
  }
  return m;
}

}  // namespace musyn
