#pragma once

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "musyn/lti/plant.hpp"
#include "musyn/util/errors.hpp"

namespace musyn::dk {

enum class Phase { k_step, d_step };

inline const char* phase_name(Phase p) { return p == Phase::k_step ? "K-step" : "D-step"; }

/// One row of the synthesis history: every protagonist update inside the
/// adversarial solver appends a K-step record, every scaling update a D-step
/// record. gamma_est is the model-free level estimate in force;
/// mu_bar_exact is the true achieved upper bound when a verification hook
/// is installed (NaN otherwise), held constant between solver completions.
struct TraceRecord {
  int k_update_index = 0;
  Phase phase = Phase::k_step;
  double gamma_est = std::numeric_limits<double>::quiet_NaN();
  double mu_bar_exact = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd d;
  Eigen::MatrixXd K;
};

struct SynthesisTrace {
  std::vector<TraceRecord> records;

  int k_update_count() const {
    int n = 0;
    for (const auto& r : records) n += r.phase == Phase::k_step ? 1 : 0;
    return n;
  }

  void validate() const {
    int prev = -1;
    for (const auto& r : records) {
      if (r.k_update_index <= prev) throw Error("SynthesisTrace: indices must increase");
      prev = r.k_update_index;
    }
  }
};

/// Collects records during a run. The optional hook evaluates the exact
/// scaled closed-loop norm (model knowledge lives with the harness, never
/// with the synthesis path); its value is re-evaluated at segment
/// boundaries, matching how the achieved upper bound is only re-determined
/// after a solver completes.
class TraceRecorder {
 public:
  using ExactHook = std::function<double(const lti::Gain&, const lti::DScaling&)>;

  explicit TraceRecorder(ExactHook hook = {}) : hook_(std::move(hook)) {}

  void begin_k_segment(double gamma_est, const lti::Gain& K, const lti::DScaling& D) {
    held_gamma_ = gamma_est;
    held_mu_ = hook_ ? hook_(K, D) : std::numeric_limits<double>::quiet_NaN();
  }

  void on_k_update(const lti::Gain& K, const lti::DScaling& D) {
    trace_.records.push_back(
        {next_index_++, Phase::k_step, held_gamma_, held_mu_, D.log_params(), K.K});
  }

  void on_d_step(double gamma_est, const lti::Gain& K, const lti::DScaling& D) {
    held_gamma_ = gamma_est;
    held_mu_ = hook_ ? hook_(K, D) : std::numeric_limits<double>::quiet_NaN();
    trace_.records.push_back(
        {next_index_++, Phase::d_step, held_gamma_, held_mu_, D.log_params(), K.K});
  }

  const SynthesisTrace& trace() const { return trace_; }
  SynthesisTrace take() { return std::move(trace_); }

 private:
  ExactHook hook_;
  SynthesisTrace trace_;
  int next_index_ = 0;
  double held_gamma_ = std::numeric_limits<double>::quiet_NaN();
  double held_mu_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace musyn::dk
