#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>

#include "json.hpp"
#include "musyn/bench/model_based.hpp"
#include "musyn/bench/spring_mass.hpp"
#include "musyn/dk/driver.hpp"
#include "musyn/dk/trace_io.hpp"
#include "musyn/sim/simulator.hpp"
#include "musyn/util/matrix_json.hpp"

namespace musyn::bench {

/// Full configuration of one synthesis run. Defaults reproduce the
/// spring-mass study: five DK rounds, window 100, level padding 1e-1 on the
/// first recentering and 5e-3 afterwards.
struct CaseStudyConfig {
  int n_rounds = 5;
  std::uint64_t seed = 7;
  dk::KminConfig kmin;
  dk::DminConfig dmin;
  game::RarlConfig rarl;
  bool with_exact = true;  // model-based baseline + exact trace enrichment

  CaseStudyConfig() {
    kmin.hinf.n_win = 100;
    dmin.hinf.n_win = 100;
    dmin.noise_floor = 1e-3;  // model-free evaluations carry estimator noise
  }
};

struct CaseStudyResult {
  dk::DkResult dk;
  lti::Gain K_init;
  double mu_init = std::numeric_limits<double>::quiet_NaN();        // Gamma(K_init, I)
  double mu_model_free = std::numeric_limits<double>::quiet_NaN();  // Gamma(K, D) final
  std::optional<ModelBasedDkResult> baseline;
  double ratio = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
};

/// Runs the model-free pipeline on a plant (and, when exact verification is
/// on, the model-based baseline for comparison). The synthesis path only
/// ever touches the Simulator; the plant itself feeds the oracles.
inline CaseStudyResult run_case_study(const lti::PartitionedPlant& G,
                                      const CaseStudyConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  CaseStudyResult res;
  res.K_init = initial_controller(G);

  sim::Simulator sim(G, cfg.seed);
  dk::TraceRecorder::ExactHook hook;
  if (cfg.with_exact) {
    hook = [&G](const lti::Gain& K, const lti::DScaling& D) {
      return hinf::hinf_exact(lti::scaled_closed_loop(G, K, D));
    };
    res.mu_init =
        hinf::hinf_exact(lti::scaled_closed_loop(G, res.K_init, lti::DScaling::identity(G.mw())));
  }

  res.dk = dk::dk_iterate(res.K_init, cfg.n_rounds, cfg.kmin, cfg.dmin, cfg.rarl, sim,
                          cfg.seed, hook);

  if (cfg.with_exact) {
    res.mu_model_free = hinf::hinf_exact(lti::scaled_closed_loop(G, res.dk.K, res.dk.D));
    if (cfg.n_rounds > 0 && res.dk.completed) {
      res.baseline = model_based_dk(G, cfg.n_rounds, res.K_init, cfg.dmin);
      res.ratio = res.mu_model_free / res.baseline->mu_per_round.back();
    }
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

inline nlohmann::json summary_to_json(const CaseStudyResult& res, const CaseStudyConfig& cfg) {
  nlohmann::json j;
  j["seed"] = cfg.seed;
  j["rounds"] = cfg.n_rounds;
  j["completed"] = res.dk.completed;
  if (!res.dk.abort_reason.empty()) j["abort_reason"] = res.dk.abort_reason;
  j["k_updates"] = res.dk.trace.k_update_count();
  j["K_init"] = matrix_to_json(res.K_init.K);
  j["K_final"] = matrix_to_json(res.dk.K.K);
  nlohmann::json dv = nlohmann::json::array();
  for (Eigen::Index i = 0; i < res.dk.D.log_params().size(); ++i)
    dv.push_back(res.dk.D.log_params()[i]);
  j["d_final"] = dv;
  auto put = [&](const char* key, double v) {
    if (std::isfinite(v))
      j[key] = v;
    else
      j[key] = nullptr;
  };
  put("mu_init", res.mu_init);
  put("mu_model_free", res.mu_model_free);
  if (res.baseline) {
    j["mu_model_based"] = res.baseline->mu_per_round.back();
    j["gamma_nominal_model_based"] = res.baseline->gamma_first_kstep;
    put("ratio", res.ratio);
  }
  j["wall_seconds"] = res.wall_seconds;
  return j;
}

/// Writes trace.csv, trace.json, mu_trace.svg and summary.json.
inline void write_artifacts(const std::string& out_dir, const CaseStudyResult& res,
                            const CaseStudyConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
  dk::write_trace_csv(path("trace.csv"), res.dk.trace);
  dk::write_trace_json(path("trace.json"), res.dk.trace);
  std::optional<double> mb, nominal;
  if (res.baseline) {
    mb = res.baseline->mu_per_round.back();
    nominal = res.baseline->gamma_first_kstep;
  }
  dk::write_mu_svg(path("mu_trace.svg"), res.dk.trace, mb, nominal);
  std::ofstream out(path("summary.json"));
  if (!out) throw Error("case study: cannot write summary.json");
  out << summary_to_json(res, cfg).dump(1) << "\n";
}

}  // namespace musyn::bench
