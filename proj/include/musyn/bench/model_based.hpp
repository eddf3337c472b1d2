#pragma once

#include <Eigen/Dense>
#include <vector>

#include "musyn/dk/driver.hpp"
#include "musyn/dk/eval.hpp"
#include "musyn/game/cost.hpp"
#include "musyn/game/riccati.hpp"
#include "musyn/hinf/exact_norm.hpp"
#include "musyn/lti/plant.hpp"

namespace musyn::bench {

/// Whether the level gamma admits a state-feedback solution for the scaled
/// game (the game Riccati equation has a stabilizing saddle solution).
inline bool level_feasible(const lti::PartitionedPlant& G, const lti::DScaling& D,
                           double gamma) {
  try {
    game::solve_game_riccati(G.A, G.Bu, game::game_input_matrix(G, D),
                             game::build_game_cost(G, D, gamma));
    return true;
  } catch (const GammaInfeasibleError&) {
    return false;
  }
}

/// Minimal feasible level for a fixed scaling, by bisection. K_witness
/// provides the initial feasible upper end (its own achieved level).
inline double bisect_min_gamma(const lti::PartitionedPlant& G, const lti::DScaling& D,
                               const lti::Gain& K_witness, double rel_tol = 1e-6) {
  double hi = hinf::hinf_exact(lti::scaled_closed_loop(G, K_witness, D)) * (1.0 + 1e-3);
  for (int tries = 0; tries < 8 && !level_feasible(G, D, hi); ++tries) hi *= 1.4;
  if (!level_feasible(G, D, hi))
    throw GammaInfeasibleError("bisect_min_gamma: no feasible upper bracket");
  double lo = 0.0;
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (level_feasible(G, D, mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

struct ModelBasedDkResult {
  lti::Gain K;
  lti::DScaling D;
  std::vector<double> mu_per_round;   // achieved upper bound after each round
  double gamma_first_kstep = 0.0;     // minimal level at D = I (nominal synthesis)
};

/// Fully model-based DK-iteration, the comparison baseline: the K-step
/// drives the level to the bisection minimum and takes the central
/// controller there; the D-step runs the same central-difference descent
/// with exact norm evaluations.
inline ModelBasedDkResult model_based_dk(const lti::PartitionedPlant& G, int n_rounds,
                                         const lti::Gain& K_init,
                                         dk::DminConfig dcfg = {}) {
  dcfg.noise_floor = 0.0;  // exact evaluations: enforce strict descent
  ModelBasedDkResult out;
  out.K = K_init;
  out.D = lti::DScaling::identity(G.mw());
  for (int round = 0; round < n_rounds; ++round) {
    const double gamma_min = bisect_min_gamma(G, out.D, out.K);
    if (round == 0) out.gamma_first_kstep = gamma_min;
    out.K = game::riccati_game_oracle(G, out.D, gamma_min).K;

    auto dres = dk::approx_dmin(dk::make_exact_H(G, out.K), out.D.log_params(), dcfg);
    out.D = dres.D;
    out.mu_per_round.push_back(
        hinf::hinf_exact(lti::scaled_closed_loop(G, out.K, out.D)));
  }
  return out;
}

}  // namespace musyn::bench
