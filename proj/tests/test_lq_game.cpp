#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "musyn/game/cost.hpp"
#include "musyn/game/game_env.hpp"
#include "musyn/game/lspi.hpp"
#include "musyn/game/rarl.hpp"
#include "musyn/game/riccati.hpp"
#include "musyn/hinf/exact_norm.hpp"
#include "musyn/sim/simulator.hpp"
#include "support/oracles.hpp"

using namespace musyn;
using Catch::Approx;

namespace {

/// Plant realizing the game with cost x'Qx + u'Ru u (no cross terms) and
/// disturbance channels (w, d): e = (Q^1/2 x, Ru^1/2 u), v = 0.
lti::PartitionedPlant make_game_test_plant(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Bw,
                                           const Eigen::MatrixXd& Bd, const Eigen::MatrixXd& Bu,
                                           const Eigen::MatrixXd& Q, const Eigen::MatrixXd& R) {
  const Eigen::Index n = A.rows();
  const Eigen::Index mu = Bu.cols();
  const Eigen::Index mw = Bw.cols();
  Eigen::MatrixXd Ce(n + mu, n), Due(n + mu, mu);
  Ce << Eigen::MatrixXd(Q.llt().matrixU()), Eigen::MatrixXd::Zero(mu, n);
  Due << Eigen::MatrixXd::Zero(n, mu), Eigen::MatrixXd(R.llt().matrixU());
  return lti::PartitionedPlant(A, Bw, Bd, Bu, Eigen::MatrixXd::Zero(mw, n), Ce,
                               Eigen::MatrixXd::Zero(mw, mu), Due);
}

/// Scalar benchmark game x+ = 0.9 x + u + h with Q = Ru = 1, Rv = gamma^2.
struct ScalarGame {
  lti::PartitionedPlant plant;
  ScalarGame()
      : plant(make_game_test_plant(0.9 * Eigen::MatrixXd::Ones(1, 1),
                                   Eigen::MatrixXd::Ones(1, 1),
                                   1e-12 * Eigen::MatrixXd::Ones(1, 1),
                                   Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                                   Eigen::MatrixXd::Ones(1, 1))) {}
};

}  // namespace

TEST_CASE("build_game_cost: case-study reduction") {
  // Cv = 0, Duv = I, Ce = [0; Q^1/2], Due = [R^1/2; 0]
  Rng rng(3);
  const Eigen::Index n = 3, mu = 2;
  Eigen::MatrixXd A = rng.gaussian_matrix(n, n);
  Eigen::MatrixXd B = rng.gaussian_matrix(n, mu);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd R = 0.1 * Eigen::MatrixXd::Identity(mu, mu);
  Eigen::MatrixXd Ce(mu + n, n), Due(mu + n, mu);
  Ce << Eigen::MatrixXd::Zero(mu, n), Eigen::MatrixXd(Q.llt().matrixU());
  Due << Eigen::MatrixXd(R.llt().matrixU()), Eigen::MatrixXd::Zero(n, mu);
  lti::PartitionedPlant G(A, B, B, B, Eigen::MatrixXd::Zero(mu, n), Ce,
                          Eigen::MatrixXd::Identity(mu, mu), Due);

  Eigen::VectorXd d(2);
  d << 0.3, -0.45;
  const lti::DScaling D(d);
  const double gamma = 1.7;
  auto cost = game::build_game_cost(G, D, gamma);

  const Eigen::VectorXd d2 = D.diagonal().array().square().matrix();
  CHECK((cost.Q - Q).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((cost.Ru - (R + Eigen::MatrixXd(d2.asDiagonal()))).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(cost.N_cross.cwiseAbs().maxCoeff() < 1e-14);
  Eigen::MatrixXd Rv_expect = Eigen::MatrixXd::Zero(4, 4);
  Rv_expect.topLeftCorner(2, 2) = (gamma * gamma * d2).asDiagonal();
  Rv_expect.bottomRightCorner(2, 2) = gamma * gamma * Eigen::MatrixXd::Identity(2, 2);
  CHECK((cost.Rv - Rv_expect).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("build_game_cost: degenerate cost rejected") {
  Rng rng(13);
  const Eigen::Index n = 2;
  // Duv = 0 and Due = 0 leave Ru = 0, which is not a valid game
  lti::PartitionedPlant G(0.5 * Eigen::MatrixXd::Identity(n, n), rng.gaussian_matrix(n, 1),
                          rng.gaussian_matrix(n, 1), rng.gaussian_matrix(n, 1),
                          rng.gaussian_matrix(1, n), rng.gaussian_matrix(2, n),
                          Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Zero(2, 1));
  CHECK_THROWS_AS(game::build_game_cost(G, lti::DScaling::identity(1), 1.0), Error);
}

TEST_CASE("build_game_cost: matrix and signal stage costs agree along trajectories") {
  Rng rng(23);
  auto G = oracles::random_plant(rng, 3, 2, 2, 2, 3, 0.7);
  Eigen::VectorXd dlog(2);
  dlog << 0.25, -0.6;
  const lti::DScaling D(dlog);
  const double gamma = 2.3;
  auto cost = game::build_game_cost(G, D, gamma);

  sim::Simulator s(G, 11);
  const int T = 100;
  Eigen::MatrixXd u = rng.gaussian_matrix(2, T);
  Eigen::MatrixXd w_raw = rng.gaussian_matrix(2, T);
  Eigen::MatrixXd dd = rng.gaussian_matrix(2, T);
  auto traj = s.rollout(u, w_raw, dd, Eigen::VectorXd::Zero(3));

  for (int k = 0; k < T; ++k) {
    Eigen::VectorXd h(4);
    h.head(2) = D.diagonal().cwiseProduct(w_raw.col(k));  // scaled channel w~ = D w
    h.tail(2) = dd.col(k);
    const double via_matrices = game::stage_cost(cost, traj.x.col(k), u.col(k), h);
    const double via_signals =
        game::stage_cost_signals(gamma, D, traj.v.col(k), traj.e.col(k), h);
    CHECK(via_matrices == Approx(via_signals).epsilon(1e-10).margin(1e-10));
  }
}

TEST_CASE("dare_solve: scalar closed form") {
  // A = 1.1, B = Q = R = 1: P^2 - 1.21 P - 1 = 0
  Eigen::MatrixXd A(1, 1), B(1, 1), Q(1, 1), R(1, 1);
  A << 1.1;
  B << 1;
  Q << 1;
  R << 1;
  const double P_expect = (1.21 + std::sqrt(1.21 * 1.21 + 4.0)) / 2.0;
  const Eigen::MatrixXd P = game::dare_solve(A, B, Q, R);
  CHECK(P(0, 0) == Approx(P_expect).epsilon(1e-10));
  auto K = game::lqr_gain(A, B, Q, R);
  CHECK(K.K(0, 0) == Approx(1.1 * P_expect / (1.0 + P_expect)).epsilon(1e-10));
  CHECK(std::abs(1.1 - K.K(0, 0)) < 1.0);  // closed loop stable
}

TEST_CASE("lstdq_fit: zero-dynamics case against a closed-form Bellman oracle") {
  // x+ = u (A = 0, B = I), cost x'x + u'u, evaluated policy u = -F x.
  // Policy value P solves P = Q + F'F + F'PF; the Q-function is then
  // H = [[Q, 0], [0, R + P]]. For F = 0 this gives H = diag(I, 2I).
  const Eigen::Index n = 2;
  Rng rng(33);
  const Eigen::MatrixXd F = Eigen::MatrixXd::Zero(n, n);

  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < 200; ++i)
    P = Eigen::MatrixXd::Identity(n, n) + F.transpose() * F + F.transpose() * P * F;

  game::GameDataset data;
  const int ns = 60;
  data.x = rng.gaussian_matrix(n, ns);
  data.a = rng.gaussian_matrix(n, ns);
  data.x_next = data.a;  // B = I
  data.cost.resize(ns);
  for (int k = 0; k < ns; ++k)
    data.cost[k] = data.x.col(k).squaredNorm() + data.a.col(k).squaredNorm();

  auto qf = game::lstdq_fit(data, F, 0.0);
  Eigen::MatrixXd H_expect = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  H_expect.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  H_expect.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n) + P;
  CHECK((qf.H - H_expect).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("lstdq_fit: insufficient excitation is reported") {
  game::GameDataset data;
  const int ns = 50;
  data.x = Eigen::MatrixXd::Ones(2, ns);  // constant samples: rank deficient
  data.a = Eigen::MatrixXd::Ones(1, ns);
  data.x_next = Eigen::MatrixXd::Ones(2, ns);
  data.cost = Eigen::VectorXd::Ones(ns);
  CHECK_THROWS_AS(game::lstdq_fit(data, Eigen::MatrixXd::Zero(1, 2), 1e-8),
                  InsufficientExcitationError);
}

TEST_CASE("policy_improve: fixed cases") {
  game::QFunctionParams qf;
  qf.state_dim = 2;
  qf.action_dim = 2;
  qf.H = Eigen::MatrixXd::Identity(4, 4);
  CHECK(game::policy_improve(qf).K.cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-15));

  game::QFunctionParams scalar;
  scalar.state_dim = 1;
  scalar.action_dim = 1;
  scalar.H.resize(2, 2);
  scalar.H << 2, 1, 1, 1;
  CHECK(game::policy_improve(scalar).K(0, 0) == Approx(1.0).epsilon(1e-12));

  game::QFunctionParams bad = scalar;
  bad.H(1, 1) = -1.0;  // wrong-sign action block: level infeasible
  CHECK_THROWS_AS(game::policy_improve(bad), GammaInfeasibleError);
}

TEST_CASE("GameEnv sampling is deterministic in the seed") {
  ScalarGame g;
  sim::Simulator s(g.plant, 7);
  game::GameEnv env(s, lti::DScaling::identity(1), 2.0);
  game::GameSamplingConfig cfg;
  cfg.rollouts = 3;
  cfg.horizon = 50;
  auto d1 = env.sample(game::Player::adversary, lti::Gain::zero(1, 1), lti::Gain::zero(2, 1),
                       cfg, 99);
  auto d2 = env.sample(game::Player::adversary, lti::Gain::zero(1, 1), lti::Gain::zero(2, 1),
                       cfg, 99);
  CHECK((d1.x.array() == d2.x.array()).all());
  CHECK((d1.a.array() == d2.a.array()).all());
  CHECK((d1.cost.array() == d2.cost.array()).all());

  auto fit1 = game::lstdq_fit(d1, Eigen::MatrixXd::Zero(2, 1));
  auto fit2 = game::lstdq_fit(d2, Eigen::MatrixXd::Zero(2, 1));
  CHECK((fit1.H.array() == fit2.H.array()).all());
}

TEST_CASE("inner loop: huge gamma drives the adversary to zero") {
  ScalarGame g;
  sim::Simulator s(g.plant, 17);
  game::GameEnv env(s, lti::DScaling::identity(1), 1e4);
  game::RarlConfig cfg;
  const lti::Gain K(0.5 * Eigen::MatrixXd::Ones(1, 1));
  auto L = game::inner_loop_maximize(env, K, cfg, 5);
  CHECK(L.K.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("inner loop: scalar indefinite Riccati closed form") {
  // x+ = 0.9x + u + h, Q = Ru = 1, Rv = gamma^2, K = 0.5 fixed
  const double gamma = 2.0, Abar = 0.4, Qk = 1.25, Rv = gamma * gamma;
  // max-player fixed point P = Qk + Abar^2 P + Abar^2 P^2/(Rv - P)  (oracle)
  double P = Qk;
  for (int i = 0; i < 100000; ++i) {
    const double Pn = Qk + Abar * Abar * P + Abar * Abar * P * P / (Rv - P);
    if (std::abs(Pn - P) < 1e-15) break;
    P = Pn;
  }
  REQUIRE(Rv - P > 0.0);
  const double L_expect = -Abar * P / (Rv - P);

  ScalarGame g;
  const auto cost = game::build_game_cost(g.plant, lti::DScaling::identity(1), gamma);
  const lti::Gain K(0.5 * Eigen::MatrixXd::Ones(1, 1));
  auto L_model = game::riccati_inner_max(g.plant.A, g.plant.Bu,
                                         game::game_input_matrix(g.plant, lti::DScaling::identity(1)),
                                         cost, K);
  // adversary acts on (w, d); the d channel is vestigial here (Bd ~ 0)
  CHECK(L_model.K(0, 0) == Approx(L_expect).epsilon(1e-8));

  sim::Simulator s(g.plant, 27);
  game::GameEnv env(s, lti::DScaling::identity(1), gamma);
  game::RarlConfig cfg;
  auto L_free = game::inner_loop_maximize(env, K, cfg, 7);
  CHECK(L_free.K(0, 0) == Approx(L_expect).margin(1e-5));
}

TEST_CASE("riccati_game_oracle: huge gamma decouples to plain LQR") {
  Rng rng(43);
  Eigen::MatrixXd A = rng.gaussian_matrix(2, 2);
  A *= 0.9 / lti::spectral_radius(A);
  Eigen::MatrixXd Bu = rng.gaussian_matrix(2, 1);
  auto G = make_game_test_plant(A, rng.gaussian_matrix(2, 1), rng.gaussian_matrix(2, 1), Bu,
                                Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Ones(1, 1));
  auto pair = game::riccati_game_oracle(G, lti::DScaling::identity(1), 1e5);
  auto K_lqr = game::lqr_gain(A, Bu, Eigen::MatrixXd::Identity(2, 2),
                              Eigen::MatrixXd::Ones(1, 1));
  CHECK((pair.K.K - K_lqr.K).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(pair.L_adv.K.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("riccati_game_oracle: infeasible level throws") {
  ScalarGame g;
  CHECK_THROWS_AS(game::riccati_game_oracle(g.plant, lti::DScaling::identity(1), 0.3),
                  GammaInfeasibleError);
}

TEST_CASE("riccati_game_oracle: saddle property under gain perturbations") {
  ScalarGame g;
  const double gamma = 2.5;
  auto cost = game::build_game_cost(g.plant, lti::DScaling::identity(1), gamma);
  const Eigen::MatrixXd Bh = game::game_input_matrix(g.plant, lti::DScaling::identity(1));
  auto pair = game::riccati_game_oracle(g.plant, lti::DScaling::identity(1), gamma, cost);

  const double J_star =
      game::game_policy_value(g.plant.A, g.plant.Bu, Bh, cost, pair.K, pair.L_adv);
  Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    lti::Gain K_pert(pair.K.K + 1e-2 * rng.gaussian_matrix(1, 1));
    lti::Gain L_pert(pair.L_adv.K + 1e-2 * rng.gaussian_matrix(2, 1));
    const double J_KL =
        game::game_policy_value(g.plant.A, g.plant.Bu, Bh, cost, K_pert, pair.L_adv);
    const double J_LK =
        game::game_policy_value(g.plant.A, g.plant.Bu, Bh, cost, pair.K, L_pert);
    CHECK(J_KL >= J_star - 1e-9);  // K* is the minimizer against L*
    CHECK(J_LK <= J_star + 1e-9);  // L* is the maximizer against K*
  }
}

TEST_CASE("rarl_solve: huge gamma recovers the LQR gain") {
  ScalarGame g;
  sim::Simulator s(g.plant, 37);
  auto K_lqr = game::lqr_gain(g.plant.A, g.plant.Bu, Eigen::MatrixXd::Identity(1, 1),
                              Eigen::MatrixXd::Ones(1, 1));
  game::RarlConfig cfg;
  auto res = game::rarl_solve(1e4, lti::Gain::zero(1, 1), lti::DScaling::identity(1), s, cfg, 3);
  REQUIRE(res.converged);
  CHECK((res.K.K - K_lqr.K).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("rarl_solve: Nash gain is a fixed point and the output is admissible") {
  ScalarGame g;
  const double gamma = 2.0;
  auto pair = game::riccati_game_oracle(g.plant, lti::DScaling::identity(1), gamma);

  sim::Simulator s(g.plant, 47);
  game::RarlConfig cfg;
  auto res = game::rarl_solve(gamma, pair.K, lti::DScaling::identity(1), s, cfg, 9);
  REQUIRE(res.converged);
  CHECK((res.K.K - pair.K.K).cwiseAbs().maxCoeff() < 1e-5);

  // admissibility of the returned gain, checked with the exact oracle
  auto scaled = lti::scaled_closed_loop(g.plant, res.K, lti::DScaling::identity(1));
  CHECK(hinf::hinf_exact(scaled) <= gamma + 1e-6);
}

TEST_CASE("rarl_solve vs riccati_game_oracle on a MIMO game") {
  Rng rng(63);
  Eigen::MatrixXd A = rng.gaussian_matrix(2, 2);
  A *= 0.8 / lti::spectral_radius(A);
  Eigen::MatrixXd Bu = rng.gaussian_matrix(2, 2);
  auto G = make_game_test_plant(A, rng.gaussian_matrix(2, 1), rng.gaussian_matrix(2, 1), Bu,
                                Eigen::MatrixXd::Identity(2, 2),
                                0.5 * Eigen::MatrixXd::Identity(2, 2));

  // pick a comfortably feasible level: 1.5x the level of the LQR loop
  auto K0 = game::lqr_gain(A, Bu, Eigen::MatrixXd::Identity(2, 2),
                           0.5 * Eigen::MatrixXd::Identity(2, 2));
  const double level =
      1.5 * hinf::hinf_exact(lti::scaled_closed_loop(G, K0, lti::DScaling::identity(1)));
  auto pair = game::riccati_game_oracle(G, lti::DScaling::identity(1), level);

  sim::Simulator s(G, 57);
  game::RarlConfig cfg;
  auto res = game::rarl_solve(level, K0, lti::DScaling::identity(1), s, cfg, 21);
  REQUIRE(res.converged);
  CHECK((res.K.K - pair.K.K).cwiseAbs().maxCoeff() < 1e-3);
}
