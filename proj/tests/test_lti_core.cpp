#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "musyn/lti/plant.hpp"
#include "musyn/lti/plant_io.hpp"
#include "musyn/lti/state_space.hpp"
#include "support/oracles.hpp"

using namespace musyn;
using Catch::Approx;

namespace {

Eigen::MatrixXd spring_mass_Ac() {
  const double m1 = 1.0, m2 = 0.5, k = 1.0;
  Eigen::MatrixXd A(4, 4);
  A << 0, 0, 1, 0,  //
      0, 0, 0, 1,   //
      -k / m1, k / m1, 0, 0,  //
      k / m2, -k / m2, 0, 0;
  return A;
}

Eigen::MatrixXd spring_mass_Bc() {
  const double m1 = 1.0, m2 = 0.5;
  Eigen::MatrixXd B(4, 2);
  B << 0, 0, 0, 0, 1.0 / m1, 0, 0, 1.0 / m2;
  return B;
}

}  // namespace

TEST_CASE("zoh_discretize: integrator closed form") {
  Eigen::MatrixXd Ac = Eigen::MatrixXd::Zero(1, 1);
  Eigen::MatrixXd Bc = Eigen::MatrixXd::Ones(1, 1);
  auto [Ad, Bd] = lti::zoh_discretize(Ac, Bc, 0.1);
  CHECK(Ad(0, 0) == Approx(1.0).margin(1e-15));
  CHECK(Bd(0, 0) == Approx(0.1).margin(1e-15));
}

TEST_CASE("zoh_discretize: scalar pole closed form and integration oracle") {
  const double a = 0.7, ts = 0.1;
  Eigen::MatrixXd Ac(1, 1), Bc(1, 1);
  Ac << a;
  Bc << 1.0;
  auto [Ad, Bd] = lti::zoh_discretize(Ac, Bc, ts);
  CHECK(Ad(0, 0) == Approx(std::exp(a * ts)).epsilon(1e-13));
  CHECK(Bd(0, 0) == Approx((std::exp(a * ts) - 1.0) / a).epsilon(1e-13));

  auto [Ad2, Bd2] = oracles::zoh_rk4(Ac, Bc, ts);
  CHECK(Ad(0, 0) == Approx(Ad2(0, 0)).epsilon(1e-12));
  CHECK(Bd(0, 0) == Approx(Bd2(0, 0)).epsilon(1e-12));
}

TEST_CASE("zoh_discretize: spring-mass plant against independent oracles") {
  const Eigen::MatrixXd Ac = spring_mass_Ac();
  const Eigen::MatrixXd Bc = spring_mass_Bc();
  REQUIRE(Ac(2, 0) == Approx(-1.0));
  REQUIRE(Ac(3, 0) == Approx(2.0));

  auto [Ad, Bd] = lti::zoh_discretize(Ac, Bc, 0.1);
  auto [At, Bt] = oracles::zoh_taylor(Ac, Bc, 0.1);
  CHECK((Ad - At).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((Bd - Bt).cwiseAbs().maxCoeff() < 1e-12);

  auto [Ar, Br] = oracles::zoh_rk4(Ac, Bc, 0.1);
  CHECK((Ad - Ar).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((Bd - Br).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("zoh_discretize: half-step composition property") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd Ac = rng.gaussian_matrix(4, 4);
    Eigen::MatrixXd Bc = rng.gaussian_matrix(4, 2);
    auto [Ad, Bd] = lti::zoh_discretize(Ac, Bc, 0.2);
    auto [Ah, Bh] = lti::zoh_discretize(Ac, Bc, 0.1);
    CHECK((Ah * Ah - Ad).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("zoh_discretize: rejects bad inputs") {
  Eigen::MatrixXd Ac = Eigen::MatrixXd::Zero(2, 2);
  Eigen::MatrixXd Bc = Eigen::MatrixXd::Zero(2, 1);
  CHECK_THROWS_AS(lti::zoh_discretize(Ac, Bc, 0.0), Error);
  CHECK_THROWS_AS(lti::zoh_discretize(Ac, Bc, -1.0), Error);
  Ac(0, 1) = std::nan("");
  CHECK_THROWS_AS(lti::zoh_discretize(Ac, Bc, 0.1), Error);
}

TEST_CASE("close_loop: zero gain leaves the open-loop map") {
  Rng rng(21);
  auto G = oracles::random_plant(rng, 3, 2, 1, 2, 2);
  auto cl = lti::close_loop(G, lti::Gain::zero(2, 3));
  CHECK(cl.A.isApprox(G.A));
  CHECK(cl.B.leftCols(2).isApprox(G.Bw));
  CHECK(cl.B.rightCols(1).isApprox(G.Bd));
  CHECK(cl.C.topRows(2).isApprox(G.Cv));
  CHECK(cl.C.bottomRows(2).isApprox(G.Ce));
  CHECK(cl.Dff.isZero());
}

TEST_CASE("close_loop: scalar deadbeat") {
  Eigen::MatrixXd A(1, 1), one(1, 1), zero(1, 1);
  A << 0.5;
  one << 1.0;
  zero << 0.0;
  lti::PartitionedPlant G(A, zero, one, one, zero, one, zero, zero);
  lti::Gain K(0.5 * Eigen::MatrixXd::Ones(1, 1));
  auto cl = lti::close_loop(G, K);
  CHECK(cl.A(0, 0) == Approx(0.0).margin(1e-15));
  CHECK(lti::spectral_radius(cl.A) == Approx(0.0).margin(1e-15));
}

TEST_CASE("close_loop: spectral radius agrees with direct eigenvalues") {
  Rng rng(31);
  for (int trial = 0; trial < 8; ++trial) {
    auto G = oracles::random_plant(rng, 4, 2, 2, 2, 3);
    lti::Gain K(0.3 * rng.gaussian_matrix(2, 4));
    auto cl = lti::close_loop(G, K);
    const double direct = lti::spectral_radius(G.A - G.Bu * K.K);
    CHECK(lti::spectral_radius(cl.A) == Approx(direct).margin(1e-12));
  }
}

TEST_CASE("close_loop: dimension mismatch rejected") {
  Rng rng(41);
  auto G = oracles::random_plant(rng, 3, 2, 1, 2, 2);
  CHECK_THROWS_AS(lti::close_loop(G, lti::Gain::zero(2, 4)), DimensionError);
  CHECK_THROWS_AS(lti::close_loop(G, lti::Gain::zero(1, 3)), DimensionError);
}

TEST_CASE("apply_d_scaling: identity scaling is bit-exact") {
  Rng rng(51);
  auto ss = oracles::random_stable_ss(rng, 4, 3, 3);
  auto out = lti::apply_d_scaling(ss, lti::DScaling::identity(2));
  CHECK((out.A.array() == ss.A.array()).all());
  CHECK((out.B.array() == ss.B.array()).all());
  CHECK((out.C.array() == ss.C.array()).all());
  CHECK((out.Dff.array() == ss.Dff.array()).all());
}

TEST_CASE("apply_d_scaling: inverse scaling recovers the system") {
  Rng rng(61);
  auto ss = oracles::random_stable_ss(rng, 4, 3, 3);
  Eigen::VectorXd d(2);
  d << 0.37, -1.2;
  auto once = lti::apply_d_scaling(ss, lti::DScaling(d));
  auto back = lti::apply_d_scaling(once, lti::DScaling(-d));
  CHECK((back.B - ss.B).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.C - ss.C).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((back.Dff - ss.Dff).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((once.A.array() == ss.A.array()).all());  // state matrix untouched
}

TEST_CASE("apply_d_scaling: d->e sub-block is untouched") {
  Rng rng(71);
  auto G = oracles::random_plant(rng, 3, 2, 2, 2, 2, 0.7);
  auto cl = lti::close_loop(G, lti::Gain::zero(2, 3));
  Eigen::VectorXd d(2);
  d << 0.5, -0.25;
  auto scaled = lti::apply_d_scaling(cl, lti::DScaling(d));
  // rows for e and columns for d lie outside the uncertainty channel
  CHECK((scaled.B.rightCols(2).array() == cl.B.rightCols(2).array()).all());
  CHECK((scaled.C.bottomRows(2).array() == cl.C.bottomRows(2).array()).all());
}

TEST_CASE("spectral_radius: fixed cases and characteristic-polynomial oracle") {
  CHECK(lti::spectral_radius(Eigen::MatrixXd::Zero(3, 3)) == Approx(0.0).margin(1e-15));
  Eigen::MatrixXd D = Eigen::Vector2d(0.3, -0.9).asDiagonal();
  CHECK(lti::spectral_radius(D) == Approx(0.9));

  const double r = 0.83, phi = 0.77;
  Eigen::Matrix2d R;
  R << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  Eigen::Matrix2d A = r * R;
  CHECK(lti::spectral_radius(A) == Approx(r).epsilon(1e-12));
  CHECK(lti::spectral_radius(A) == Approx(oracles::spectral_radius_2x2_charpoly(A)).epsilon(1e-12));
}

TEST_CASE("dlyap: residual check") {
  Rng rng(81);
  auto ss = oracles::random_stable_ss(rng, 4, 1, 1, 0.8);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(4, 4);
  Eigen::MatrixXd X = lti::dlyap(ss.A, Q);
  CHECK((X - ss.A.transpose() * X * ss.A - Q).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("plant JSON round trip") {
  Rng rng(91);
  auto G = oracles::random_plant(rng, 3, 2, 1, 2, 2);
  auto j = lti::plant_to_json(G, 0.1);
  auto back = lti::plant_from_json(j);
  CHECK(back.plant.A.isApprox(G.A, 1e-15));
  CHECK(back.plant.Bw.isApprox(G.Bw, 1e-15));
  CHECK(back.plant.Due.isApprox(G.Due, 1e-15));
  REQUIRE(back.ts.has_value());
  CHECK(*back.ts == Approx(0.1));
}

TEST_CASE("plant JSON validation") {
  Rng rng(101);
  auto G = oracles::random_plant(rng, 3, 2, 1, 2, 2);
  auto j = lti::plant_to_json(G);

  auto missing = j;
  missing.erase("Bu");
  CHECK_THROWS_AS(lti::plant_from_json(missing), ParseError);

  auto unknown = j;
  unknown["Dwe"] = lti::plant_to_json(G)["Bw"];  // disturbance feedthrough must not exist
  CHECK_THROWS_AS(lti::plant_from_json(unknown), ParseError);

  auto ragged = j;
  ragged["A"][1].erase(2);
  CHECK_THROWS_AS(lti::plant_from_json(ragged), ParseError);

  auto bad_ts = j;
  bad_ts["ts"] = -0.5;
  CHECK_THROWS_AS(lti::plant_from_json(bad_ts), ParseError);

  auto non_square = j;
  non_square["Cv"] = nlohmann::json::array({{1.0, 0.0, 0.0}});  // mv != mw
  CHECK_THROWS_AS(lti::plant_from_json(non_square), DimensionError);
}
