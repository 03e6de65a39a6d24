#include <catch2/catch_amalgamated.hpp>

#include "preview_gain/spd.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace preview_gain;
using pgtest::rel_err;
using pgtest::Rng;

TEST_CASE("riemannian distance identities") {
  const MatrixXd i2 = MatrixXd::Identity(2, 2);
  CHECK(riemannian_distance(i2, i2) == Catch::Approx(0.0).margin(1e-14));
  CHECK(riemannian_distance(2.0 * i2, i2) ==
        Catch::Approx(std::sqrt(2.0) * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("riemannian distance: symmetry and inverse invariance") {
  Rng rng(101);
  for (int c = 0; c < 200; ++c) {
    const MatrixXd x = pgtest::random_spd(4, rng);
    const MatrixXd p = pgtest::random_spd(4, rng);
    const double d_xp = riemannian_distance(x, p);
    CHECK(rel_err(d_xp, riemannian_distance(p, x)) < 1e-10);
    CHECK(rel_err(d_xp, riemannian_distance(spd_inverse(x), spd_inverse(p))) < 1e-8);
    // Independent eigen route through P^{-1/2} X P^{-1/2}.
    CHECK(rel_err(d_xp, pgtest::riemannian_distance_bruteforce(x, p)) < 1e-9);
  }
}

TEST_CASE("riemannian distance: congruence invariance") {
  Rng rng(102);
  for (int c = 0; c < 200; ++c) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 5);  // up to 6
    const MatrixXd x = pgtest::random_spd(n, rng);
    const MatrixXd p = pgtest::random_spd(n, rng);
    const MatrixXd m = pgtest::random_near_identity(n, rng, 0.8);
    const double lhs = riemannian_distance(m.transpose() * x * m, m.transpose() * p * m);
    CHECK(rel_err(lhs, riemannian_distance(x, p)) < 1e-8);
  }
}

TEST_CASE("riemannian distance: triangle inequality") {
  Rng rng(103);
  for (int c = 0; c < 200; ++c) {
    const MatrixXd x = pgtest::random_spd(3, rng);
    const MatrixXd y = pgtest::random_spd(3, rng);
    const MatrixXd z = pgtest::random_spd(3, rng);
    CHECK(riemannian_distance(x, z) <=
          riemannian_distance(x, y) + riemannian_distance(y, z) + 1e-10);
  }
}

TEST_CASE("riemannian distance: ordered arguments have spectra above one") {
  Rng rng(104);
  for (int c = 0; c < 100; ++c) {
    const MatrixXd p = pgtest::random_spd(3, rng);
    const MatrixXd x = p + pgtest::random_spd(3, rng, 0.05, 0.5);
    Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> es(x, p);
    CHECK(es.eigenvalues().minCoeff() > 1.0);
    const MatrixXd xs = spd_sqrt(x);
    const double lmax = lambda_max(xs * spd_inverse(p) * xs);
    CHECK(riemannian_distance(x, p) >= std::log(lmax) - 1e-10);
  }
}

TEST_CASE("ordering_lt") {
  const MatrixXd i2 = MatrixXd::Identity(2, 2);
  CHECK(ordering_lt(i2, 2.0 * i2));
  CHECK_FALSE(ordering_lt(i2, i2));
  CHECK_FALSE(ordering_lt(Eigen::Vector2d(1, 3).asDiagonal().toDenseMatrix(),
                          Eigen::Vector2d(2, 2).asDiagonal().toDenseMatrix()));
}

TEST_CASE("spd kernels") {
  const MatrixXd i3 = MatrixXd::Identity(3, 3);
  CHECK(rel_err(spd_sqrt(4.0 * i3), 2.0 * i3) < 1e-13);

  Rng rng(105);
  for (int c = 0; c < 50; ++c) {
    const MatrixXd x = pgtest::random_spd(4, rng);
    CHECK(rel_err(spd_inverse(spd_inverse(x)), x) < 1e-10);
    const MatrixXd b = pgtest::random_matrix(4, 2, rng);
    // Brute-force dense inverse as the reference.
    const MatrixXd ref = x.inverse() * b;
    CHECK((sym_solve(x, b) - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
    const MatrixXd s = spd_sqrt(x);
    CHECK(rel_err(s * s, x) < 1e-12);
  }
}

TEST_CASE("SpdMatrix validation") {
  MatrixXd asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(SpdMatrix(asym), std::invalid_argument);

  MatrixXd indef(2, 2);
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(SpdMatrix(indef), std::invalid_argument);
  CHECK_THROWS_AS(SpdMatrix(MatrixXd::Zero(2, 2)), std::invalid_argument);
  CHECK_NOTHROW(SpdMatrix(MatrixXd::Zero(2, 2), SpdMatrix::Cone::SemiPositive));

  const SpdMatrix x(2.0 * MatrixXd::Identity(3, 3));
  CHECK(x.eig_min() == Catch::Approx(2.0));
  CHECK(x.eig_max() == Catch::Approx(2.0));

  // Mild asymmetry within tolerance is symmetrized away.
  MatrixXd drift = 2.0 * MatrixXd::Identity(2, 2);
  drift(0, 1) = 1e-12;
  const SpdMatrix y(drift);
  CHECK(y.matrix()(0, 1) == Catch::Approx(y.matrix()(1, 0)));

  CHECK_THROWS_AS(riemannian_distance(indef, MatrixXd::Identity(2, 2)),
                  std::invalid_argument);
}
