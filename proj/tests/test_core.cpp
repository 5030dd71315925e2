#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>

#include "gcoh/core.hpp"
#include "gcoh/fock_oracle.hpp"
#include "gcoh/states.hpp"
#include "test_util.hpp"

using namespace gcoh;
using Catch::Approx;

TEST_CASE("is_physical basics", "[core]") {
  CHECK(is_physical(Eigen::Matrix2d::Identity()));
  CHECK_FALSE(is_physical(0.5 * Eigen::Matrix2d::Identity()));
  CHECK_FALSE(is_physical(-3.0 * Eigen::Matrix2d::Identity()));

  // Symmetric STS at the physicality boundary c = sqrt(a^2 - 1).
  const double a = 2.0;
  const double c = std::sqrt(a * a - 1.0);
  CHECK(is_physical(normal_form_cov({a, a, c, -c})));
  CHECK_FALSE(is_physical(normal_form_cov({a, a, c + 1e-6, -(c + 1e-6)})));

  CHECK_THROWS_AS(is_physical(Eigen::MatrixXd::Identity(3, 3)), dimension_error);
  CHECK_THROWS_AS(is_physical(Eigen::MatrixXd::Identity(2, 4)), dimension_error);
  Eigen::Matrix2d asym;
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(is_physical(asym), dimension_error);
}

TEST_CASE("symplectic eigenvalues", "[core]") {
  SECTION("thermal") {
    const auto nu = symplectic_eigenvalues(3.0 * Eigen::MatrixXd::Identity(2, 2)).values;
    REQUIRE(nu.size() == 1);
    CHECK(nu[0] == Approx(3.0).epsilon(1e-12));
  }
  SECTION("pure squeezed vacuum") {
    const Eigen::Matrix2d cov = Eigen::Vector2d(std::exp(2.0), std::exp(-2.0)).asDiagonal();
    const auto nu = symplectic_eigenvalues(Eigen::MatrixXd(cov)).values;
    CHECK(nu[0] == Approx(1.0).margin(1e-10));
  }
  SECTION("twin beam is globally pure") {
    const GaussianState tb = normal_form_state(sts_from_physical_params(0.0, 1.0));
    const auto nu = symplectic_eigenvalues(tb).values;
    REQUIRE(nu.size() == 2);
    CHECK(nu[0] == Approx(1.0).margin(1e-9));
    CHECK(nu[1] == Approx(1.0).margin(1e-9));
  }
  SECTION("unphysical input rejected") {
    CHECK_THROWS_AS(symplectic_eigenvalues(0.3 * Eigen::MatrixXd::Identity(2, 2)),
                    validity_error);
  }
}

TEST_CASE("von Neumann entropy", "[core]") {
  CHECK(von_neumann_entropy(GaussianState::thermal(1.0)) ==
        Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(von_neumann_entropy(GaussianState::vacuum(2)) == Approx(0.0).margin(1e-12));

  // Marginal of the r=1 twin beam: thermal with nu = cosh 2. Cross-checked
  // against the truncated-Fock oracle at cutoff 200.
  const GaussianState tb = normal_form_state(sts_from_physical_params(0.0, 1.0));
  const GaussianState marginal = partial_trace(tb, {0});
  const double s_formula = von_neumann_entropy(marginal);
  CHECK(s_formula == Approx(1.6198220928977023).epsilon(1e-10));

  const Eigen::MatrixXcd rho = fock_oracle_density_matrix(marginal, 200);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  double s_oracle = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 1e-300) s_oracle -= p * std::log(p);
  }
  CHECK(s_formula == Approx(s_oracle).margin(1e-8));
}

TEST_CASE("partial trace", "[core]") {
  SECTION("product of thermals") {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(4, 4);
    cov.block<2, 2>(0, 0) = 3.0 * Eigen::Matrix2d::Identity();
    cov.block<2, 2>(2, 2) = 7.0 * Eigen::Matrix2d::Identity();
    const GaussianState prod(Eigen::Vector4d::Zero(), cov);
    const GaussianState kept = partial_trace(prod, {1});
    CHECK((kept.cov() - 7.0 * Eigen::Matrix2d::Identity()).norm() ==
          Approx(0.0).margin(1e-14));
  }
  SECTION("STS marginals are thermal") {
    const GaussianState sts = normal_form_state(sts_from_physical_params(1.0, 0.7));
    const GaussianState ma = partial_trace(sts, {0});
    const double a = sts.cov()(0, 0);
    CHECK((ma.cov() - a * Eigen::Matrix2d::Identity()).norm() ==
          Approx(0.0).margin(1e-14));
  }
  SECTION("interlinked BC blocks survive") {
    const GaussianState tri = interlinked_three_mode({1.0, 2.0});
    const GaussianState bc = partial_trace(tri, {1, 2});
    CHECK((bc.cov_block(0, 0) - tri.cov_block(1, 1)).norm() == Approx(0.0).margin(1e-14));
    CHECK((bc.cov_block(1, 1) - tri.cov_block(2, 2)).norm() == Approx(0.0).margin(1e-14));
    CHECK((bc.cov_block(0, 1) - tri.cov_block(1, 2)).norm() == Approx(0.0).margin(1e-14));
  }
  SECTION("bad index sets") {
    const GaussianState v = GaussianState::vacuum(2);
    CHECK_THROWS_AS(partial_trace(v, {}), dimension_error);
    CHECK_THROWS_AS(partial_trace(v, {2}), dimension_error);
    CHECK_THROWS_AS(partial_trace(v, {0, 0}), dimension_error);
  }
}

TEST_CASE("mean photon number", "[core]") {
  CHECK(mean_photon_number(GaussianState::vacuum(1)) == Approx(0.0).margin(1e-14));
  const GaussianState displaced(Eigen::Vector2d(1.0, 1.0), Eigen::Matrix2d::Identity());
  CHECK(mean_photon_number(displaced) == Approx(1.0).epsilon(1e-12));
  CHECK(mean_photon_number(GaussianState::thermal(2.5)) == Approx(2.5).epsilon(1e-12));

  const GaussianState tri = interlinked_three_mode({1.0, 2.0});
  const Eigen::VectorXd nbars = mean_photon_numbers(tri);
  CHECK(nbars(0) == Approx(3.0).epsilon(1e-12));
  CHECK(nbars(1) == Approx(1.0).epsilon(1e-12));
  CHECK(nbars(2) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("PPT separability", "[core]") {
  CHECK_FALSE(is_separable_ppt(normal_form_state({2.0, 2.0, 1.5, -1.5})));
  CHECK(is_separable_ppt(normal_form_state({2.0, 2.0, 0.9, -0.9})));
  // MTS are always separable.
  Rng rng(11);
  for (int i = 0; i < 50; ++i) {
    const NormalFormParams p = sample_normal_form(rng, 1.0, 4.0, NormalFormClass::mts);
    CHECK(is_separable_ppt(normal_form_state(p)));
  }
  CHECK_THROWS_AS(is_separable_ppt(GaussianState::vacuum(1)), dimension_error);
}

TEST_CASE("PPT agrees with the analytic symmetric-STS threshold", "[core]") {
  for (double a : {1.2, 1.7, 2.5, 4.0}) {
    const double c_sep = a - 1.0;
    const double c_phys = std::sqrt(a * a - 1.0);
    for (double c = 0.0; c < c_phys - 1e-7; c += c_phys / 37.0) {
      const bool sep = is_separable_ppt(normal_form_state({a, a, c, -c}));
      if (std::abs(c - c_sep) > 1e-9) CHECK(sep == (c < c_sep));
    }
  }
}

TEST_CASE("entropy of random physical states", "[core]") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const int n_modes = 1 + static_cast<int>(rng.raw() % 3);
    const GaussianState state = testutil::random_state(rng, n_modes);
    const double s = von_neumann_entropy(state);
    CHECK(s >= 0.0);
    const auto nu = symplectic_eigenvalues(state).values;
    const bool pure = nu.back() <= 1.0 + 1e-8;
    if (pure) CHECK(s < 1e-6);
    if (s == 0.0) CHECK(pure);
    if (n_modes > 1) {
      const GaussianState marg = partial_trace(state, {0});
      CHECK(is_physical(marg.cov()));
    }
  }
}

TEST_CASE("h is increasing and concave", "[core]") {
  const double dx = 1e-4;
  double prev_slope = std::numeric_limits<double>::infinity();
  for (double x = 1.0; x <= 100.0; x += 0.5) {
    const double slope = (entropy_h(x + dx) - entropy_h(x)) / dx;
    CHECK(slope > 0.0);
    CHECK(slope <= prev_slope + 1e-9);
    prev_slope = slope;
  }
  CHECK(entropy_h(1.0) == 0.0);
  CHECK(entropy_h(1.0 + 1e-13) == 0.0);
}

TEST_CASE("state construction validates", "[core]") {
  CHECK_THROWS_AS(GaussianState(Eigen::Vector2d::Zero(), 0.2 * Eigen::Matrix2d::Identity()),
                  validity_error);
  CHECK_THROWS_AS(GaussianState(Eigen::Vector3d::Zero(),
                                Eigen::MatrixXd(Eigen::Matrix2d::Identity())),
                  dimension_error);
  CHECK_THROWS_AS(GaussianState::thermal(-0.5), validity_error);
}
