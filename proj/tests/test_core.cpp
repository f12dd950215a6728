#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "qrse/action_set.hpp"
#include "qrse/grid.hpp"
#include "qrse/probability.hpp"
#include "qrse/types.hpp"
#include "qrse/utility_model.hpp"

using namespace qrse;

TEST_CASE("log_sum_exp matches direct high-precision summation") {
  std::mt19937 rng(20240801);
  std::uniform_real_distribution<double> mag(-50.0, 50.0);
  for (int rep = 0; rep < 200; ++rep) {
    ArrayXd v(5);
    for (Index i = 0; i < v.size(); ++i) v[i] = mag(rng);
    oracle::Real z = 0;
    for (Index i = 0; i < v.size(); ++i) z += exp(oracle::Real(v[i]));
    const double expected = static_cast<double>(log(z));
    CHECK(log_sum_exp(v) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("log_sum_exp survives magnitudes that overflow naive exp") {
  ArrayXd v(3);
  v << 700.0, 699.0, -700.0;
  const double got = log_sum_exp(v);
  CHECK(std::isfinite(got));
  CHECK(got == doctest::Approx(700.0 + std::log(1.0 + std::exp(-1.0))).epsilon(1e-15));

  ArrayXd empty_mass(2);
  empty_mass << -kInf, -kInf;
  CHECK(log_sum_exp(empty_mass) == -kInf);
}

TEST_CASE("entropy uses the 0 log 0 = 0 convention") {
  ArrayXd p(3);
  p << 0.0, 1.0, 0.0;
  CHECK(entropy(p) == 0.0);
  p << 0.25, 0.5, 0.25;
  CHECK(entropy(p) ==
        doctest::Approx(-0.5 * std::log(0.5) - 0.5 * std::log(0.25)).epsilon(1e-15));
  CHECK(entropy(uniform_probabilities(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
}

TEST_CASE("probability vector validation") {
  CHECK(uniform_probabilities(3).sum() == doctest::Approx(1.0).epsilon(1e-15));

  ArrayXd neg(2);
  neg << -0.1, 1.1;
  CHECK_THROWS_AS(validate_probability_vector(neg), NegativeEntry);

  ArrayXd off(2);
  off << 0.5, 0.5 + 1e-9;
  CHECK_THROWS_AS(validate_probability_vector(off), NotNormalized);

  ArrayXd near(2);
  near << 0.5, 0.5 + 1e-13;
  CHECK_NOTHROW(validate_probability_vector(near));
}

TEST_CASE("action sets") {
  const ActionSet binary = ActionSet::binary();
  CHECK(binary.size() == 2);
  CHECK(binary.label(0) == "buy");
  CHECK(binary.label(1) == "sell");
  CHECK(binary.index_of("sell") == 1);
  CHECK_THROWS_AS(binary.label(2), UnknownAction);
  CHECK_THROWS_AS(binary.index_of("hold"), UnknownAction);

  const ActionSet ternary = ActionSet::ternary();
  CHECK(ternary.size() == 3);
  CHECK(ternary.label(1) == "hold");

  CHECK_THROWS_AS(ActionSet({"a"}), Error);
  CHECK_THROWS_AS(ActionSet({"a", "a"}), Error);
  CHECK_THROWS_AS(ActionSet({"a", ""}), Error);
}

TEST_CASE("binary linear utility is antisymmetric about mu") {
  const UtilityModel u = UtilityModel::binary_linear(0.0);
  CHECK(u(1, 2.0) == -2.0);
  CHECK(u(0, 2.0) == 2.0);

  const UtilityModel shifted = UtilityModel::binary_linear(0.5);
  for (double x : {-1.0, 0.0, 0.5, 2.0}) {
    CHECK(shifted(0, x) == doctest::Approx(-(shifted(1, x))).epsilon(1e-15));
    CHECK(shifted(0, x) == doctest::Approx(x - 0.5).epsilon(1e-15));
  }

  const UtilityModel flipped = UtilityModel::binary_linear(0.0, 1);
  CHECK(flipped(1, 2.0) == 2.0);
  CHECK(flipped(0, 2.0) == -2.0);
}

TEST_CASE("ternary linear utility holds at zero and splits indifference points") {
  const UtilityModel u = UtilityModel::ternary_linear(0.3, -0.2);
  CHECK(u(0, 1.0) == doctest::Approx(0.7).epsilon(1e-15));
  CHECK(u(1, 1.0) == 0.0);
  CHECK(u(2, 1.0) == doctest::Approx(-1.2).epsilon(1e-15));
  CHECK(u.entry_action() == 0);
  CHECK(u.exit_action() == 2);

  CHECK_THROWS_AS(UtilityModel::ternary_linear(0.0, 0.0, 0, 0, 2), UnknownAction);
}

TEST_CASE("table utility and parameter rebinding") {
  const UtilityModel table =
      UtilityModel::table(2, [](Index a, double) { return a == 0 ? 1.0 : 0.0; });
  CHECK(table(0, 5.0) == 1.0);
  CHECK(table(1, -5.0) == 0.0);
  CHECK_THROWS_AS(table(2, 0.0), UnknownAction);

  const UtilityModel rebased = UtilityModel::binary_linear(0.0).with_mu(1.5);
  CHECK(rebased(0, 1.5) == 0.0);
  CHECK_THROWS_AS(utility(rebased, 0, std::nan("")), Error);
}

TEST_CASE("trapezoid grid integrates linear functions exactly") {
  const Grid g = Grid::uniform(0.0, 1.0, 11);
  CHECK(g.integrate(ArrayXd::Ones(11)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.integrate(g.points()) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));

  // Second-order accuracy on a smooth integrand: refinement scales by ~1/4.
  const auto quad_err = [](Index n) {
    const Grid grid = Grid::uniform(0.0, 1.0, n);
    return std::abs(grid.integrate(grid.points().square()) - 1.0 / 3.0);
  };
  CHECK(quad_err(201) < 0.26 * quad_err(101));

  CHECK_THROWS_AS(Grid::uniform(1.0, 0.0, 5), Error);
  ArrayXd bad(3);
  bad << 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(Grid{bad}, Error);
  CHECK_THROWS_AS(Grid::uniform(0.0, 1.0, 5).integrate(ArrayXd::Ones(4)), Error);
}
