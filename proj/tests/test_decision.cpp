#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "qrse/decision.hpp"

using namespace qrse;

namespace {

DecisionContext binary_ctx(double prior_entry, double mu, double T) {
  ArrayXd prior(2);
  prior << prior_entry, 1.0 - prior_entry;
  return DecisionContext(ActionSet::binary(), prior, UtilityModel::binary_linear(mu), T);
}

std::vector<oracle::Real> to_mp(const ArrayXd& v) {
  std::vector<oracle::Real> out(static_cast<std::size_t>(v.size()));
  for (Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = oracle::Real(v[i]);
  return out;
}

}  // namespace

TEST_CASE("indifference point splits a uniform binary choice evenly") {
  const auto ctx = binary_ctx(0.5, 0.25, 1.0);
  const ArrayXd f = decision_probabilities(ctx, 0.25);
  CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("zero utility returns the prior unchanged") {
  ArrayXd prior(2);
  prior << 0.7, 0.3;
  const UtilityModel zero = UtilityModel::table(2, [](Index, double) { return 0.0; });
  for (double T : {1e-3, 1.0, 50.0}) {
    const DecisionContext ctx(ActionSet::binary(), prior, zero, T);
    const ArrayXd f = decision_probabilities(ctx, 3.0);
    CHECK(f[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(f[1] == doctest::Approx(0.3).epsilon(1e-15));
  }
}

TEST_CASE("duplicated alternatives keep their prior share under equal utilities") {
  // Two indistinguishable buses with a car: prior mass on the car is preserved
  // exactly, where a uniform-weight choice rule would dilute it to 1/3.
  ArrayXd prior(3);
  prior << 0.5, 0.25, 0.25;
  const UtilityModel equal = UtilityModel::table(3, [](Index, double) { return 1.0; });
  const DecisionContext ctx(ActionSet({"car", "blue-bus", "red-bus"}), prior, equal, 1.0);
  const ArrayXd f = decision_probabilities(ctx, 0.0);
  CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(f[2] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("high temperature falls back to the prior") {
  const auto ctx = binary_ctx(0.7, 0.0, 1e9);
  const ArrayXd f = decision_probabilities(ctx, 1.0);
  CHECK(std::abs(f[0] - 0.7) < 1e-6);
  CHECK(std::abs(f[1] - 0.3) < 1e-6);
  CHECK(kl_from_prior(ctx, 1.0) < 1e-9);
}

TEST_CASE("low temperature selects the utility maximizer despite a hostile prior") {
  ArrayXd prior(2);
  prior << 0.01, 0.99;
  const UtilityModel table =
      UtilityModel::table(2, [](Index a, double) { return a == 0 ? 1.0 : 0.0; });
  const DecisionContext ctx(ActionSet::binary(), prior, table, 1e-6);
  const ArrayXd f = decision_probabilities(ctx, 0.0);
  CHECK(f[0] > 1.0 - 1e-6);
  CHECK(f[1] < 1e-6);
}

TEST_CASE("no overflow for utility-to-temperature ratios up to 700") {
  const auto ctx = binary_ctx(0.5, 0.0, 1.0);
  const ArrayXd f = decision_probabilities(ctx, 700.0);
  CHECK(std::isfinite(f[0]));
  CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero prior entries yield zero probability, all-zero prior support is degenerate") {
  ArrayXd prior(3);
  prior << 0.5, 0.5, 0.0;
  const UtilityModel equal = UtilityModel::table(3, [](Index, double) { return 1.0; });
  const DecisionContext ctx(ActionSet::ternary(), prior, equal, 1.0);
  const ArrayXd f = decision_probabilities(ctx, 0.0);
  CHECK(f[2] == 0.0);
  CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-15));

  // Prior mass confined to actions whose utility is -inf leaves nothing to choose.
  ArrayXd point(2);
  point << 0.0, 1.0;
  const UtilityModel minus_inf =
      UtilityModel::table(2, [](Index a, double) { return a == 1 ? -kInf : 0.0; });
  const DecisionContext bad(ActionSet::binary(), point, minus_inf, 1.0);
  CHECK_THROWS_AS(decision_probabilities(bad, 0.0), DegeneratePrior);
}

TEST_CASE("shift potential reproduces the prior-weighted form") {
  SUBCASE("uniform binary, T=1") {
    const auto ctx = binary_ctx(0.5, 0.0, 1.0);
    const ArrayXd alpha = shift_potential(ctx);
    CHECK(alpha[0] == doctest::Approx(std::log(0.5)).epsilon(1e-15));
    CHECK(alpha[1] == doctest::Approx(std::log(0.5)).epsilon(1e-15));
  }
  SUBCASE("skewed prior, T=2") {
    ArrayXd prior(2);
    prior << 0.99, 0.01;
    const DecisionContext ctx(ActionSet::binary(), prior, UtilityModel::binary_linear(0.0), 2.0);
    const ArrayXd alpha = shift_potential(ctx);
    CHECK(alpha[0] == doctest::Approx(2.0 * std::log(0.99)).epsilon(1e-15));
    CHECK(alpha[1] == doctest::Approx(2.0 * std::log(0.01)).epsilon(1e-15));
  }
  SUBCASE("zero prior entry rejected") {
    ArrayXd prior(2);
    prior << 1.0, 0.0;
    const DecisionContext ctx(ActionSet::binary(), prior, UtilityModel::binary_linear(0.0), 1.0);
    CHECK_THROWS_AS(shift_potential(ctx), ZeroPriorEntry);
  }
  SUBCASE("shifted-utility path agrees with the direct form within 1e-12") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    std::uniform_real_distribution<double> xs(-3.0, 3.0);
    std::uniform_real_distribution<double> temps(0.1, 10.0);
    for (int rep = 0; rep < 100; ++rep) {
      const double c = unit(rng);
      const double T = temps(rng);
      const double x = xs(rng);
      const auto ctx = binary_ctx(c, 0.3, T);
      const ArrayXd direct = decision_probabilities(ctx, x);
      const ArrayXd alpha = shift_potential(ctx);
      // exp((U + alpha)/T) normalized, evaluated through the same op with a
      // uniform prior and the alpha folded into the utility table.
      const UtilityModel shifted = UtilityModel::table(
          2, [&](Index a, double xv) { return ctx.utility(a, xv) + alpha[a]; });
      const DecisionContext unif(ctx.actions, uniform_probabilities(2), shifted, T);
      const ArrayXd via_alpha = decision_probabilities(unif, x);
      CHECK((direct - via_alpha).abs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("conditional entropy against 50-digit reference") {
  const auto ctx = binary_ctx(0.7, 0.0, 1.0);
  const ArrayXd f = decision_probabilities(ctx, 0.5);

  std::vector<oracle::Real> prior = {oracle::Real("0.7"), oracle::Real("0.3")};
  std::vector<oracle::Real> util = {oracle::Real("0.5"), oracle::Real("-0.5")};
  const auto ref_f = oracle::weighted_choice(prior, util, oracle::Real(1));
  const oracle::Real ref_h = oracle::entropy(ref_f);

  CHECK(f[0] == doctest::Approx(static_cast<double>(ref_f[0])).epsilon(1e-14));
  CHECK(f[1] == doctest::Approx(static_cast<double>(ref_f[1])).epsilon(1e-14));
  CHECK(conditional_entropy(ctx, 0.5) ==
        doctest::Approx(static_cast<double>(ref_h)).epsilon(1e-14));
  // Pinned value of the same quantity, so a broken oracle cannot hide.
  CHECK(conditional_entropy(ctx, 0.5) == doctest::Approx(0.3979873539796965127).epsilon(1e-15));
}

TEST_CASE("conditional entropy limits") {
  const auto ctx = binary_ctx(0.5, 0.3, 1.0);
  CHECK(conditional_entropy(ctx, 0.3) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const auto cold = binary_ctx(0.5, 0.0, 1e-6);
  CHECK(conditional_entropy(cold, 1.0) < 1e-6);
  for (double x : {-2.0, -0.5, 0.0, 1.0, 4.0}) {
    const double h = conditional_entropy(ctx, x);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(2.0) + 1e-15);
  }
}

TEST_CASE("divergence from prior against 50-digit reference") {
  const auto ctx = binary_ctx(0.5, 0.0, 1.0);

  std::vector<oracle::Real> prior = {oracle::Real("0.5"), oracle::Real("0.5")};
  std::vector<oracle::Real> util = {oracle::Real(1), oracle::Real(-1)};
  const auto ref_f = oracle::weighted_choice(prior, util, oracle::Real(1));
  const oracle::Real ref_kl = oracle::kl(ref_f, prior);

  CHECK(kl_from_prior(ctx, 1.0) ==
        doctest::Approx(static_cast<double>(ref_kl)).epsilon(1e-14));
  CHECK(kl_from_prior(ctx, 1.0) == doctest::Approx(0.32781332547273770109).epsilon(1e-15));
}

TEST_CASE("divergence from prior is nonnegative, zero at zero utility") {
  ArrayXd prior(2);
  prior << 0.6, 0.4;
  const UtilityModel zero = UtilityModel::table(2, [](Index, double) { return 0.0; });
  const DecisionContext flat(ActionSet::binary(), prior, zero, 1.0);
  CHECK(kl_from_prior(flat, 2.0) == 0.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> xs(-5.0, 5.0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto ctx = binary_ctx(0.3, 0.1, 0.7);
    CHECK(kl_from_prior(ctx, xs(rng)) >= 0.0);
  }

  // A zero-mass prior entry forces zero choice probability for that action,
  // so the divergence stays well defined and the point mass diverges nowhere.
  ArrayXd point(2);
  point << 0.0, 1.0;
  const DecisionContext pinned(ActionSet::binary(), point, UtilityModel::binary_linear(0.0), 1.0);
  CHECK(kl_from_prior(pinned, 3.0) == 0.0);
}

TEST_CASE("observer dual: unconstrained case is uniform") {
  const auto ctx = binary_ctx(0.5, 0.0, 1.0);
  // At x=1 utilities are [1, -1]; their uniform mean is 0.
  const ArrayXd f = dual_decision_probabilities(ctx, 1.0, 0.0);
  CHECK(f[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("observer dual: binding constraint is a point mass on the argmax") {
  const auto ctx = binary_ctx(0.5, 0.0, 1.0);
  const ArrayXd f = dual_decision_probabilities(ctx, 1.0, 1.0);
  CHECK(f[0] == doctest::Approx(1.0).epsilon(1e-12));

  // Tied maxima split evenly.
  const UtilityModel tied = UtilityModel::table(3, [](Index a, double) {
    return a == 1 ? -1.0 : 2.0;
  });
  const DecisionContext ctx3(ActionSet::ternary(), uniform_probabilities(3), tied, 1.0);
  const ArrayXd g = dual_decision_probabilities(ctx3, 0.0, 2.0);
  CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("observer dual matches the choice rule at the bisected multiplier") {
  // Binary U = [1, -1], target mean 0.5: expected utility under the Boltzmann
  // family is tanh(beta), so beta = atanh(0.5).
  const auto ctx = binary_ctx(0.5, 0.0, 1.0);
  const ArrayXd f = dual_decision_probabilities(ctx, 1.0, 0.5);
  const double beta = std::atanh(0.5);
  CHECK(beta == doctest::Approx(0.5493061443340548457).epsilon(1e-15));

  const auto primal = binary_ctx(0.5, 0.0, 1.0 / beta);
  const ArrayXd g = decision_probabilities(primal, 1.0);
  CHECK((f - g).abs().maxCoeff() < 1e-10);

  // Expected utility hits the target.
  CHECK(f[0] * 1.0 + f[1] * (-1.0) == doctest::Approx(0.5).epsilon(1e-10));

  CHECK_THROWS_AS(dual_decision_probabilities(ctx, 1.0, 1.5), UnreachableUtility);
  CHECK_THROWS_AS(dual_decision_probabilities(ctx, 1.0, -1.5), UnreachableUtility);
}

TEST_CASE("uniform-prior equivalent shift of the indifference point") {
  CHECK(mu_star_equivalent(uniform_probabilities(2), 0.7, 3.0) == doctest::Approx(0.7));

  ArrayXd prior(2);
  prior << 0.8, 0.2;
  const double mu_star = mu_star_equivalent(prior, 1.0, 2.0);
  // (T/2) log(0.8/0.2) = log 4, so mu* = 1 - log 4.
  CHECK(mu_star == doctest::Approx(1.0 - std::log(4.0)).epsilon(1e-15));
  CHECK(mu_star == doctest::Approx(-0.38629436111989061883).epsilon(1e-13));

  // The uniform curve at mu* reproduces the prior-weighted curve at mu.
  const DecisionContext weighted(ActionSet::binary(), prior, UtilityModel::binary_linear(1.0),
                                 2.0);
  const DecisionContext uniform_ctx(ActionSet::binary(), uniform_probabilities(2),
                                    UtilityModel::binary_linear(mu_star), 2.0);
  const ArrayXd xs = ArrayXd::LinSpaced(501, -10.0, 10.0);
  const ArrayXXd curve_w = decision_curve(weighted, xs);
  const ArrayXXd curve_u = decision_curve(uniform_ctx, xs);
  CHECK((curve_w - curve_u).abs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(mu_star_equivalent(uniform_probabilities(3), 0.0, 1.0), NonBinaryActionSet);
  ArrayXd degenerate(2);
  degenerate << 1.0, 0.0;
  CHECK_THROWS_AS(mu_star_equivalent(degenerate, 0.0, 1.0), ZeroPriorEntry);
}

TEST_CASE("choice probabilities normalize and reduce to plain softmax under uniform priors") {
  std::mt19937 rng(20240802);
  std::uniform_real_distribution<double> xs(-10.0, 10.0);
  std::uniform_real_distribution<double> temps(0.05, 20.0);
  std::uniform_real_distribution<double> mus(-3.0, 3.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const double x = xs(rng);
    const double T = temps(rng);
    const double mu = mus(rng);
    const auto ctx = binary_ctx(0.5, mu, T);
    const ArrayXd f = decision_probabilities(ctx, x);
    CHECK(std::abs(f.sum() - 1.0) < 1e-12);

    const ArrayXd u = ctx.utility.row(x);
    const ArrayXd logits = u / T - log_sum_exp((u / T).eval());
    CHECK((f - logits.exp()).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("binary entry probability is strictly increasing in the outcome") {
  const auto ctx = binary_ctx(0.6, 0.2, 0.8);
  const ArrayXd xs = ArrayXd::LinSpaced(200, -5.0, 5.0);
  const ArrayXXd curve = decision_curve(ctx, xs);
  for (Index i = 1; i < xs.size(); ++i) {
    CHECK(curve(0, i) > curve(0, i - 1));
  }
  // The 50:50 crossing sits at mu only for a uniform prior.
  const auto unif = binary_ctx(0.5, 0.2, 0.8);
  CHECK(decision_probabilities(unif, 0.2)[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(decision_probabilities(ctx, 0.2)[0] > 0.5);
}

TEST_CASE("odds between two actions ignore a third action's utility under uniform priors") {
  auto make = [](double third_utility) {
    return UtilityModel::table(3, [third_utility](Index a, double x) {
      if (a == 0) return x;
      if (a == 1) return -x;
      return third_utility;
    });
  };
  const DecisionContext a(ActionSet::ternary(), uniform_probabilities(3), make(0.0), 1.3);
  const DecisionContext b(ActionSet::ternary(), uniform_probabilities(3), make(5.0), 1.3);
  for (double x : {-1.0, 0.4, 2.0}) {
    const ArrayXd fa = decision_probabilities(a, x);
    const ArrayXd fb = decision_probabilities(b, x);
    CHECK(fa[0] / fa[1] == doctest::Approx(fb[0] / fb[1]).epsilon(1e-12));
  }
}
