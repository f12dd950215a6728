#pragma once

#include <cmath>

#include "qrse/action_set.hpp"
#include "qrse/errors.hpp"
#include "qrse/probability.hpp"
#include "qrse/types.hpp"
#include "qrse/utility_model.hpp"

namespace qrse {

/// One agent's decision problem: action set, prior beliefs over actions,
/// payoffs, and the temperature trading payoff against divergence from the
/// prior.
struct DecisionContext {
  ActionSet actions;
  ProbabilityVector prior;
  UtilityModel utility;
  double T = 1.0;

  DecisionContext(ActionSet actions_, ProbabilityVector prior_, UtilityModel utility_, double T_)
      : actions(std::move(actions_)), prior(std::move(prior_)), utility(std::move(utility_)), T(T_) {
    if (prior.size() != actions.size()) throw Error("prior length must equal action count");
    if (utility.n_actions() != actions.size()) {
      throw Error("utility model action count must equal action set size");
    }
    if (!(T > 0.0) || !std::isfinite(T)) throw Error("temperature must be positive and finite");
    validate_probability_vector(prior);
  }
};

/// log f[a|x] for all actions, up to the (returned-implicitly) normalizer:
/// caller-facing overloads below normalize. Zero-prior actions carry -inf.
inline ArrayXd log_decision_weights(const DecisionContext& ctx, double x) {
  const Index n = ctx.actions.size();
  ArrayXd lw(n);
  for (Index a = 0; a < n; ++a) {
    const double p = ctx.prior[a];
    lw[a] = (p > 0.0 ? std::log(p) : -kInf) + ctx.utility(a, x) / ctx.T;
  }
  return lw;
}

/// f[a|x] = p[a] exp(U[a,x]/T) / sum_a' p[a'] exp(U[a',x]/T), in log space
/// with max-subtraction so |U/T| up to ~700 stays finite.
inline ProbabilityVector decision_probabilities(const DecisionContext& ctx, double x) {
  if (!std::isfinite(x)) throw Error("decision_probabilities requires finite x");
  ArrayXd lw = log_decision_weights(ctx, x);
  const double lz = log_sum_exp(lw);
  if (lz == -kInf) {
    throw DegeneratePrior("all prior mass lies on actions with -inf utility");
  }
  // Vectorized exp may map -inf to a denormal instead of 0; zero-weight
  // actions must carry exactly zero probability.
  return (lw == -kInf).select(0.0, (lw - lz).exp());
}

/// alpha_a = T log p[a]: the additive payoff shift that reproduces the
/// prior-weighted choice probabilities from a uniform-prior softmax.
inline ArrayXd shift_potential(const DecisionContext& ctx) {
  if ((ctx.prior <= 0.0).any()) {
    throw ZeroPriorEntry("shift potential is undefined where the prior has zero mass");
  }
  return ctx.T * ctx.prior.log();
}

/// Shannon entropy of the choice distribution at x, in nats.
inline double conditional_entropy(const DecisionContext& ctx, double x) {
  return entropy(decision_probabilities(ctx, x));
}

/// KL(f[.|x] || prior), in nats. Non-negative; zero iff the choice
/// distribution equals the prior.
inline double kl_from_prior(const DecisionContext& ctx, double x) {
  const ProbabilityVector f = decision_probabilities(ctx, x);
  double kl = 0.0;
  for (Index a = 0; a < f.size(); ++a) {
    if (f[a] <= 0.0) continue;
    if (ctx.prior[a] <= 0.0) {
      throw AbsoluteContinuityViolation("choice probability positive where prior is zero");
    }
    kl += f[a] * std::log(f[a] / ctx.prior[a]);
  }
  return kl > 0.0 ? kl : 0.0;
}

/// Observer problem: maximize entropy over actions subject to expected
/// utility >= u_min, uniform prior. Solved by bisection on the multiplier
/// beta >= 0 of the Boltzmann family exp(beta U)/Z, whose expected utility is
/// nondecreasing in beta. Dual to decision_probabilities at T = 1/beta.
inline ProbabilityVector dual_decision_probabilities(const DecisionContext& ctx, double x,
                                                     double u_min) {
  const ArrayXd u = ctx.utility.row(x);
  const Index n = u.size();
  const double u_max = u.maxCoeff();
  const double u_min_attainable = u.minCoeff();
  if (!(u_min >= u_min_attainable) || !(u_min <= u_max)) {
    throw UnreachableUtility("required expected utility lies outside the attainable range");
  }

  const auto boltzmann = [&](double beta) -> ProbabilityVector {
    ArrayXd lw = beta * u;
    return (lw - log_sum_exp(lw)).exp();
  };
  const auto expected_u = [&](double beta) { return (boltzmann(beta) * u).sum(); };

  constexpr double tol = 1e-12;
  constexpr int max_iters = 200;

  // Constraint slack at the unconstrained entropy maximum: beta = 0.
  if (expected_u(0.0) >= u_min - tol) return ProbabilityVector::Constant(n, 1.0 / n);

  // Binding at the top: point mass split over the argmax set.
  if (u_min >= u_max - tol) {
    ProbabilityVector f = ProbabilityVector::Zero(n);
    Index ties = 0;
    for (Index a = 0; a < n; ++a) ties += (u[a] >= u_max - tol) ? 1 : 0;
    for (Index a = 0; a < n; ++a) f[a] = (u[a] >= u_max - tol) ? 1.0 / ties : 0.0;
    return f;
  }

  double lo = 0.0, hi = 1.0;
  while (expected_u(hi) < u_min && hi < 1e300) hi *= 2.0;
  double beta = hi;
  for (int it = 0; it < max_iters; ++it) {
    beta = 0.5 * (lo + hi);
    const double eu = expected_u(beta);
    if (std::abs(eu - u_min) < tol) break;
    (eu < u_min ? lo : hi) = beta;
  }
  return boltzmann(beta);
}

/// Binary case: the uniform-prior indifference point that reproduces a
/// prior-weighted choice curve. mu* = mu - (T/2) log(p_entry / p_other).
inline double mu_star_equivalent(const ProbabilityVector& prior, double mu, double T,
                                 Index entry_action = 0) {
  if (prior.size() != 2) {
    throw NonBinaryActionSet("the equivalent indifference point exists only for binary actions");
  }
  if ((prior <= 0.0).any()) {
    throw ZeroPriorEntry("the equivalent indifference point needs strictly positive priors");
  }
  const Index other = 1 - entry_action;
  return mu - 0.5 * T * std::log(prior[entry_action] / prior[other]);
}

/// Choice probabilities across a vector of outcomes; row a holds f[a|x_j].
inline ArrayXXd decision_curve(const DecisionContext& ctx, const ArrayXd& xs) {
  ArrayXXd out(ctx.actions.size(), xs.size());
  for (Index j = 0; j < xs.size(); ++j) out.col(j) = decision_probabilities(ctx, xs[j]);
  return out;
}

}  // namespace qrse
