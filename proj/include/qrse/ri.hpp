#pragma once

#include <cmath>
#include <vector>

#include "qrse/action_set.hpp"
#include "qrse/errors.hpp"
#include "qrse/probability.hpp"
#include "qrse/types.hpp"
#include "qrse/utility_model.hpp"

namespace qrse {

/// Marginals below this are floored inside the iteration: the update can
/// otherwise annihilate an action permanently in finite precision.
inline constexpr double kRiMarginalFloor = 1e-300;

/// Rational-inattention problem: the decision weighting uses the
/// unconditional action distribution itself rather than an exogenous prior.
struct RiProblem {
  ActionSet actions;
  ArrayXd states;              // finite state grid
  ProbabilityVector state_distribution;
  UtilityModel utility;
  double T = 1.0;

  RiProblem(ActionSet actions_, ArrayXd states_, ProbabilityVector state_distribution_,
            UtilityModel utility_, double T_)
      : actions(std::move(actions_)),
        states(std::move(states_)),
        state_distribution(std::move(state_distribution_)),
        utility(std::move(utility_)),
        T(T_) {
    if (states.size() != state_distribution.size()) {
      throw Error("state grid and state distribution must have equal length");
    }
    if (states.size() < 1) throw Error("need at least one state");
    if (utility.n_actions() != actions.size()) {
      throw Error("utility model action count must equal action set size");
    }
    if (!(T > 0.0) || !std::isfinite(T)) throw Error("temperature must be positive and finite");
    validate_probability_vector(state_distribution);
  }
};

struct RiSolution {
  ProbabilityVector f_a;
  ArrayXXd f_a_given_x;  // rows: actions, cols: states
  Index iterations = 0;
  bool converged = false;
  double objective = 0.0;
  std::vector<double> objective_trace;
};

/// Expected utility minus T times mutual information, the quantity the fixed
/// point maximizes; evaluated against the mixture marginal of `conditional`.
inline double ri_objective(const RiProblem& problem, const ArrayXXd& conditional) {
  const Index n_a = problem.actions.size();
  const Index n_x = problem.states.size();
  ProbabilityVector marginal = ProbabilityVector::Zero(n_a);
  for (Index j = 0; j < n_x; ++j) {
    marginal += problem.state_distribution[j] * conditional.col(j);
  }
  double expected_u = 0.0;
  double mutual_info = 0.0;
  for (Index j = 0; j < n_x; ++j) {
    const double px = problem.state_distribution[j];
    if (px <= 0.0) continue;
    for (Index a = 0; a < n_a; ++a) {
      const double c = conditional(a, j);
      if (c <= 0.0) continue;
      expected_u += px * c * problem.utility(a, problem.states[j]);
      mutual_info += px * c * std::log(c / marginal[a]);
    }
  }
  return expected_u - problem.T * std::max(mutual_info, 0.0);
}

/// Alternating fixed-point iteration: f[a|x] <- f[a] exp(U/T)/Z(x), then
/// f[a] <- sum_x p[x] f[a|x], from a uniform start, until the sup-norm change
/// over both objects drops below tol. Non-convergence is reported through the
/// flag, with the last iterate returned.
inline RiSolution solve_ri(const RiProblem& problem, double tol = 1e-12,
                           Index max_iter = 10000) {
  if (!(tol > 0.0)) throw Error("tolerance must be positive");
  const Index n_a = problem.actions.size();
  const Index n_x = problem.states.size();

  ArrayXXd u(n_a, n_x);
  for (Index j = 0; j < n_x; ++j) u.col(j) = problem.utility.row(problem.states[j]) / problem.T;

  RiSolution sol;
  sol.f_a = uniform_probabilities(n_a);
  sol.f_a_given_x = ArrayXXd::Zero(n_a, n_x);

  for (sol.iterations = 0; sol.iterations < max_iter; ++sol.iterations) {
    const ArrayXd log_f_a = sol.f_a.log();
    ArrayXXd next_conditional(n_a, n_x);
    for (Index j = 0; j < n_x; ++j) {
      const ArrayXd lw = log_f_a + u.col(j);
      next_conditional.col(j) = (lw - log_sum_exp(lw)).exp();
    }
    ProbabilityVector next_marginal = ProbabilityVector::Zero(n_a);
    for (Index j = 0; j < n_x; ++j) {
      next_marginal += problem.state_distribution[j] * next_conditional.col(j);
    }
    next_marginal = next_marginal.max(kRiMarginalFloor);
    next_marginal /= next_marginal.sum();

    const double delta =
        std::max((next_marginal - sol.f_a).abs().maxCoeff(),
                 (next_conditional - sol.f_a_given_x).abs().maxCoeff());
    sol.f_a = next_marginal;
    sol.f_a_given_x = next_conditional;
    sol.objective_trace.push_back(ri_objective(problem, sol.f_a_given_x));
    if (delta < tol) {
      sol.converged = true;
      ++sol.iterations;
      break;
    }
  }
  sol.objective = sol.objective_trace.empty() ? 0.0 : sol.objective_trace.back();
  return sol;
}

/// Sup-norm residual of the fixed-point conditions at a candidate solution.
inline double ri_residual(const RiProblem& problem, const RiSolution& sol) {
  const Index n_a = problem.actions.size();
  const Index n_x = problem.states.size();
  double r = 0.0;
  const ArrayXd log_f_a = sol.f_a.max(kRiMarginalFloor).log();
  for (Index j = 0; j < n_x; ++j) {
    const ArrayXd lw = log_f_a + problem.utility.row(problem.states[j]) / problem.T;
    const ArrayXd implied = (lw - log_sum_exp(lw)).exp();
    r = std::max(r, (implied - sol.f_a_given_x.col(j)).abs().maxCoeff());
  }
  ProbabilityVector implied_marginal = ProbabilityVector::Zero(n_a);
  for (Index j = 0; j < n_x; ++j) {
    implied_marginal += problem.state_distribution[j] * sol.f_a_given_x.col(j);
  }
  return std::max(r, (implied_marginal - sol.f_a).abs().maxCoeff());
}

}  // namespace qrse
