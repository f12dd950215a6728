#pragma once

#include <cmath>
#include <utility>

#include "qrse/decision.hpp"
#include "qrse/errors.hpp"
#include "qrse/grid.hpp"
#include "qrse/params.hpp"
#include "qrse/types.hpp"

namespace qrse {

/// What to do when the grid endpoints carry non-negligible kernel mass.
enum class SupportPolicy { Warn, Throw };

/// Kernel mass within this many log units of the max at an endpoint means the
/// grid is too short for the requested parameters.
inline constexpr double kSupportLogMargin = 30.0;

/// The full statistical-equilibrium model: one agent's decision problem plus
/// the feedback parameters shaping the outcome marginal. `params` is
/// authoritative: the constructor pushes params.T into the decision context
/// and params.mu (and mu2) into linear utilities, so a stale utility cannot
/// disagree with the parameter vector.
class EquilibriumModel {
 public:
  EquilibriumModel(ActionSet actions, ProbabilityVector prior, UtilityModel utility,
                   EquilibriumParams params, Grid grid, Index entry_action = 0,
                   Index exit_action = -1)
      : ctx_(std::move(actions), std::move(prior), apply_params(std::move(utility), params),
             params.T),
        params_(params),
        grid_(std::move(grid)),
        entry_(entry_action),
        exit_(exit_action < 0 ? ctx_.actions.size() - 1 : exit_action) {
    params_.validate();
    if (entry_ < 0 || entry_ >= ctx_.actions.size() || exit_ < 0 ||
        exit_ >= ctx_.actions.size()) {
      throw UnknownAction("entry/exit action index out of range");
    }
    if (entry_ == exit_) throw Error("entry and exit must be distinct actions");
  }

  const DecisionContext& ctx() const { return ctx_; }
  const EquilibriumParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  Index entry_action() const { return entry_; }
  Index exit_action() const { return exit_; }

 private:
  static UtilityModel apply_params(UtilityModel u, const EquilibriumParams& p) {
    switch (u.kind()) {
      case UtilityKind::BinaryLinear:
        return u.with_mu(p.mu);
      case UtilityKind::TernaryLinear:
        return u.with_mus(p.mu, p.mu2.value_or(p.mu));
      case UtilityKind::Table:
        return u;
    }
    return u;
  }

  DecisionContext ctx_;
  EquilibriumParams params_;
  Grid grid_;
  Index entry_;
  Index exit_;
};

/// Normalized density sampled on a grid. `log_partition` is the log of the
/// quadrature normalizer applied to the unnormalized kernel, so
/// log f(x_i) = log_kernel(x_i) - log_partition for the marginal table.
struct DensityTable {
  Grid grid = Grid(ArrayXd::LinSpaced(2, 0.0, 1.0));
  ArrayXd values;
  double log_partition = 0.0;
  bool support_truncated = false;
};

/// Unnormalized log-density of the outcome marginal:
/// H[A|x] - gamma x - rho x (f[entry|x] - f[exit|x]).
inline double log_kernel(const EquilibriumModel& model, double x) {
  const ProbabilityVector f = decision_probabilities(model.ctx(), x);
  const double gap = f[model.entry_action()] - f[model.exit_action()];
  return entropy(f) - model.params().gamma * x - model.params().rho * x * gap;
}

inline ArrayXd log_kernel_curve(const EquilibriumModel& model, const ArrayXd& xs) {
  ArrayXd out(xs.size());
  for (Index i = 0; i < xs.size(); ++i) out[i] = log_kernel(model, xs[i]);
  return out;
}

/// log of the quadrature partition over the model grid, with the endpoint
/// support check. Shared by marginal_density and the likelihood evaluation.
inline std::pair<double, bool> log_partition_over_grid(const EquilibriumModel& model,
                                                       const ArrayXd& kernel,
                                                       SupportPolicy policy) {
  const Grid& g = model.grid();
  const double k_max = kernel.maxCoeff();
  const bool truncated = kernel[0] > k_max - kSupportLogMargin ||
                         kernel[kernel.size() - 1] > k_max - kSupportLogMargin;
  if (truncated && policy == SupportPolicy::Throw) {
    throw SupportTruncated("grid endpoints carry non-negligible density mass");
  }
  const double log_z = log_sum_exp(kernel + g.weights().log());
  return {log_z, truncated};
}

/// f[x] on the model grid: exp(log_kernel - log Z), Z by trapezoid
/// quadrature in log space.
inline DensityTable marginal_density(const EquilibriumModel& model,
                                     SupportPolicy policy = SupportPolicy::Warn) {
  const ArrayXd kernel = log_kernel_curve(model, model.grid().points());
  const auto [log_z, truncated] = log_partition_over_grid(model, kernel, policy);
  return DensityTable{model.grid(), (kernel - log_z).exp(), log_z, truncated};
}

/// f[a, x_i] = f[a|x_i] f[x_i]; rows are actions, columns grid points.
inline ArrayXXd joint_density(const EquilibriumModel& model,
                              SupportPolicy policy = SupportPolicy::Warn) {
  const DensityTable marginal = marginal_density(model, policy);
  ArrayXXd joint = decision_curve(model.ctx(), model.grid().points());
  joint.rowwise() *= marginal.values.transpose();
  return joint;
}

/// f[a] by marginalizing the joint over the grid.
inline ProbabilityVector action_marginal(const EquilibriumModel& model,
                                         SupportPolicy policy = SupportPolicy::Warn) {
  const ArrayXXd joint = joint_density(model, policy);
  const ArrayXd& w = model.grid().weights();
  ProbabilityVector f(joint.rows());
  for (Index a = 0; a < joint.rows(); ++a) f[a] = (joint.row(a).transpose() * w).sum();
  return f;
}

/// f[x|a] = f[a,x] / f[a].
inline DensityTable outcome_given_action(const EquilibriumModel& model, Index action,
                                         SupportPolicy policy = SupportPolicy::Warn) {
  if (action < 0 || action >= model.ctx().actions.size()) {
    throw UnknownAction("action index out of range");
  }
  const DensityTable marginal = marginal_density(model, policy);
  const ArrayXd conditional =
      decision_curve(model.ctx(), model.grid().points()).row(action).transpose();
  const ArrayXd joint_row = conditional * marginal.values;
  const double f_a = model.grid().integrate(joint_row);
  if (!(f_a > 1e-300)) {
    throw NullAction("action has vanishing marginal probability");
  }
  return DensityTable{model.grid(), joint_row / f_a, marginal.log_partition + std::log(f_a),
                      marginal.support_truncated};
}

/// Realized feedback constraint: integral of f[x] (f[entry|x] - f[exit|x]) x.
inline double competition_gap(const EquilibriumModel& model,
                              SupportPolicy policy = SupportPolicy::Warn) {
  const DensityTable marginal = marginal_density(model, policy);
  const ArrayXXd cond = decision_curve(model.ctx(), model.grid().points());
  const ArrayXd gap =
      (cond.row(model.entry_action()) - cond.row(model.exit_action())).transpose();
  return model.grid().integrate(marginal.values * gap * model.grid().points());
}

inline double density_mean(const DensityTable& table) {
  return table.grid.integrate(table.values * table.grid.points());
}

inline double density_central_moment(const DensityTable& table, int order) {
  const double m = density_mean(table);
  return table.grid.integrate(table.values * (table.grid.points() - m).pow(order));
}

}  // namespace qrse
