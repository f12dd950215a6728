#include "qrse/fitting.hpp"

#include <algorithm>
#include <cmath>

namespace qrse {
namespace {

Index action_count(const FitConfig& config) {
  return config.utility == UtilityKind::TernaryLinear ? 3 : 2;
}

UtilityModel base_utility(const FitConfig& config) {
  switch (config.utility) {
    case UtilityKind::BinaryLinear:
      return UtilityModel::binary_linear(0.0, config.entry_action);
    case UtilityKind::TernaryLinear: {
      const Index exit = config.exit_action < 0 ? 2 : config.exit_action;
      const Index hold = 3 - config.entry_action - exit;
      return UtilityModel::ternary_linear(0.0, 0.0, config.entry_action, hold, exit);
    }
    case UtilityKind::Table:
      throw Error("table utilities have no free parameters to fit");
  }
  throw Error("unknown utility kind");
}

ActionSet actions_for(const FitConfig& config) {
  return action_count(config) == 3 ? ActionSet::ternary() : ActionSet::binary();
}

// theta = (log T, mu[, mu2], rho, gamma)
Index theta_dim(const FitConfig& config) { return action_count(config) == 3 ? 5 : 4; }

EquilibriumParams theta_to_params(const VectorXd& theta, double xi, const FitConfig& config) {
  const bool ternary = action_count(config) == 3;
  EquilibriumParams p;
  const double log_t =
      std::clamp(theta[0], std::log(kMinTemperature), std::log(kMaxTemperature));
  p.T = std::exp(log_t);
  p.mu = theta[1];
  if (ternary) p.mu2 = theta[2];
  p.rho = theta[ternary ? 3 : 2];
  p.gamma = theta[ternary ? 4 : 3];
  p.xi = xi;
  return p;
}

}  // namespace

Grid default_fit_grid(const EmpiricalDistribution& emp, const FitConfig& config) {
  const double pad = config.grid_pad_iqr * std::max(emp.iqr, 1e-3);
  return Grid::uniform(emp.data_min - pad, emp.data_max + pad,
                       std::max<Index>(config.grid_points, 32));
}

EquilibriumModel make_model(const ProbabilityVector& prior, const EquilibriumParams& params,
                            const Grid& grid, const FitConfig& config) {
  const Index exit =
      config.exit_action < 0 ? action_count(config) - 1 : config.exit_action;
  return EquilibriumModel(actions_for(config), prior, base_utility(config), params, grid,
                          config.entry_action, exit);
}

double negative_log_likelihood(const EquilibriumModel& model, const EmpiricalDistribution& emp) {
  const Grid& g = model.grid();
  if (emp.bin_centers[0] < g.lo() || emp.bin_centers[emp.bin_centers.size() - 1] > g.hi()) {
    throw Error("model grid must cover all bin centers");
  }
  const ArrayXd kernel = log_kernel_curve(model, g.points());
  const double log_z = log_sum_exp(kernel + g.weights().log());
  double acc = 0.0;
  for (Index i = 0; i < emp.bin_centers.size(); ++i) {
    if (emp.weights[i] <= 0.0) continue;
    const double log_mass =
        log_kernel(model, emp.bin_centers[i]) - log_z + std::log(emp.bin_widths[i]);
    if (!std::isfinite(log_mass)) return kInf;
    acc += emp.weights[i] * log_mass;
  }
  const double nll = -static_cast<double>(emp.sample_count) * acc;
  return std::isfinite(nll) ? nll : kInf;
}

std::pair<double, double> information_distinguishability(const EmpiricalDistribution& emp,
                                                         const DensityTable& density) {
  const Grid& g = density.grid;
  double kl = 0.0;
  for (Index i = 0; i < emp.bin_centers.size(); ++i) {
    const double w = emp.weights[i];
    if (w <= 0.0) continue;
    const double c = emp.bin_centers[i];
    if (c < g.lo() || c > g.hi()) throw Error("density grid must cover all bin centers");
    // Bin centers generally fall between grid points: interpolate the table.
    const ArrayXd& x = g.points();
    const auto it = std::upper_bound(x.data(), x.data() + x.size(), c);
    Index hi = static_cast<Index>(it - x.data());
    hi = std::min(std::max(hi, Index(1)), x.size() - 1);
    const Index lo = hi - 1;
    const double t = (c - x[lo]) / (x[hi] - x[lo]);
    const double f = (1.0 - t) * density.values[lo] + t * density.values[hi];
    const double mass = f * emp.bin_widths[i];
    if (!(mass > 0.0)) {
      throw AbsoluteContinuityViolation("model density vanishes at an occupied bin");
    }
    kl += w * std::log(w / mass);
  }
  kl = std::max(kl, 0.0);
  const double explained = std::exp(-kl);
  return {1.0 - explained, explained};
}

FitResult fit(const EmpiricalDistribution& emp, const ProbabilityVector& prior,
              const FitConfig& config) {
  validate_probability_vector(prior);
  if (prior.size() != action_count(config)) {
    throw Error("prior length does not match the utility's action count");
  }

  const Grid grid = default_fit_grid(emp, config);
  const bool ternary = action_count(config) == 3;
  const double xi = emp.xi;

  OptimizerTrace trace;
  const auto objective = [&](const VectorXd& theta) {
    const EquilibriumParams p = theta_to_params(theta, xi, config);
    const double nll =
        negative_log_likelihood(make_model(prior, p, grid, config), emp);
    if (nll == kInf) ++trace.infinite_objective_hits;
    return nll;
  };

  // Deterministic multi-start over plausible temperature/feedback regimes.
  const double t_starts[5] = {1.0, 0.2, 5.0, 1.0, 0.2};
  const double mu_starts[5] = {xi, xi, xi, 0.0, 0.0};
  const double rho_starts[5] = {0.0, 4.0, 4.0, 4.0, 0.0};

  const Index dim = theta_dim(config);
  VectorXd steps(dim);
  const double mu_step = 0.5 * std::max(0.1, emp.iqr);
  if (ternary) {
    steps << 0.7, mu_step, mu_step, 2.0, 0.2;
  } else {
    steps << 0.7, mu_step, 2.0, 0.2;
  }

  NelderMeadResult best;
  Index winning_start = -1;
  for (int s = 0; s < 5; ++s) {
    VectorXd theta0(dim);
    if (ternary) {
      theta0 << std::log(t_starts[s]), mu_starts[s], mu_starts[s], rho_starts[s], 0.0;
    } else {
      theta0 << std::log(t_starts[s]), mu_starts[s], rho_starts[s], 0.0;
    }
    NelderMeadResult run = nelder_mead(objective, theta0, steps, config.optimizer);
    trace.evaluations += run.evaluations;
    if (winning_start < 0 || run.fx < best.fx) {
      best = std::move(run);
      winning_start = s;
    }
  }
  if (!std::isfinite(best.fx)) {
    throw NoFiniteObjective("no start point produced a finite likelihood");
  }

  // One polish pass from the winner with a tighter simplex.
  NelderMeadResult polish = nelder_mead(objective, best.x, (0.1 * steps).eval(), config.optimizer);
  trace.evaluations += polish.evaluations;
  trace.iterations = best.iterations + polish.iterations;
  if (polish.fx <= best.fx) {
    trace.converged = polish.converged;
    best.x = polish.x;
    best.fx = polish.fx;
  } else {
    trace.converged = best.converged;
  }
  trace.winning_start = winning_start;

  FitResult result;
  result.params = theta_to_params(best.x, xi, config);
  result.prior_used = prior;
  result.entry_action = config.entry_action;
  result.exit_action = config.exit_action < 0 ? action_count(config) - 1 : config.exit_action;
  result.nll = best.fx;
  result.trace = trace;

  const EquilibriumModel model = make_model(prior, result.params, grid, config);
  result.density = marginal_density(model, config.support);
  const auto [id, explained] = information_distinguishability(emp, result.density);
  result.id = id;
  result.explained = explained;
  result.kl_model_vs_empirical = std::max(0.0, -std::log(explained));

  ProbabilityVector marginal = action_marginal(model, config.support);
  result.action_marginal = marginal / marginal.sum();

  result.kl_profile.resize(grid.size());
  const bool prior_positive = (prior > 0.0).all();
  for (Index i = 0; i < grid.size(); ++i) {
    result.kl_profile[i] =
        prior_positive ? kl_from_prior(model.ctx(), grid.points()[i]) : kInf;
  }
  result.competition_gap = competition_gap(model, config.support);
  return result;
}

RollingResult rolling_fit(const std::vector<EmpiricalDistribution>& periods,
                          const PriorSchedule& schedule, const FitConfig& config,
                          const std::vector<std::string>& period_labels) {
  if (periods.empty()) throw Error("rolling fit needs at least one period");
  if (!period_labels.empty() && period_labels.size() != periods.size()) {
    throw Error("period label count must match period count");
  }

  RollingResult out;
  for (std::size_t t = 0; t < periods.size(); ++t) {
    const std::string label =
        period_labels.empty() ? std::to_string(t) : period_labels[t];
    try {
      const ProbabilityVector prior =
          prior_for_period(schedule, out.history, static_cast<Index>(t));
      FitResult r = fit(periods[t], prior, config);
      out.history = append_period(out.history, prior, r.action_marginal, label);
      out.fits.push_back(std::move(r));
    } catch (const Error& e) {
      throw Error("period " + label + ": " + e.what());
    }
  }
  return out;
}

}  // namespace qrse
