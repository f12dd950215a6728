#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qrse/empirical.hpp"
#include "qrse/equilibrium.hpp"
#include "qrse/nelder_mead.hpp"
#include "qrse/priors.hpp"

namespace qrse {

inline constexpr double kMaxTemperature = 1e12;

struct FitConfig {
  Index grid_points = 501;
  double grid_pad_iqr = 2.0;
  Index bins = 50;
  NelderMeadOptions optimizer;
  UtilityKind utility = UtilityKind::BinaryLinear;
  Index entry_action = 0;
  Index exit_action = -1;  // -1: last action
  SupportPolicy support = SupportPolicy::Warn;
};

struct OptimizerTrace {
  Index iterations = 0;
  Index evaluations = 0;
  bool converged = false;
  Index infinite_objective_hits = 0;
  Index winning_start = -1;
};

struct FitResult {
  EquilibriumParams params;
  ProbabilityVector prior_used;
  Index entry_action = 0;
  Index exit_action = 1;
  double nll = kInf;
  double id = 0.0;
  double explained = 1.0;
  double kl_model_vs_empirical = 0.0;
  DensityTable density;
  ProbabilityVector action_marginal;
  ArrayXd kl_profile;
  double competition_gap = 0.0;
  OptimizerTrace trace;
};

struct RollingResult {
  BeliefHistory history;
  std::vector<FitResult> fits;
};

/// Uniform grid spanning the data range padded by grid_pad_iqr interquartile
/// ranges on each side.
Grid default_fit_grid(const EmpiricalDistribution& emp, const FitConfig& config);

EquilibriumModel make_model(const ProbabilityVector& prior, const EquilibriumParams& params,
                            const Grid& grid, const FitConfig& config);

/// -N sum_i w_i log(f[x_i] dx_i) over bin centers; +inf when the density
/// degenerates at an occupied bin (sentinel for the optimizer, not a throw).
double negative_log_likelihood(const EquilibriumModel& model, const EmpiricalDistribution& emp);

/// Binned KL of the empirical weights against model bin masses, mapped to
/// (distinguishability, explained fraction) = (1 - exp(-KL), exp(-KL)).
std::pair<double, double> information_distinguishability(const EmpiricalDistribution& emp,
                                                         const DensityTable& density);

/// Derivative-free NLL minimization over (log T, mu[, mu2], rho, gamma) with
/// deterministic multi-start; xi stays pinned to emp.xi.
FitResult fit(const EmpiricalDistribution& emp, const ProbabilityVector& prior,
              const FitConfig& config);

/// Sequential per-period fits with the prior schedule recursion.
RollingResult rolling_fit(const std::vector<EmpiricalDistribution>& periods,
                          const PriorSchedule& schedule, const FitConfig& config,
                          const std::vector<std::string>& period_labels = {});

}  // namespace qrse
