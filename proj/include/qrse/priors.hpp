#pragma once

#include <string>
#include <utility>
#include <vector>

#include "qrse/errors.hpp"
#include "qrse/probability.hpp"
#include "qrse/types.hpp"

namespace qrse {

enum class PriorKind { Uniform, Previous, Mean, Extreme, Adaptive, Fixed };

/// Adaptive-prior entries are clipped into this range before renormalizing,
/// keeping every log p finite.
inline constexpr double kAdaptiveClipLo = 1e-6;

/// Rule producing the prior belief vector for each period of a rolling run.
struct PriorSchedule {
  PriorKind kind = PriorKind::Uniform;
  Index n_actions = 2;
  Index favored_action = 0;     // extreme
  double extreme_weight = 0.99; // extreme
  double lambda_e = 0.5;        // adaptive
  std::vector<ProbabilityVector> observed;  // adaptive: known action likelihoods per period
  ProbabilityVector fixed;      // fixed

  static PriorSchedule uniform(Index n_actions = 2) {
    PriorSchedule s;
    s.kind = PriorKind::Uniform;
    s.n_actions = n_actions;
    return s;
  }
  static PriorSchedule previous(Index n_actions = 2) {
    PriorSchedule s;
    s.kind = PriorKind::Previous;
    s.n_actions = n_actions;
    return s;
  }
  static PriorSchedule mean(Index n_actions = 2) {
    PriorSchedule s;
    s.kind = PriorKind::Mean;
    s.n_actions = n_actions;
    return s;
  }
  static PriorSchedule extreme(Index favored_action, double weight = 0.99, Index n_actions = 2) {
    if (!(weight > 0.0 && weight < 1.0)) throw Error("extreme weight must lie in (0,1)");
    if (favored_action < 0 || favored_action >= n_actions) {
      throw UnknownAction("favored action index out of range");
    }
    PriorSchedule s;
    s.kind = PriorKind::Extreme;
    s.n_actions = n_actions;
    s.favored_action = favored_action;
    s.extreme_weight = weight;
    return s;
  }
  static PriorSchedule adaptive(double lambda_e, std::vector<ProbabilityVector> observed,
                                Index n_actions = 2) {
    if (!(lambda_e >= 0.0 && lambda_e <= 1.0)) throw Error("adaptive strength must lie in [0,1]");
    PriorSchedule s;
    s.kind = PriorKind::Adaptive;
    s.n_actions = n_actions;
    s.lambda_e = lambda_e;
    s.observed = std::move(observed);
    return s;
  }
  static PriorSchedule fixed_prior(ProbabilityVector p) {
    validate_probability_vector(p);
    PriorSchedule s;
    s.kind = PriorKind::Fixed;
    s.n_actions = p.size();
    s.fixed = std::move(p);
    return s;
  }
};

struct BeliefRecord {
  std::string period_label;
  ProbabilityVector prior;
  ProbabilityVector fitted_marginal;
};

/// Append-only record of (prior used, fitted action marginal) per period.
/// Marginals are stored already normalized so later priors reproduce them
/// bit-exactly without renormalization drift.
class BeliefHistory {
 public:
  BeliefHistory() = default;

  Index size() const { return static_cast<Index>(records_.size()); }
  const BeliefRecord& record(Index t) const {
    if (t < 0 || t >= size()) throw MissingHistory("no belief record for requested period");
    return records_[static_cast<std::size_t>(t)];
  }
  const std::vector<BeliefRecord>& records() const { return records_; }

  friend BeliefHistory append_period(BeliefHistory history, ProbabilityVector prior,
                                     ProbabilityVector fitted_marginal, std::string period_label);

 private:
  std::vector<BeliefRecord> records_;
};

inline BeliefHistory append_period(BeliefHistory history, ProbabilityVector prior,
                                   ProbabilityVector fitted_marginal,
                                   std::string period_label = "") {
  validate_probability_vector(prior);
  validate_probability_vector(fitted_marginal);
  history.records_.push_back(
      BeliefRecord{std::move(period_label), std::move(prior), std::move(fitted_marginal)});
  return history;
}

/// The prior belief vector for period t under a schedule. History-reading
/// schedules (previous, mean, adaptive) fall back to uniform at t = 0 and
/// require records for every earlier period; the rest ignore history.
inline ProbabilityVector prior_for_period(const PriorSchedule& schedule,
                                          const BeliefHistory& history, Index t) {
  if (t < 0) throw Error("period index must be non-negative");
  const Index n = schedule.n_actions;
  switch (schedule.kind) {
    case PriorKind::Uniform:
      return uniform_probabilities(n);
    case PriorKind::Previous: {
      if (t == 0) return uniform_probabilities(n);
      if (history.size() < t) throw MissingHistory("previous-schedule prior needs period t-1");
      return history.record(t - 1).fitted_marginal;
    }
    case PriorKind::Mean: {
      if (t == 0) return uniform_probabilities(n);
      if (history.size() < t) throw MissingHistory("mean-schedule prior needs all periods < t");
      ProbabilityVector acc = ProbabilityVector::Zero(n);
      for (Index s = 0; s < t; ++s) acc += history.record(s).fitted_marginal;
      return acc / static_cast<double>(t);
    }
    case PriorKind::Extreme: {
      const double rest = (1.0 - schedule.extreme_weight) / static_cast<double>(n - 1);
      ProbabilityVector p = ProbabilityVector::Constant(n, rest);
      p[schedule.favored_action] = schedule.extreme_weight;
      return p;
    }
    case PriorKind::Adaptive: {
      if (t == 0) return uniform_probabilities(n);
      if (history.size() < t) throw MissingHistory("adaptive-schedule prior needs period t-1");
      if (static_cast<Index>(schedule.observed.size()) < t) {
        throw AdaptiveWithoutObservations("no observed action likelihoods for period t-1");
      }
      const ProbabilityVector& prev = history.record(t - 1).prior;
      const ProbabilityVector& seen = schedule.observed[static_cast<std::size_t>(t - 1)];
      if (seen.size() != n) throw Error("observed likelihood vector has wrong action count");
      ProbabilityVector p = prev + schedule.lambda_e * (prev - seen);
      p = p.max(kAdaptiveClipLo).min(1.0 - kAdaptiveClipLo);
      return p / p.sum();
    }
    case PriorKind::Fixed:
      return schedule.fixed;
  }
  throw Error("unknown prior schedule kind");
}

}  // namespace qrse
