#pragma once

#include <cmath>
#include <functional>
#include <utility>

#include "qrse/errors.hpp"
#include "qrse/types.hpp"

namespace qrse {

enum class UtilityKind { BinaryLinear, TernaryLinear, Table };

/// Action-conditional payoff U[a, x].
///
/// binary-linear:  U[entry, x] = x - mu,  U[other, x] = -(x - mu)
/// ternary-linear: U[enter, x] = x - mu1, U[hold, x] = 0, U[exit, x] = -(x - mu2)
/// table:          explicit callable payoff
class UtilityModel {
 public:
  static UtilityModel binary_linear(double mu, Index entry_action = 0) {
    if (entry_action < 0 || entry_action > 1) {
      throw UnknownAction("binary entry action must be 0 or 1");
    }
    UtilityModel m;
    m.kind_ = UtilityKind::BinaryLinear;
    m.n_actions_ = 2;
    m.mu1_ = mu;
    m.entry_ = entry_action;
    m.exit_ = 1 - entry_action;
    return m;
  }

  static UtilityModel ternary_linear(double mu1, double mu2, Index enter_action = 0,
                                     Index hold_action = 1, Index exit_action = 2) {
    UtilityModel m;
    m.kind_ = UtilityKind::TernaryLinear;
    m.n_actions_ = 3;
    m.mu1_ = mu1;
    m.mu2_ = mu2;
    m.entry_ = enter_action;
    m.hold_ = hold_action;
    m.exit_ = exit_action;
    if (enter_action == hold_action || enter_action == exit_action || hold_action == exit_action ||
        enter_action < 0 || enter_action > 2 || hold_action < 0 || hold_action > 2 ||
        exit_action < 0 || exit_action > 2) {
      throw UnknownAction("ternary action indices must be a permutation of {0,1,2}");
    }
    return m;
  }

  static UtilityModel table(Index n_actions, std::function<double(Index, double)> payoff) {
    if (n_actions < 2) throw Error("utility table needs at least 2 actions");
    UtilityModel m;
    m.kind_ = UtilityKind::Table;
    m.n_actions_ = n_actions;
    m.payoff_ = std::move(payoff);
    return m;
  }

  double operator()(Index action, double x) const {
    if (action < 0 || action >= n_actions_) {
      throw UnknownAction("action index out of range for utility model");
    }
    switch (kind_) {
      case UtilityKind::BinaryLinear:
        return action == entry_ ? x - mu1_ : -(x - mu1_);
      case UtilityKind::TernaryLinear:
        if (action == hold_) return 0.0;
        return action == entry_ ? x - mu1_ : -(x - mu2_);
      case UtilityKind::Table:
        return payoff_(action, x);
    }
    return 0.0;
  }

  /// Utilities of all actions at x.
  ArrayXd row(double x) const {
    ArrayXd u(n_actions_);
    for (Index a = 0; a < n_actions_; ++a) u[a] = (*this)(a, x);
    return u;
  }

  UtilityKind kind() const { return kind_; }
  Index n_actions() const { return n_actions_; }
  Index entry_action() const { return entry_; }
  Index exit_action() const { return exit_; }
  Index hold_action() const { return hold_; }
  double mu() const { return mu1_; }
  double mu2() const { return mu2_; }

  /// Same shape, new indifference point(s). Used by the fitter.
  UtilityModel with_mu(double mu1) const {
    UtilityModel m = *this;
    m.mu1_ = mu1;
    return m;
  }
  UtilityModel with_mus(double mu1, double mu2) const {
    UtilityModel m = *this;
    m.mu1_ = mu1;
    m.mu2_ = mu2;
    return m;
  }

 private:
  UtilityModel() = default;

  UtilityKind kind_ = UtilityKind::BinaryLinear;
  Index n_actions_ = 2;
  double mu1_ = 0.0;
  double mu2_ = 0.0;
  Index entry_ = 0;
  Index hold_ = -1;
  Index exit_ = 1;
  std::function<double(Index, double)> payoff_;
};

inline double utility(const UtilityModel& model, Index action, double x) {
  if (!std::isfinite(x)) throw Error("utility requires finite x");
  return model(action, x);
}

}  // namespace qrse
