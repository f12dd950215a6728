#pragma once

#include <cmath>
#include <optional>

#include "qrse/errors.hpp"
#include "qrse/types.hpp"

namespace qrse {

/// Temperatures below this are treated as degenerate (hard argmax limit).
inline constexpr double kMinTemperature = 1e-8;

/// Free parameters of the equilibrium model. `mu2` is present only for
/// ternary utilities (separate enter/exit indifference points). `xi` is the
/// observed mean outcome, fixed from data and carried through fitting
/// unchanged rather than treated as a free parameter.
struct EquilibriumParams {
  double T = 1.0;
  double mu = 0.0;
  std::optional<double> mu2;
  double rho = 0.0;
  double gamma = 0.0;
  double xi = 0.0;

  void validate() const {
    if (!(T > 0.0) || !std::isfinite(T)) throw Error("temperature must be positive and finite");
    if (!std::isfinite(mu) || !std::isfinite(rho) || !std::isfinite(gamma) || !std::isfinite(xi)) {
      throw Error("equilibrium parameters must be finite");
    }
    if (mu2 && !std::isfinite(*mu2)) throw Error("equilibrium parameters must be finite");
  }
};

}  // namespace qrse
