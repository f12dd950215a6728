#pragma once

#include <cmath>
#include <string>

#include "qrse/errors.hpp"
#include "qrse/types.hpp"

namespace qrse {

inline constexpr double kProbabilitySumTol = 1e-12;

/// A validated probability vector is just an ArrayXd whose entries are
/// non-negative and sum to 1 within kProbabilitySumTol.
using ProbabilityVector = ArrayXd;

inline bool is_probability_vector(const ArrayXd& values, double tol = kProbabilitySumTol) {
  if (values.size() == 0) return false;
  if ((values < 0.0).any()) return false;
  return std::abs(values.sum() - 1.0) <= tol;
}

/// Returns the vector unchanged iff it is a valid probability vector.
inline ProbabilityVector validate_probability_vector(ArrayXd values) {
  if (values.size() == 0) throw Error("empty probability vector");
  for (Index i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0)) {
      throw NegativeEntry("probability entry " + std::to_string(i) + " is " +
                          std::to_string(values[i]));
    }
  }
  const double sum = values.sum();
  const double deviation = sum - 1.0;
  if (std::abs(deviation) > kProbabilitySumTol) {
    throw NotNormalized("probabilities sum to " + std::to_string(sum) + " (deviation " +
                        std::to_string(deviation) + ")");
  }
  return values;
}

inline ProbabilityVector uniform_probabilities(Index n) {
  return ArrayXd::Constant(n, 1.0 / static_cast<double>(n));
}

}  // namespace qrse
