#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "qrse/equilibrium.hpp"
#include "qrse/errors.hpp"
#include "qrse/types.hpp"

namespace qrse {

/// Uniform double in [0,1) from the top 53 bits of the generator, so streams
/// are identical across platforms and standard libraries.
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF sampling from a gridded density: cell masses by trapezoid
/// rule, draws placed uniformly within the selected cell (piecewise-linear
/// CDF). Deterministic given the seed.
inline std::vector<double> sample_from_density(const DensityTable& table, Index n,
                                               std::uint64_t seed) {
  const ArrayXd& x = table.grid.points();
  const Index cells = x.size() - 1;
  std::vector<double> cumulative(static_cast<std::size_t>(cells));
  double total = 0.0;
  for (Index c = 0; c < cells; ++c) {
    total += 0.5 * (table.values[c] + table.values[c + 1]) * (x[c + 1] - x[c]);
    cumulative[static_cast<std::size_t>(c)] = total;
  }
  if (!(total > 0.0)) throw Error("density table carries no mass");

  std::mt19937_64 rng(seed);
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const double u = uniform_unit(rng) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const Index c = it == cumulative.end()
                        ? cells - 1
                        : static_cast<Index>(it - cumulative.begin());
    const double lo_mass = c == 0 ? 0.0 : cumulative[static_cast<std::size_t>(c) - 1];
    const double cell_mass = cumulative[static_cast<std::size_t>(c)] - lo_mass;
    const double frac = cell_mass > 0.0 ? (u - lo_mass) / cell_mass : 0.5;
    samples.push_back(x[c] + frac * (x[c + 1] - x[c]));
  }
  return samples;
}

inline std::vector<double> sample_from_model(const EquilibriumModel& model, Index n,
                                             std::uint64_t seed,
                                             SupportPolicy policy = SupportPolicy::Warn) {
  return sample_from_density(marginal_density(model, policy), n, seed);
}

}  // namespace qrse
