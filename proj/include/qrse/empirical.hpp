#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qrse/errors.hpp"
#include "qrse/types.hpp"

namespace qrse {

inline constexpr Index kMinSampleCount = 100;

/// Observed outcome distribution as a normalized histogram. Occupied bins are
/// centered on their samples' mean (empty bins on the geometric midpoint), so
/// xi equals both the raw sample mean and the weighted center sum.
struct EmpiricalDistribution {
  ArrayXd bin_centers;
  ArrayXd bin_widths;
  ArrayXd weights;
  double xi = 0.0;
  Index sample_count = 0;
  bool has_empty_bins = false;

  // Sample-range summaries used to size fitting grids.
  double data_min = 0.0;
  double data_max = 0.0;
  double iqr = 0.0;
};

/// Linear-interpolation quantile of sorted values, q in [0,1].
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 0) throw Error("quantile of empty sample");
  const double pos = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline EmpiricalDistribution build_empirical(const std::vector<double>& samples,
                                             const ArrayXd& edges) {
  const Index n = static_cast<Index>(samples.size());
  if (n < kMinSampleCount) throw TooFewSamples("need at least 100 samples to build a histogram");
  const Index bins = edges.size() - 1;
  if (bins < 2) throw Error("histogram needs at least 2 bins");
  for (Index b = 0; b + 1 < edges.size(); ++b) {
    if (!(edges[b] < edges[b + 1])) throw Error("bin edges must be strictly increasing");
  }

  // Half-open cells [e_b, e_{b+1}); the last cell also takes its right edge.
  ArrayXd counts = ArrayXd::Zero(bins);
  ArrayXd sums = ArrayXd::Zero(bins);
  double total = 0.0;
  for (double s : samples) {
    if (!std::isfinite(s)) throw Error("samples must be finite");
    if (s < edges[0] || s > edges[bins]) throw Error("sample falls outside the bin edges");
    Index b = static_cast<Index>(std::upper_bound(edges.data(), edges.data() + edges.size(), s) -
                                 edges.data()) -
              1;
    if (b == bins) b = bins - 1;
    counts[b] += 1.0;
    sums[b] += s;
    total += s;
  }

  EmpiricalDistribution emp;
  emp.bin_centers.resize(bins);
  emp.bin_widths.resize(bins);
  emp.weights.resize(bins);
  for (Index b = 0; b < bins; ++b) {
    emp.bin_widths[b] = edges[b + 1] - edges[b];
    emp.bin_centers[b] =
        counts[b] > 0.0 ? sums[b] / counts[b] : 0.5 * (edges[b] + edges[b + 1]);
    emp.weights[b] = counts[b] / static_cast<double>(n);
    if (counts[b] == 0.0) emp.has_empty_bins = true;
  }
  emp.xi = total / static_cast<double>(n);
  emp.sample_count = n;

  std::vector<double> sorted(samples);
  std::sort(sorted.begin(), sorted.end());
  emp.data_min = sorted.front();
  emp.data_max = sorted.back();
  emp.iqr = sorted_quantile(sorted, 0.75) - sorted_quantile(sorted, 0.25);
  return emp;
}

inline EmpiricalDistribution build_empirical(const std::vector<double>& samples, Index bins) {
  if (samples.size() < static_cast<std::size_t>(kMinSampleCount)) {
    throw TooFewSamples("need at least 100 samples to build a histogram");
  }
  if (bins < 2) throw Error("histogram needs at least 2 bins");
  auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return build_empirical(samples, ArrayXd::LinSpaced(bins + 1, lo, hi));
}

}  // namespace qrse
