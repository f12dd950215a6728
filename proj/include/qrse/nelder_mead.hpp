#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "qrse/errors.hpp"
#include "qrse/types.hpp"

namespace qrse {

struct NelderMeadOptions {
  Index max_iters = 2000;
  double diameter_tol = 1e-8;
};

struct NelderMeadResult {
  VectorXd x;
  double fx = kInf;
  Index iterations = 0;
  Index evaluations = 0;
  bool converged = false;
};

/// Derivative-free simplex minimization (reflection 1, expansion 2,
/// contraction 0.5, shrink 0.5). Deterministic; tolerates +inf objective
/// values, which simply lose every comparison. Converged means the simplex
/// diameter dropped below the tolerance within the iteration budget.
inline NelderMeadResult nelder_mead(const std::function<double(const VectorXd&)>& objective,
                                    const VectorXd& start, const VectorXd& steps,
                                    const NelderMeadOptions& opts = {}) {
  const Index dim = start.size();
  if (steps.size() != dim) throw Error("simplex step vector must match dimension");

  NelderMeadResult result;
  const auto f = [&](const VectorXd& x) {
    ++result.evaluations;
    const double v = objective(x);
    return std::isnan(v) ? kInf : v;
  };

  std::vector<VectorXd> vertex(static_cast<std::size_t>(dim) + 1, start);
  std::vector<double> value(static_cast<std::size_t>(dim) + 1);
  for (Index i = 0; i < dim; ++i) {
    vertex[static_cast<std::size_t>(i) + 1][i] +=
        steps[i] != 0.0 ? steps[i] : 0.25;
  }
  for (std::size_t i = 0; i < vertex.size(); ++i) value[i] = f(vertex[i]);

  std::vector<std::size_t> order(vertex.size());
  const auto sort_vertices = [&] {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
  };
  const auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 0; i < vertex.size(); ++i) {
      for (std::size_t j = i + 1; j < vertex.size(); ++j) {
        d = std::max(d, (vertex[i] - vertex[j]).norm());
      }
    }
    return d;
  };

  for (result.iterations = 0; result.iterations < opts.max_iters; ++result.iterations) {
    sort_vertices();
    if (diameter() < opts.diameter_tol) {
      result.converged = true;
      break;
    }

    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    VectorXd centroid = VectorXd::Zero(dim);
    for (std::size_t i : order) {
      if (i != worst) centroid += vertex[i];
    }
    centroid /= static_cast<double>(dim);

    const VectorXd reflected = centroid + (centroid - vertex[worst]);
    const double f_reflected = f(reflected);

    if (f_reflected < value[best]) {
      const VectorXd expanded = centroid + 2.0 * (centroid - vertex[worst]);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        vertex[worst] = expanded;
        value[worst] = f_expanded;
      } else {
        vertex[worst] = reflected;
        value[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < value[second_worst]) {
      vertex[worst] = reflected;
      value[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < value[worst];
    const VectorXd contracted =
        outside ? centroid + 0.5 * (reflected - centroid) : centroid + 0.5 * (vertex[worst] - centroid);
    const double f_contracted = f(contracted);
    if (f_contracted < std::min(f_reflected, value[worst])) {
      vertex[worst] = contracted;
      value[worst] = f_contracted;
      continue;
    }

    for (std::size_t i : order) {
      if (i == best) continue;
      vertex[i] = vertex[best] + 0.5 * (vertex[i] - vertex[best]);
      value[i] = f(vertex[i]);
    }
  }

  sort_vertices();
  result.x = vertex[order.front()];
  result.fx = value[order.front()];
  return result;
}

}  // namespace qrse
