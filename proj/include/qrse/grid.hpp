#pragma once

#include <cmath>

#include "qrse/errors.hpp"
#include "qrse/types.hpp"

namespace qrse {

/// Quadrature grid over the outcome variable: strictly increasing points with
/// trapezoid weights, so integrate(v) = sum_i w_i v_i approximates the integral
/// of v over [points[0], points[n-1]].
class Grid {
 public:
  Grid(ArrayXd points) : points_(std::move(points)) {
    const Index n = points_.size();
    if (n < 2) throw Error("grid needs at least 2 points");
    for (Index i = 0; i + 1 < n; ++i) {
      if (!(points_[i] < points_[i + 1])) throw Error("grid points must be strictly increasing");
    }
    weights_ = ArrayXd::Zero(n);
    for (Index i = 0; i + 1 < n; ++i) {
      const double h = points_[i + 1] - points_[i];
      weights_[i] += 0.5 * h;
      weights_[i + 1] += 0.5 * h;
    }
  }

  static Grid uniform(double lo, double hi, Index n = 501) {
    if (!(lo < hi)) throw Error("grid lower bound must be below upper bound");
    if (n < 2) throw Error("grid needs at least 2 points");
    return Grid(ArrayXd::LinSpaced(n, lo, hi));
  }

  const ArrayXd& points() const { return points_; }
  const ArrayXd& weights() const { return weights_; }
  Index size() const { return points_.size(); }
  double lo() const { return points_[0]; }
  double hi() const { return points_[points_.size() - 1]; }

  template <class Derived>
  double integrate(const Eigen::ArrayBase<Derived>& values) const {
    if (values.size() != points_.size()) throw Error("grid/value size mismatch");
    return (weights_ * values).sum();
  }

 private:
  ArrayXd points_;
  ArrayXd weights_;
};

}  // namespace qrse
