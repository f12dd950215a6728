#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace qrse {

using Eigen::Index;
using ArrayXd = Eigen::ArrayXd;
using ArrayXXd = Eigen::ArrayXXd;
using VectorXd = Eigen::VectorXd;

template <class Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(sum(exp(v))) with max subtraction. -inf entries drop out; an
/// all -inf input returns -inf.
template <class Derived>
typename Derived::Scalar log_sum_exp(const Eigen::ArrayBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  const Scalar m = v.maxCoeff();
  if (!(m > -std::numeric_limits<Scalar>::infinity())) {
    return -std::numeric_limits<Scalar>::infinity();
  }
  return m + std::log((v - m).exp().sum());
}

/// Shannon entropy of a probability vector in nats, with 0 log 0 = 0.
template <class Derived>
typename Derived::Scalar entropy(const Eigen::ArrayBase<Derived>& p) {
  using Scalar = typename Derived::Scalar;
  Scalar h = 0;
  for (Index i = 0; i < p.size(); ++i) {
    const Scalar pi = p[i];
    if (pi > 0) h -= pi * std::log(pi);
  }
  return h;
}

}  // namespace qrse
