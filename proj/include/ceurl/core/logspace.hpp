#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace ceurl {

/// Log-probability of an event that cannot happen.
///
/// The sentinel is -infinity and follows IEEE absorption: adding any finite
/// log-probability keeps it impossible, and log_add(impossible, x) == x.
template <typename Scalar = double>
constexpr Scalar impossible() {
  return -std::numeric_limits<Scalar>::infinity();
}

template <typename Scalar>
bool is_impossible(Scalar x) {
  return x == impossible<Scalar>();
}

/// log(p) with log(0) mapped to the impossible sentinel.
template <typename Scalar>
Scalar safe_log(Scalar p) {
  return p > Scalar(0) ? std::log(p) : impossible<Scalar>();
}

/// log(exp(a) + exp(b)).
template <typename Scalar>
Scalar log_add(Scalar a, Scalar b) {
  if (is_impossible(a)) return b;
  if (is_impossible(b)) return a;
  const Scalar hi = a > b ? a : b;
  const Scalar lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

/// Elementwise std::exp. Eigen's vectorized exp clamps its argument, so
/// exp(-inf) would come back as a denormal rather than 0.
template <typename Derived>
typename Derived::PlainObject exp_of(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.derived().unaryExpr([](Scalar v) { return std::exp(v); });
}

/// Max-shifted log-sum-exp. An all-impossible input yields impossible().
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) return impossible<Scalar>();
  const Scalar hi = x.maxCoeff();
  if (is_impossible(hi)) return hi;
  return hi + std::log(exp_of((x.derived().array() - hi).matrix()).sum());
}

/// Shift a log-weight vector so that it exponentiates to a distribution.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> log_normalize(
    const Eigen::DenseBase<Derived>& x) {
  const auto z = log_sum_exp(x);
  return (x.derived().array() - z).matrix();
}

/// Numerically stable softmax.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(
    const Eigen::DenseBase<Derived>& logits) {
  return exp_of(log_normalize(logits));
}

}  // namespace ceurl
