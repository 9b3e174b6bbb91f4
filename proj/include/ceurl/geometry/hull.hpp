#pragma once

#include "ceurl/core/types.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace ceurl {

/// Result of a least-distance query against the convex hull of a point set.
template <typename Scalar>
struct BasicHullQueryResult {
  bool inside = false;
  Scalar distance = 0;
  /// Convex weights over the input vertices realizing the closest hull point.
  VectorX<Scalar> witness_weights;
  int iterations = 0;
};

using HullQueryResult = BasicHullQueryResult<double>;

/// Closest point of conv{columns of `vertices`} to `point` (Wolfe's
/// minimum-norm-point active-set method applied to the shifted vertices).
///
/// Terminates when the optimality gap x.x - min_i x.v_i falls below a
/// relative 1e-15, which is tight enough for distances near 1e-8.
template <typename Scalar>
BasicHullQueryResult<Scalar> hull_membership(const VectorX<Scalar>& point, const MatrixX<Scalar>& vertices,
                                             Scalar tol = Scalar(1e-8)) {
  if (vertices.cols() == 0) throw std::invalid_argument("hull_membership: empty vertex set");
  if (vertices.rows() != point.size()) throw std::invalid_argument("hull_membership: dimension mismatch");

  const Eigen::Index n = vertices.cols();
  const MatrixX<Scalar> shifted = vertices.colwise() - point;
  const VectorX<Scalar> sq_norms = shifted.colwise().squaredNorm().transpose();
  const Scalar scale = std::max(Scalar(1), sq_norms.maxCoeff());
  const Scalar gap_tol = Scalar(1e-15) * scale;
  const Scalar weight_floor = Scalar(1e-14);

  Eigen::Index first = 0;
  sq_norms.minCoeff(&first);
  std::vector<Eigen::Index> active{first};
  VectorX<Scalar> w = VectorX<Scalar>::Ones(1);
  VectorX<Scalar> x = shifted.col(first);

  auto combine = [&](const VectorX<Scalar>& weights) {
    VectorX<Scalar> out = VectorX<Scalar>::Zero(shifted.rows());
    for (std::size_t k = 0; k < active.size(); ++k) out += weights(static_cast<Eigen::Index>(k)) * shifted.col(active[k]);
    return out;
  };

  // Minimizer of |sum a_k v_k| over the affine hull of the active set.
  auto affine_minimizer = [&]() {
    const auto m = static_cast<Eigen::Index>(active.size());
    MatrixX<Scalar> kkt = MatrixX<Scalar>::Zero(m + 1, m + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j)
        kkt(i, j) = shifted.col(active[static_cast<std::size_t>(i)]).dot(shifted.col(active[static_cast<std::size_t>(j)]));
      kkt(i, m) = kkt(m, i) = Scalar(1);
    }
    VectorX<Scalar> rhs = VectorX<Scalar>::Zero(m + 1);
    rhs(m) = Scalar(1);
    const VectorX<Scalar> sol = kkt.completeOrthogonalDecomposition().solve(rhs);
    VectorX<Scalar> alpha = sol.head(m);
    return VectorX<Scalar>(alpha / alpha.sum());
  };

  int iterations = 0;
  const int max_iterations = 50 * static_cast<int>(n) + 1000;
  while (iterations++ < max_iterations) {
    const VectorX<Scalar> dots = shifted.transpose() * x;
    Eigen::Index best = 0;
    const Scalar best_dot = dots.minCoeff(&best);
    if (x.squaredNorm() - best_dot <= gap_tol) break;
    if (std::find(active.begin(), active.end(), best) != active.end()) break;
    active.push_back(best);
    w.conservativeResize(w.size() + 1);
    w(w.size() - 1) = Scalar(0);

    while (true) {
      const VectorX<Scalar> alpha = affine_minimizer();
      if ((alpha.array() > weight_floor).all()) {
        w = alpha;
        x = combine(w);
        break;
      }
      // Step from w toward alpha until the first weight hits zero.
      Scalar theta = Scalar(1);
      for (Eigen::Index k = 0; k < alpha.size(); ++k)
        if (alpha(k) <= weight_floor) theta = std::min(theta, w(k) / (w(k) - alpha(k)));
      w = (Scalar(1) - theta) * w + theta * alpha;
      std::vector<Eigen::Index> kept;
      std::vector<Scalar> kept_w;
      for (std::size_t k = 0; k < active.size(); ++k)
        if (w(static_cast<Eigen::Index>(k)) > weight_floor) {
          kept.push_back(active[k]);
          kept_w.push_back(w(static_cast<Eigen::Index>(k)));
        }
      if (kept.empty()) {  // numerical corner: fall back to the best single vertex
        kept.push_back(active.back());
        kept_w.push_back(Scalar(1));
      }
      active = kept;
      w = Eigen::Map<VectorX<Scalar>>(kept_w.data(), static_cast<Eigen::Index>(kept_w.size()));
      w /= w.sum();
      x = combine(w);
      if (active.size() == 1) break;
    }
  }

  BasicHullQueryResult<Scalar> out;
  out.distance = x.norm();
  out.inside = out.distance <= tol;
  out.witness_weights = VectorX<Scalar>::Zero(n);
  for (std::size_t k = 0; k < active.size(); ++k) out.witness_weights(active[k]) += w(static_cast<Eigen::Index>(k));
  out.iterations = iterations;
  return out;
}

}  // namespace ceurl
