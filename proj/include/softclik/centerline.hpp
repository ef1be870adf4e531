#pragma once

#include <Eigen/Dense>

namespace softclik {

enum class InterpKind { Cubic, Linear };

/// Sampled curve on the uniform grid s_k = k/(n_s-1), k = 0..n_s-1, with
/// positions in R^d (d = 2 or 3). Immutable after construction; evaluation
/// between nodes uses a natural cubic spline (or piecewise-linear fallback).
class Centerline {
 public:
  /// values: n_s x d matrix, row k = position at s_k. n_s >= 2, d in {2,3}.
  explicit Centerline(Eigen::MatrixXd values, InterpKind kind = InterpKind::Cubic);

  int nodes() const { return static_cast<int>(values_.rows()); }
  int dim() const { return static_cast<int>(values_.cols()); }
  InterpKind interp() const { return kind_; }
  const Eigen::MatrixXd& values() const { return values_; }

  /// Grid coordinate of node k.
  double node_s(int k) const { return static_cast<double>(k) / (nodes() - 1); }

  /// Interpolated position at s in [0,1]; reproduces stored rows exactly at
  /// grid nodes. Throws DomainError outside [0,1] (beyond roundoff slack).
  Eigen::VectorXd evaluate(double s) const;

  /// New centerline on a uniform grid of n_new nodes, sampled via evaluate.
  Centerline resampled(int n_new) const;

 private:
  Eigen::MatrixXd values_;  // n_s x d
  Eigen::MatrixXd second_;  // natural-spline second derivatives, n_s x d
  InterpKind kind_;
};

}  // namespace softclik
