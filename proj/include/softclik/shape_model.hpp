#pragma once

#include <Eigen/Dense>

namespace softclik {

/// Actuation-to-shape map: q_a in R^m to a curve point in R^d at normalized
/// arc length s, plus the per-actuator partial derivatives at that point.
/// Implementations must be safe to call concurrently.
class ShapeModel {
 public:
  virtual ~ShapeModel() = default;

  virtual int actuation_dim() const = 0;
  virtual int ambient_dim() const = 0;

  /// Curve point in R^d, s in [0,1].
  virtual Eigen::VectorXd shape(const Eigen::VectorXd& q_a, double s) const = 0;

  /// d x m matrix whose column i is the partial derivative of shape with
  /// respect to q_a(i); must match central finite differences of shape.
  virtual Eigen::MatrixXd partials(const Eigen::VectorXd& q_a, double s) const = 0;
};

}  // namespace softclik
