#pragma once

#include <Eigen/Dense>

#include "softclik/shape_model.hpp"

namespace softclik {

/// Planar constant-curvature segment: length L, one actuation coordinate (the
/// curvature q itself).
struct CcParams {
  double L = 1.0;
  double q = 0.0;
};

/// Position of the arc at normalized coordinate s:
///   ( L sin(s q)/q, L (1 - cos(s q))/q ),
/// with a series branch near q = 0 where the closed form cancels.
Eigen::Vector2d cc_shape(const CcParams& p, double s);

/// Derivative of cc_shape with respect to q (the actuation coordinate).
Eigen::Vector2d cc_jacobian(const CcParams& p, double s);

/// ShapeModel wrapper (m = 1, d = 2) around the closed-form arc.
class CcShapeModel final : public ShapeModel {
 public:
  explicit CcShapeModel(double length = 1.0) : length_(length) {}

  int actuation_dim() const override { return 1; }
  int ambient_dim() const override { return 2; }
  double length() const { return length_; }

  Eigen::VectorXd shape(const Eigen::VectorXd& q_a, double s) const override;
  Eigen::MatrixXd partials(const Eigen::VectorXd& q_a, double s) const override;

 private:
  double length_;
};

}  // namespace softclik
