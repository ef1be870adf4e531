#pragma once

#include <utility>

#include <Eigen/Dense>

#include "softclik/shape_model.hpp"

namespace softclik {

/// Synthetic shape model that is exactly linear in the actuation:
/// shape(q, s) = (A0 + s A1) q + b0 + s b1. Its composed task dynamics have
/// closed forms, which pins down the controller recursion to roundoff.
class LinearShapeModel final : public ShapeModel {
 public:
  LinearShapeModel(Eigen::MatrixXd a0, Eigen::MatrixXd a1, Eigen::VectorXd b0,
                   Eigen::VectorXd b1)
      : a0_(std::move(a0)), a1_(std::move(a1)), b0_(std::move(b0)), b1_(std::move(b1)) {}

  int actuation_dim() const override { return static_cast<int>(a0_.cols()); }
  int ambient_dim() const override { return static_cast<int>(a0_.rows()); }

  Eigen::VectorXd shape(const Eigen::VectorXd& q_a, double s) const override {
    return (a0_ + s * a1_) * q_a + b0_ + s * b1_;
  }

  Eigen::MatrixXd partials(const Eigen::VectorXd& q_a, double s) const override {
    (void)q_a;
    return a0_ + s * a1_;
  }

 private:
  Eigen::MatrixXd a0_, a1_;
  Eigen::VectorXd b0_, b1_;
};

}  // namespace softclik
