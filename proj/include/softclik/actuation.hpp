#pragma once

#include <Eigen/Dense>

#include "softclik/errors.hpp"

namespace softclik {

/// Dimensionless activation coordinates with per-coordinate box bounds
/// (negative values mean contraction for the fiber-actuated robot).
struct ActuationVector {
  Eigen::VectorXd values;
  Eigen::VectorXd lo, hi;

  ActuationVector(Eigen::VectorXd v, Eigen::VectorXd lo_in, Eigen::VectorXd hi_in)
      : values(std::move(v)), lo(std::move(lo_in)), hi(std::move(hi_in)) {
    if (lo.size() != values.size() || hi.size() != values.size())
      throw DomainError("activation bounds must match the value dimension");
    if (((hi - lo).array() < 0.0).any())
      throw DomainError("activation bounds must satisfy lo <= hi");
  }

  /// Uniform box [lo, hi]^m.
  static ActuationVector boxed(Eigen::VectorXd v, double lo, double hi) {
    const Eigen::Index m = v.size();
    return ActuationVector(std::move(v), Eigen::VectorXd::Constant(m, lo),
                           Eigen::VectorXd::Constant(m, hi));
  }

  int size() const { return static_cast<int>(values.size()); }

  /// Projects values onto the bounds box in place.
  void clamp() { values = values.cwiseMax(lo).cwiseMin(hi); }

  bool in_bounds() const {
    return (values.array() >= lo.array()).all() && (values.array() <= hi.array()).all();
  }
};

/// Symmetric positive definite feedback gain; definiteness is checked once at
/// construction so controllers can take it on faith.
class GainMatrix {
 public:
  explicit GainMatrix(Eigen::MatrixXd k) : k_(std::move(k)) {
    if (k_.rows() != k_.cols()) throw DomainError("gain matrix must be square");
    if (!k_.isApprox(k_.transpose(), 1e-12)) throw DomainError("gain matrix must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(k_);
    if (llt.info() != Eigen::Success)
      throw DomainError("gain matrix must be positive definite");
  }

  static GainMatrix diagonal(const Eigen::VectorXd& d) {
    if ((d.array() <= 0.0).any())
      throw DomainError("diagonal gain entries must be positive");
    return GainMatrix(Eigen::MatrixXd(d.asDiagonal()));
  }

  static GainMatrix uniform(int m, double gain) {
    return diagonal(Eigen::VectorXd::Constant(m, gain));
  }

  int size() const { return static_cast<int>(k_.rows()); }
  const Eigen::MatrixXd& matrix() const { return k_; }

 private:
  Eigen::MatrixXd k_;
};

}  // namespace softclik
