#include "softclik/cc_model.hpp"

#include <cmath>

#include "softclik/errors.hpp"

namespace softclik {

namespace {
// Below this curvature the closed forms lose digits to cancellation; the
// truncated series are accurate to well under 1e-12 there.
constexpr double kSeriesThreshold = 1e-4;
}  // namespace

Eigen::Vector2d cc_shape(const CcParams& p, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("cc_shape coordinate outside [0,1]");
  const double q = p.q;
  if (std::abs(q) < kSeriesThreshold) {
    const double x = p.L * (s - s * s * s * q * q / 6.0);
    const double y = p.L * (s * s * q / 2.0 - s * s * s * s * q * q * q / 24.0);
    return {x, y};
  }
  const double a = s * q;
  return {p.L * std::sin(a) / q, p.L * (1.0 - std::cos(a)) / q};
}

Eigen::Vector2d cc_jacobian(const CcParams& p, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("cc_jacobian coordinate outside [0,1]");
  const double q = p.q;
  const double s2 = s * s;
  if (std::abs(q) < kSeriesThreshold) {
    const double dx = p.L * (-s2 * s * q / 3.0 + s2 * s2 * s * q * q * q / 30.0);
    const double dy = p.L * (s2 / 2.0 - s2 * s2 * q * q / 8.0);
    return {dx, dy};
  }
  const double a = s * q;
  const double dx = p.L * (a * std::cos(a) - std::sin(a)) / (q * q);
  // cos(a) - 1 written as -2 sin^2(a/2): the direct form loses ~eps/q^2
  // absolute just above the switch point.
  const double half = std::sin(a / 2.0);
  const double dy = p.L * (a * std::sin(a) - 2.0 * half * half) / (q * q);
  return {dx, dy};
}

Eigen::VectorXd CcShapeModel::shape(const Eigen::VectorXd& q_a, double s) const {
  if (q_a.size() != 1) throw DomainError("constant-curvature model takes a single actuation coordinate");
  return cc_shape({length_, q_a(0)}, s);
}

Eigen::MatrixXd CcShapeModel::partials(const Eigen::VectorXd& q_a, double s) const {
  if (q_a.size() != 1) throw DomainError("constant-curvature model takes a single actuation coordinate");
  return cc_jacobian({length_, q_a(0)}, s);
}

}  // namespace softclik
