#include "softclik/centerline.hpp"

#include <cmath>

#include "softclik/errors.hpp"

namespace softclik {

namespace {

// Natural cubic spline second derivatives on a uniform grid, one column per
// dimension. Tridiagonal system M[k-1] + 4 M[k] + M[k+1] = 6 (y[k-1] - 2 y[k]
// + y[k+1]) / h^2 for interior k, M[0] = M[n-1] = 0, solved by the Thomas
// sweep.
Eigen::MatrixXd spline_second_derivatives(const Eigen::MatrixXd& y) {
  const int n = static_cast<int>(y.rows());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, y.cols());
  if (n < 3) return m;
  const double h = 1.0 / (n - 1);
  const int ni = n - 2;  // interior unknowns
  Eigen::VectorXd diag(ni);
  Eigen::MatrixXd rhs(ni, y.cols());
  for (int k = 0; k < ni; ++k)
    rhs.row(k) = 6.0 / (h * h) * (y.row(k) - 2.0 * y.row(k + 1) + y.row(k + 2));
  diag(0) = 4.0;
  for (int k = 1; k < ni; ++k) {
    const double w = 1.0 / diag(k - 1);
    diag(k) = 4.0 - w;
    rhs.row(k) -= w * rhs.row(k - 1);
  }
  m.row(ni) = rhs.row(ni - 1) / diag(ni - 1);
  for (int k = ni - 2; k >= 0; --k)
    m.row(k + 1) = (rhs.row(k) - m.row(k + 2)) / diag(k);
  return m;
}

}  // namespace

Centerline::Centerline(Eigen::MatrixXd values, InterpKind kind)
    : values_(std::move(values)), kind_(kind) {
  if (values_.rows() < 2) throw DomainError("centerline needs at least 2 nodes");
  if (values_.cols() != 2 && values_.cols() != 3)
    throw DomainError("centerline dimension must be 2 or 3");
  if (!values_.allFinite()) throw DomainError("centerline values must be finite");
  if (kind_ == InterpKind::Cubic)
    second_ = spline_second_derivatives(values_);
  else
    second_ = Eigen::MatrixXd::Zero(values_.rows(), values_.cols());
}

Eigen::VectorXd Centerline::evaluate(double s) const {
  if (!(s >= -1e-12 && s <= 1.0 + 1e-12))
    throw DomainError("centerline evaluation point outside [0,1]");
  s = std::min(std::max(s, 0.0), 1.0);
  const int n = nodes();
  int k = static_cast<int>(s * (n - 1));
  if (k > n - 2) k = n - 2;
  // Exact node hits return the stored row so nodes reproduce bit-for-bit.
  if (s == node_s(k)) return values_.row(k).transpose();
  if (s == node_s(k + 1)) return values_.row(k + 1).transpose();
  const double h = 1.0 / (n - 1);
  const double t = (s - node_s(k)) / h;  // local coordinate in [0,1]
  if (kind_ == InterpKind::Linear)
    return (values_.row(k) + t * (values_.row(k + 1) - values_.row(k))).transpose();
  const double u = 1.0 - t;
  // f = u y_k + t y_{k+1} + h^2/6 [ (u^3-u) M_k + (t^3-t) M_{k+1} ]
  return (values_.row(k) * u + values_.row(k + 1) * t +
          (h * h / 6.0) * ((u * u * u - u) * second_.row(k) +
                           (t * t * t - t) * second_.row(k + 1)))
      .transpose();
}

Centerline Centerline::resampled(int n_new) const {
  if (n_new < 2) throw DomainError("resample needs at least 2 nodes");
  Eigen::MatrixXd out(n_new, dim());
  for (int k = 0; k < n_new; ++k)
    out.row(k) = evaluate(static_cast<double>(k) / (n_new - 1));
  return Centerline(std::move(out), kind_);
}

}  // namespace softclik
