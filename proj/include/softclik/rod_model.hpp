#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "softclik/centerline.hpp"

namespace softclik {

/// Coefficients of the per-fiber activation profiles. Fiber 1 runs parallel
/// to the axis at an offset (pure bending plus shortening); fibers 2 and 3
/// are a helical pair of opposite handedness (bending that rotates with s,
/// opposite twist, shared shortening).
///   b1(s) = (0, c_b, 0)                          e1(s) = c_e
///   b2(s) = c_h (-sin th, cos th, -tau_c)        e2(s) = c_e2
///   b3(s) = c_h ( sin th, cos th,  tau_c)        e3(s) = c_e2
/// with th = 2 pi n_t s. Swapping activations 2 and 3 mirrors the intrinsic
/// strains, so equilibria reflect across the plane spanned by gravity and
/// the base d2 axis.
struct FiberProfiles {
  double c_b = 2.0;    // fiber-1 curvature per unit activation, 1/m
  double c_e = 0.15;   // fiber-1 extension per unit activation
  double c_h = 1.2;    // helical curvature magnitude, 1/m
  double tau_c = 0.5;  // helical twist fraction of c_h
  double c_e2 = 0.1;   // helical extension per unit activation
  double n_t = 1.5;    // helix turns over the rod length

  Eigen::Vector3d b(int fiber, double s) const;
  double e(int fiber) const;
};

struct RodParams {
  double L = 0.18;    // m
  double EI1 = 1e-3;  // N m^2
  double EI2 = 1e-3;  // N m^2
  double GJ = 8e-4;   // N m^2
  double EA = 50.0;   // N
  double w = 0.25;    // weight per unit length, N/m
  Eigen::Vector3d gravity = {0.0, 0.0, -1.0};  // unit direction
  FiberProfiles fibers;

  void validate() const;  // throws DomainError on nonphysical values

  /// Base frame: d3(0) along gravity, so zero activation hangs straight.
  Eigen::Quaterniond base_frame() const;
};

/// Intrinsic curvature u_hat = sum_i q_i b_i(s) and extension
/// zeta_hat = 1 + sum_i q_i e_i. Throws NonphysicalActivation if the
/// activation would make the rod vanish (zeta_hat <= 0).
struct IntrinsicStrains {
  Eigen::Vector3d u_hat;
  double zeta_hat;
};
IntrinsicStrains intrinsic_strains(const RodParams& p, const Eigen::VectorXd& q_a, double s);

/// State along the rod: position, frame quaternion (columns d1,d2,d3),
/// internal force n, internal moment m; packed as 13 doubles for the
/// integrator.
struct RodState {
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  Eigen::Quaterniond frame = Eigen::Quaterniond::Identity();
  Eigen::Vector3d n = Eigen::Vector3d::Zero();
  Eigen::Vector3d m = Eigen::Vector3d::Zero();

  Eigen::Matrix<double, 13, 1> pack() const;
  static RodState unpack(const Eigen::Matrix<double, 13, 1>& y);
};

/// Right-hand side of the equilibrium equations in normalized arc length
/// (all spatial rates carry the factor L). gravity_scale multiplies w for
/// homotopy continuation.
Eigen::Matrix<double, 13, 1> rod_rhs(const RodParams& p, const Eigen::VectorXd& q_a,
                                     double s, const Eigen::Matrix<double, 13, 1>& y,
                                     double gravity_scale = 1.0);

struct BvpSolution {
  Centerline centerline;                   // d = 3, n_s nodes
  std::vector<Eigen::Quaterniond> frames;  // per node
  Eigen::Matrix<double, 6, 1> xi;          // converged base loads (n(0), m(0))
  double residual = 0.0;                   // norm of the free-end loads
  int iterations = 0;
};

/// Shooting solve of the clamped-base / free-tip boundary value problem:
/// unknown base loads xi = (n(0), m(0)), residual the integrated tip loads
/// (n(1), m(1)), damped Newton with a forward-difference Jacobian, gravity
/// homotopy restart on stagnation. Throws SolverError if even the homotopy
/// fails. xi_guess warm-starts the solve.
BvpSolution solve_bvp(const RodParams& p, const Eigen::VectorXd& q_a, int n_s,
                      double tol = 1e-10, int max_iter = 60,
                      const Eigen::Matrix<double, 6, 1>* xi_guess = nullptr);

/// Central finite differences of the equilibrium centerline with respect to
/// each activation coordinate, warm-started from the base solution. Column i
/// of the result is an n_s x 3 sensitivity. Validation-only; the controller
/// differentiates the learned model instead.
std::vector<Eigen::MatrixXd> shape_partials(const RodParams& p, const Eigen::VectorXd& q_a,
                                            int n_s, double tol = 1e-10, double h = 1e-5);

}  // namespace softclik
