#include "softclik/rod_model.hpp"

#include <cmath>

#include "softclik/errors.hpp"

namespace softclik {

Eigen::Vector3d FiberProfiles::b(int fiber, double s) const {
  switch (fiber) {
    case 0:
      return {0.0, c_b, 0.0};
    case 1: {
      const double th = 2.0 * M_PI * n_t * s;
      return {-c_h * std::sin(th), c_h * std::cos(th), -c_h * tau_c};
    }
    case 2: {
      const double th = 2.0 * M_PI * n_t * s;
      return {c_h * std::sin(th), c_h * std::cos(th), c_h * tau_c};
    }
    default:
      throw DomainError("fiber index out of range");
  }
}

double FiberProfiles::e(int fiber) const {
  switch (fiber) {
    case 0:
      return c_e;
    case 1:
    case 2:
      return c_e2;
    default:
      throw DomainError("fiber index out of range");
  }
}

void RodParams::validate() const {
  if (!(L > 0.0)) throw DomainError("rod length must be positive");
  if (!(EI1 > 0.0 && EI2 > 0.0 && GJ > 0.0 && EA > 0.0))
    throw DomainError("rod stiffnesses must be positive");
  if (!(w >= 0.0)) throw DomainError("rod weight density must be nonnegative");
  if (std::abs(gravity.norm() - 1.0) > 1e-9)
    throw DomainError("gravity direction must be a unit vector");
}

Eigen::Quaterniond RodParams::base_frame() const {
  const Eigen::Vector3d ez(0.0, 0.0, 1.0);
  const double c = gravity.dot(ez);
  if (c > 1.0 - 1e-12) return Eigen::Quaterniond::Identity();
  if (c < -1.0 + 1e-12) return Eigen::Quaterniond(0.0, 1.0, 0.0, 0.0);  // half turn about x
  return Eigen::Quaterniond::FromTwoVectors(ez, gravity).normalized();
}

IntrinsicStrains intrinsic_strains(const RodParams& p, const Eigen::VectorXd& q_a, double s) {
  if (q_a.size() != 3) throw DomainError("the three-fiber rod takes 3 activation coordinates");
  IntrinsicStrains out;
  out.u_hat.setZero();
  out.zeta_hat = 1.0;
  for (int i = 0; i < 3; ++i) {
    out.u_hat += q_a(i) * p.fibers.b(i, s);
    out.zeta_hat += q_a(i) * p.fibers.e(i);
  }
  if (!(out.zeta_hat > 0.0))
    throw NonphysicalActivation("activation drives intrinsic extension nonpositive");
  return out;
}

Eigen::Matrix<double, 13, 1> RodState::pack() const {
  Eigen::Matrix<double, 13, 1> y;
  y.segment<3>(0) = r;
  y(3) = frame.w();
  y(4) = frame.x();
  y(5) = frame.y();
  y(6) = frame.z();
  y.segment<3>(7) = n;
  y.segment<3>(10) = m;
  return y;
}

RodState RodState::unpack(const Eigen::Matrix<double, 13, 1>& y) {
  RodState st;
  st.r = y.segment<3>(0);
  st.frame = Eigen::Quaterniond(y(3), y(4), y(5), y(6));
  st.n = y.segment<3>(7);
  st.m = y.segment<3>(10);
  return st;
}

Eigen::Matrix<double, 13, 1> rod_rhs(const RodParams& p, const Eigen::VectorXd& q_a,
                                     double s, const Eigen::Matrix<double, 13, 1>& y,
                                     double gravity_scale) {
  const Eigen::Quaterniond h = Eigen::Quaterniond(y(3), y(4), y(5), y(6)).normalized();
  const Eigen::Matrix3d R = h.toRotationMatrix();
  const Eigen::Vector3d d3 = R.col(2);
  const Eigen::Vector3d n = y.segment<3>(7);
  const Eigen::Vector3d m = y.segment<3>(10);

  const IntrinsicStrains hat = intrinsic_strains(p, q_a, s);
  const double zeta = hat.zeta_hat + n.dot(d3) / p.EA;
  const Eigen::Vector3d m_local = R.transpose() * m;
  const Eigen::Vector3d u = hat.u_hat + Eigen::Vector3d(m_local(0) / p.EI1,
                                                        m_local(1) / p.EI2,
                                                        m_local(2) / p.GJ);

  Eigen::Matrix<double, 13, 1> dy;
  dy.segment<3>(0) = p.L * zeta * d3;
  // Frame rate: body curvature u scaled by the intrinsic extension,
  // dq/ds = 1/2 q (0, L zeta_hat u).
  const Eigen::Vector3d omega = p.L * hat.zeta_hat * u;
  const Eigen::Quaterniond dq = h * Eigen::Quaterniond(0.0, omega(0), omega(1), omega(2));
  dy(3) = 0.5 * dq.w();
  dy(4) = 0.5 * dq.x();
  dy(5) = 0.5 * dq.y();
  dy(6) = 0.5 * dq.z();
  dy.segment<3>(7) = p.L * hat.zeta_hat * gravity_scale * p.w * p.gravity;
  dy.segment<3>(10) = -p.L * zeta * d3.cross(n);
  return dy;
}

namespace {

struct IntegrationResult {
  std::vector<Eigen::Matrix<double, 13, 1>> nodes;  // state at each grid node
  Eigen::Matrix<double, 6, 1> end_loads;            // (n(1), m(1))
};

// RK4 over [0,1] with 4 substeps per grid interval, so every node lands on a
// step boundary. The quaternion block is renormalized after each step.
IntegrationResult integrate_rod(const RodParams& p, const Eigen::VectorXd& q_a, int n_s,
                                const Eigen::Matrix<double, 6, 1>& xi, double gravity_scale) {
  IntegrationResult out;
  out.nodes.reserve(n_s);
  RodState st;
  st.frame = p.base_frame();
  st.n = xi.segment<3>(0);
  st.m = xi.segment<3>(3);
  Eigen::Matrix<double, 13, 1> y = st.pack();
  out.nodes.push_back(y);
  const int substeps = 4;
  const double h = 1.0 / ((n_s - 1) * substeps);
  for (int k = 0; k < n_s - 1; ++k) {
    for (int j = 0; j < substeps; ++j) {
      const double s = (k * substeps + j) * h;
      const auto k1 = rod_rhs(p, q_a, s, y, gravity_scale);
      const auto k2 = rod_rhs(p, q_a, s + 0.5 * h, y + 0.5 * h * k1, gravity_scale);
      const auto k3 = rod_rhs(p, q_a, s + 0.5 * h, y + 0.5 * h * k2, gravity_scale);
      const auto k4 = rod_rhs(p, q_a, s + h, y + h * k3, gravity_scale);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      y.segment<4>(3).normalize();
    }
    out.nodes.push_back(y);
  }
  out.end_loads.segment<3>(0) = y.segment<3>(7);
  out.end_loads.segment<3>(3) = y.segment<3>(10);
  return out;
}

struct StageResult {
  Eigen::Matrix<double, 6, 1> xi;
  double residual;
  int iterations;
  bool converged;
};

// Damped Newton on the tip-load residual for one gravity scale.
StageResult solve_stage(const RodParams& p, const Eigen::VectorXd& q_a, int n_s, double tol,
                        int max_iter, Eigen::Matrix<double, 6, 1> xi, double gravity_scale) {
  const double fd_step = 1e-7;
  auto residual_of = [&](const Eigen::Matrix<double, 6, 1>& x) {
    return integrate_rod(p, q_a, n_s, x, gravity_scale).end_loads;
  };
  Eigen::Matrix<double, 6, 1> F = residual_of(xi);
  StageResult res{xi, F.norm(), 0, false};
  for (int iter = 0; iter < max_iter; ++iter) {
    if (res.residual <= tol) {
      res.converged = true;
      return res;
    }
    Eigen::Matrix<double, 6, 6> J;
    for (int i = 0; i < 6; ++i) {
      Eigen::Matrix<double, 6, 1> xp = res.xi;
      xp(i) += fd_step;
      J.col(i) = (residual_of(xp) - F) / fd_step;
    }
    Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(J);
    if (!lu.isInvertible()) return res;
    const Eigen::Matrix<double, 6, 1> delta = lu.solve(-F);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1e-4) {
      const Eigen::Matrix<double, 6, 1> trial = res.xi + alpha * delta;
      const Eigen::Matrix<double, 6, 1> F_trial = residual_of(trial);
      if (F_trial.norm() <= (1.0 - 1e-4 * alpha) * res.residual) {
        res.xi = trial;
        F = F_trial;
        res.residual = F.norm();
        res.iterations = iter + 1;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return res;  // stagnated
  }
  res.converged = res.residual <= tol;
  return res;
}

}  // namespace

BvpSolution solve_bvp(const RodParams& p, const Eigen::VectorXd& q_a, int n_s, double tol,
                      int max_iter, const Eigen::Matrix<double, 6, 1>* xi_guess) {
  p.validate();
  if (n_s < 2) throw DomainError("boundary value solve needs at least 2 grid nodes");
  Eigen::Matrix<double, 6, 1> xi0 =
      xi_guess ? *xi_guess : Eigen::Matrix<double, 6, 1>::Zero().eval();
  StageResult stage = solve_stage(p, q_a, n_s, tol, max_iter, xi0, 1.0);
  int iterations = stage.iterations;
  if (!stage.converged) {
    // Homotopy in the gravity scale, warm-starting each stage.
    Eigen::Matrix<double, 6, 1> xi = Eigen::Matrix<double, 6, 1>::Zero();
    for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      stage = solve_stage(p, q_a, n_s, tol, max_iter, xi, lambda);
      iterations += stage.iterations;
      if (!stage.converged)
        throw SolverError("rod equilibrium solve failed at gravity scale " +
                              std::to_string(lambda),
                          stage.residual);
      xi = stage.xi;
    }
  }

  const IntegrationResult path = integrate_rod(p, q_a, n_s, stage.xi, 1.0);
  Eigen::MatrixXd points(n_s, 3);
  std::vector<Eigen::Quaterniond> frames;
  frames.reserve(n_s);
  for (int k = 0; k < n_s; ++k) {
    points.row(k) = path.nodes[k].segment<3>(0).transpose();
    frames.emplace_back(path.nodes[k](3), path.nodes[k](4), path.nodes[k](5),
                        path.nodes[k](6));
  }
  return BvpSolution{Centerline(std::move(points)), std::move(frames), stage.xi,
                     stage.residual, iterations};
}

std::vector<Eigen::MatrixXd> shape_partials(const RodParams& p, const Eigen::VectorXd& q_a,
                                            int n_s, double tol, double h) {
  const BvpSolution base = solve_bvp(p, q_a, n_s, tol);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(q_a.size());
  for (int i = 0; i < q_a.size(); ++i) {
    Eigen::VectorXd qp = q_a, qm = q_a;
    qp(i) += h;
    qm(i) -= h;
    const BvpSolution plus = solve_bvp(p, qp, n_s, tol, 60, &base.xi);
    const BvpSolution minus = solve_bvp(p, qm, n_s, tol, 60, &base.xi);
    out.push_back((plus.centerline.values() - minus.centerline.values()) / (2.0 * h));
  }
  return out;
}

}  // namespace softclik
