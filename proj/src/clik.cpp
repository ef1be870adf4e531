#include "softclik/clik.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "softclik/errors.hpp"
#include "softclik/svg.hpp"

namespace softclik {

void ClikConfig::validate(int p) const {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (!(t_end >= dt)) throw DomainError("end time must be at least one step");
  if (!(lambda_dls >= 0.0)) throw DomainError("damping must be nonnegative");
  GainMatrix spd_check(K);  // throws unless symmetric positive definite
  (void)spd_check;
  if (K.rows() != p) throw DomainError("gain dimension does not match the task dimension");
  if (x_bar.size() != 0 && x_bar.size() != p)
    throw DomainError("desired task value dimension does not match the task");
  if (clamp && (clamp_lo.size() == 0 || clamp_lo.size() != clamp_hi.size()))
    throw DomainError("clamping enabled without matching bounds");
  if (snapshot_every > 0 && snapshot_nodes < 2)
    throw DomainError("shape snapshots need at least 2 nodes");
}

namespace {

struct SolveInfo {
  Eigen::VectorXd v;
  double cond = 0.0;
};

// J v = rhs via damped least squares (J^T J + lambda I) v = J^T rhs, or the
// direct inverse when lambda = 0.
SolveInfo solve_update(const Eigen::MatrixXd& jac, const Eigen::VectorXd& rhs,
                       double lambda) {
  SolveInfo out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const double s_max = svd.singularValues()(0);
  const double s_min = svd.singularValues()(svd.singularValues().size() - 1);
  out.cond = s_min > 0.0 ? s_max / s_min : std::numeric_limits<double>::infinity();
  if (lambda > 0.0) {
    const Eigen::MatrixXd normal =
        jac.transpose() * jac +
        lambda * Eigen::MatrixXd::Identity(jac.cols(), jac.cols());
    out.v = Eigen::LLT<Eigen::MatrixXd>(normal).solve(jac.transpose() * rhs);
    return out;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
  if (!lu.isInvertible())
    throw NumericalError("composed Jacobian is singular and damping is disabled");
  out.v = lu.solve(rhs);
  return out;
}

Eigen::VectorXd step_from_eval(const TaskEval& ev, const Eigen::VectorXd& q_a,
                               const ClikConfig& cfg, const TaskSpec& spec,
                               StepDiagnostics* diag) {
  const Eigen::VectorXd target =
      cfg.x_bar.size() ? cfg.x_bar : Eigen::VectorXd::Zero(spec.p);
  const Eigen::VectorXd error = target - ev.value;
  const SolveInfo sol = solve_update(ev.jacobian, cfg.K * error, cfg.lambda_dls);
  Eigen::VectorXd q_next = q_a + cfg.dt * sol.v;
  bool clamped = false;
  if (cfg.clamp) {
    const Eigen::VectorXd raw = q_next;
    q_next = q_next.cwiseMax(cfg.clamp_lo).cwiseMin(cfg.clamp_hi);
    clamped = (raw.array() != q_next.array()).any();
  }
  if (!q_next.allFinite())
    throw NumericalError("controller state became non-finite");
  if (diag) {
    diag->error = error;
    diag->cond = sol.cond;
    diag->s = ev.s;
    diag->clamped = clamped;
  }
  return q_next;
}

}  // namespace

Eigen::VectorXd clik_step(const TaskSpec& spec, const ShapeModel& model,
                          const Eigen::VectorXd& q_a, const ClikConfig& cfg,
                          StepDiagnostics* diag) {
  cfg.validate(spec.p);
  const TaskEval ev = task_eval(spec, model, q_a, cfg.n_coarse);
  return step_from_eval(ev, q_a, cfg, spec, diag);
}

Trajectory run_clik(const TaskSpec& spec, const ShapeModel& model,
                    const Eigen::VectorXd& q_a0, const ClikConfig& cfg) {
  cfg.validate(spec.p);
  if (q_a0.size() != model.actuation_dim())
    throw DomainError("initial actuation dimension does not match the model");
  const int steps = static_cast<int>(std::floor(cfg.t_end / cfg.dt + 1e-9));
  const Eigen::VectorXd target =
      cfg.x_bar.size() ? cfg.x_bar : Eigen::VectorXd::Zero(spec.p);

  Trajectory traj;
  traj.times.reserve(steps + 1);
  Eigen::VectorXd q = q_a0;
  for (int k = 0; k <= steps; ++k) {
    const TaskEval ev = task_eval(spec, model, q, cfg.n_coarse);
    traj.times.push_back(k * cfg.dt);
    traj.q.push_back(q);
    traj.task.push_back(ev.value);
    traj.s_used.push_back(ev.s);
    traj.error_norm.push_back((target - ev.value).norm());
    if (spec.uses_closest_point() && k > 0 &&
        std::abs(ev.s - traj.s_used[traj.s_used.size() - 2]) > 0.1)
      ++traj.s_jumps;
    if (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) {
      Eigen::MatrixXd snap(cfg.snapshot_nodes, model.ambient_dim());
      for (int i = 0; i < cfg.snapshot_nodes; ++i)
        snap.row(i) =
            model.shape(q, static_cast<double>(i) / (cfg.snapshot_nodes - 1)).transpose();
      traj.snapshots.emplace_back(k * cfg.dt, std::move(snap));
    }
    if (k == steps) {
      traj.cond.push_back(traj.cond.empty() ? 0.0 : traj.cond.back());
      // Final entry reuses the last step's conditioning; no step follows it.
      break;
    }
    StepDiagnostics diag;
    q = step_from_eval(ev, q, cfg, spec, &diag);
    traj.cond.push_back(diag.cond);
    if (diag.clamped) ++traj.clamp_events;
  }
  return traj;
}

void export_trajectory(const Trajectory& traj, const std::string& csv_path,
                       const std::string& svg_basename) {
  std::ofstream out(csv_path);
  if (!out) throw Error("cannot open for writing: " + csv_path);
  const int m = traj.q.empty() ? 0 : static_cast<int>(traj.q.front().size());
  const int p = traj.task.empty() ? 0 : static_cast<int>(traj.task.front().size());
  out << "t";
  for (int j = 0; j < std::max(m, 1); ++j) out << ",q" << j + 1;
  for (int j = 0; j < std::max(p, 1); ++j) out << ",x" << j + 1;
  out << ",s,cond\n";
  out.precision(17);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << traj.times[k];
    for (int j = 0; j < m; ++j) out << "," << traj.q[k](j);
    for (int j = 0; j < p; ++j) out << "," << traj.task[k](j);
    out << "," << traj.s_used[k] << "," << traj.cond[k] << "\n";
  }
  if (!out) throw Error("write failed: " + csv_path);

  if (svg_basename.empty() || traj.times.empty()) return;
  PlotSeries err{"log10 error", traj.times, {}};
  err.y.reserve(traj.times.size());
  for (double e : traj.error_norm) err.y.push_back(std::log10(std::max(e, 1e-300)));
  write_line_plot(svg_basename + "_error.svg", "task error", "t", "log10 ||error||", {err});

  std::vector<PlotSeries> act(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    act[j].label = "q" + std::to_string(j + 1);
    act[j].x = traj.times;
    for (const auto& qk : traj.q) act[j].y.push_back(qk(j));
  }
  write_line_plot(svg_basename + "_actuation.svg", "actuation", "t", "q", act);

  if (!traj.snapshots.empty()) {
    std::vector<PlotSeries> shapes;
    const int d = static_cast<int>(traj.snapshots.front().second.cols());
    for (const auto& [t, snap] : traj.snapshots) {
      PlotSeries s;
      s.label = "t=" + std::to_string(t).substr(0, 5);
      for (Eigen::Index i = 0; i < snap.rows(); ++i) {
        s.x.push_back(snap(i, 0));
        s.y.push_back(snap(i, d - 1));
      }
      shapes.push_back(std::move(s));
    }
    write_line_plot(svg_basename + "_shape.svg", "shape snapshots",
                    d == 2 ? "x" : "x", d == 2 ? "y" : "z", shapes);
  }
}

}  // namespace softclik
