#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "softclik/actuation.hpp"
#include "softclik/tasks.hpp"

namespace softclik {

struct ClikConfig {
  Eigen::MatrixXd K;          // feedback gain, validated SPD at use
  double dt = 1e-3;
  double t_end = 1.0;
  Eigen::VectorXd x_bar;      // desired task value; empty means zero
  double lambda_dls = 1e-6;   // damping of the Jacobian solve; 0 = direct inverse
  double cond_warn = 1e8;     // condition-number threshold flagged in diagnostics
  bool clamp = false;         // project activations onto bounds after each step
  Eigen::VectorXd clamp_lo, clamp_hi;
  int n_coarse = 100;         // closest-point scan density
  int snapshot_every = 0;     // record the shape every k-th step (0 = never)
  int snapshot_nodes = 50;

  void validate(int p) const;
};

struct StepDiagnostics {
  Eigen::VectorXd error;  // x_bar - task value before the step
  double cond = 0.0;      // condition of the composed Jacobian
  double s = 0.0;         // coordinate the task was evaluated at
  bool clamped = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> q;       // actuation after each step (q[0] = initial)
  std::vector<Eigen::VectorXd> task;    // task value at each time
  std::vector<double> s_used;           // s_bar or s_* at each time
  std::vector<double> cond;             // Jacobian condition numbers
  std::vector<double> error_norm;       // ||x_bar - task value||
  std::vector<std::pair<double, Eigen::MatrixXd>> snapshots;  // (t, sampled shape)
  std::int64_t clamp_events = 0;
  std::int64_t s_jumps = 0;  // closest-point moves > 0.1 between steps
};

/// One explicit-Euler step of q_dot = J^{-1} K (x_bar - x): evaluates the
/// task, solves J v = K (x_bar - x) (damped least squares when lambda_dls >
/// 0), and advances q_a by dt * v.
Eigen::VectorXd clik_step(const TaskSpec& spec, const ShapeModel& model,
                          const Eigen::VectorXd& q_a, const ClikConfig& cfg,
                          StepDiagnostics* diag = nullptr);

/// Runs floor(t_end/dt) steps from q_a0 and records the trajectory. The
/// closest-point variants recompute s_* every step.
Trajectory run_clik(const TaskSpec& spec, const ShapeModel& model,
                    const Eigen::VectorXd& q_a0, const ClikConfig& cfg);

/// CSV: t, q..., x..., s, cond per row. With an SVG basename, also writes
/// error-norm (log scale) and actuation line plots, plus shape snapshots if
/// recorded.
void export_trajectory(const Trajectory& traj, const std::string& csv_path,
                       const std::string& svg_basename = "");

}  // namespace softclik
