#pragma once

#include <string>

#include <Eigen/Dense>

#include "softclik/shape_model.hpp"

namespace softclik {

enum class TaskKind { PosFixed, PosOpt, DistFixed, DistOpt };

TaskKind task_kind_from_string(const std::string& name);
std::string to_string(TaskKind kind);

/// Shape-to-task functional: positioning (curve point minus target, dimension
/// d) or squared distance (scalar), each either at a fixed coordinate s_bar
/// or at the closest point s_* recomputed per evaluation.
struct TaskSpec {
  TaskKind kind;
  Eigen::VectorXd x0;  // target point, length units
  double s_bar = 1.0;  // used by the fixed variants only
  int p = 0;           // task dimension

  /// Validates dimensions for the square inversion the controller needs:
  /// task dimension p must equal the model's actuation dimension m.
  static TaskSpec make(TaskKind kind, Eigen::VectorXd x0, double s_bar, int actuation_dim);

  bool uses_closest_point() const {
    return kind == TaskKind::PosOpt || kind == TaskKind::DistOpt;
  }
  bool is_distance() const {
    return kind == TaskKind::DistFixed || kind == TaskKind::DistOpt;
  }
};

/// argmin over s in [0,1] of the distance from the curve to x0: coarse scan
/// over n_coarse+1 uniform samples, then golden-section refinement of the
/// bracketing interval down to width 1e-8. Ties break toward smaller s;
/// endpoints are admissible minimizers.
double closest_point(const ShapeModel& model, const Eigen::VectorXd& q_a,
                     const Eigen::VectorXd& x0, int n_coarse = 100);

/// Task value, composed task Jacobian (p x m), and the s-coordinate both were
/// evaluated at (s_bar, or s_* for the closest-point variants).
struct TaskEval {
  Eigen::VectorXd value;
  Eigen::MatrixXd jacobian;
  double s = 0.0;
};

/// Evaluates value and Jacobian together so the closest-point search runs
/// once. For the closest-point variants the Jacobian treats s_* as fixed
/// (envelope argument: the minimizer's own sensitivity drops out).
TaskEval task_eval(const TaskSpec& spec, const ShapeModel& model,
                   const Eigen::VectorXd& q_a, int n_coarse = 100);

Eigen::VectorXd task_value(const TaskSpec& spec, const ShapeModel& model,
                           const Eigen::VectorXd& q_a, int n_coarse = 100);

Eigen::MatrixXd composed_jacobian(const TaskSpec& spec, const ShapeModel& model,
                                  const Eigen::VectorXd& q_a, int n_coarse = 100);

}  // namespace softclik
