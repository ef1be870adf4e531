#include "softclik/tasks.hpp"

#include <cmath>

#include "softclik/errors.hpp"

namespace softclik {

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "pos_fixed") return TaskKind::PosFixed;
  if (name == "pos_opt") return TaskKind::PosOpt;
  if (name == "dist_fixed") return TaskKind::DistFixed;
  if (name == "dist_opt") return TaskKind::DistOpt;
  throw DomainError("unknown task kind '" + name +
                    "' (expected pos_fixed, pos_opt, dist_fixed, dist_opt)");
}

std::string to_string(TaskKind kind) {
  switch (kind) {
    case TaskKind::PosFixed: return "pos_fixed";
    case TaskKind::PosOpt: return "pos_opt";
    case TaskKind::DistFixed: return "dist_fixed";
    case TaskKind::DistOpt: return "dist_opt";
  }
  return "?";
}

TaskSpec TaskSpec::make(TaskKind kind, Eigen::VectorXd x0, double s_bar, int actuation_dim) {
  TaskSpec spec;
  spec.kind = kind;
  spec.x0 = std::move(x0);
  spec.s_bar = s_bar;
  const bool distance = kind == TaskKind::DistFixed || kind == TaskKind::DistOpt;
  spec.p = distance ? 1 : static_cast<int>(spec.x0.size());
  if (spec.x0.size() != 2 && spec.x0.size() != 3)
    throw DomainError("task target must be 2- or 3-dimensional");
  const bool fixed = kind == TaskKind::PosFixed || kind == TaskKind::DistFixed;
  if (fixed && !(s_bar >= 0.0 && s_bar <= 1.0))
    throw DomainError("fixed task coordinate s_bar must lie in [0,1]");
  if (spec.p != actuation_dim)
    throw DomainError("task dimension " + std::to_string(spec.p) +
                      " does not match actuation dimension " + std::to_string(actuation_dim) +
                      "; the controller needs a square Jacobian");
  return spec;
}

namespace {

double sq_distance(const ShapeModel& model, const Eigen::VectorXd& q_a,
                   const Eigen::VectorXd& x0, double s) {
  return 0.5 * (model.shape(q_a, s) - x0).squaredNorm();
}

}  // namespace

double closest_point(const ShapeModel& model, const Eigen::VectorXd& q_a,
                     const Eigen::VectorXd& x0, int n_coarse) {
  if (n_coarse < 1) throw DomainError("closest-point scan needs at least 1 interval");
  // Coarse scan; strict improvement keeps the smallest-s minimizer on ties.
  int best = 0;
  double f_best = sq_distance(model, q_a, x0, 0.0);
  for (int k = 1; k <= n_coarse; ++k) {
    const double f = sq_distance(model, q_a, x0, static_cast<double>(k) / n_coarse);
    if (f < f_best) {
      f_best = f;
      best = k;
    }
  }
  double a = static_cast<double>(best > 0 ? best - 1 : 0) / n_coarse;
  double b = static_cast<double>(best < n_coarse ? best + 1 : n_coarse) / n_coarse;
  // Golden-section shrink; on ties keep the left interval (smaller s).
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = sq_distance(model, q_a, x0, c);
  double fd = sq_distance(model, q_a, x0, d);
  while (b - a > 1e-8) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = sq_distance(model, q_a, x0, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = sq_distance(model, q_a, x0, d);
    }
  }
  // Pick the best of the bracket ends and interior probes, smallest s first.
  double s_star = a;
  double f_star = sq_distance(model, q_a, x0, a);
  for (double cand : {c, d, b}) {
    const double f = sq_distance(model, q_a, x0, cand);
    if (f < f_star) {
      f_star = f;
      s_star = cand;
    }
  }
  return s_star;
}

TaskEval task_eval(const TaskSpec& spec, const ShapeModel& model,
                   const Eigen::VectorXd& q_a, int n_coarse) {
  if (spec.x0.size() != model.ambient_dim())
    throw DomainError("task target dimension does not match the model's ambient dimension");
  TaskEval out;
  out.s = spec.uses_closest_point() ? closest_point(model, q_a, spec.x0, n_coarse) : spec.s_bar;
  const Eigen::VectorXd diff = model.shape(q_a, out.s) - spec.x0;
  const Eigen::MatrixXd partials = model.partials(q_a, out.s);
  if (spec.is_distance()) {
    out.value = Eigen::VectorXd::Constant(1, 0.5 * diff.squaredNorm());
    out.jacobian = diff.transpose() * partials;
  } else {
    out.value = diff;
    out.jacobian = partials;
  }
  return out;
}

Eigen::VectorXd task_value(const TaskSpec& spec, const ShapeModel& model,
                           const Eigen::VectorXd& q_a, int n_coarse) {
  return task_eval(spec, model, q_a, n_coarse).value;
}

Eigen::MatrixXd composed_jacobian(const TaskSpec& spec, const ShapeModel& model,
                                  const Eigen::VectorXd& q_a, int n_coarse) {
  return task_eval(spec, model, q_a, n_coarse).jacobian;
}

}  // namespace softclik
