// Acceptance gate: runs the end-to-end checks the project promises and prints
// one pass/fail line per criterion. Exit code is the number of failures.
// The desk-scale pieces (20k-sample dataset, 100-epoch training) run at full
// size, so a complete pass takes roughly half an hour on one core.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "softclik/cc_model.hpp"
#include "softclik/clik.hpp"
#include "softclik/dataset.hpp"
#include "softclik/errors.hpp"
#include "softclik/neuralop.hpp"
#include "softclik/rod_model.hpp"
#include "softclik/tasks.hpp"
#include "softclik/trainer.hpp"
#include "test_models.hpp"

namespace fs = std::filesystem;
using namespace softclik;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

/// Least-squares slope of y against t over the index range [a, b).
double fitted_slope(const std::vector<double>& t, const std::vector<double>& y,
                    std::size_t a, std::size_t b) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  const double n = static_cast<double>(b - a);
  for (std::size_t k = a; k < b; ++k) {
    st += t[k];
    sy += y[k];
    stt += t[k] * t[k];
    sty += t[k] * y[k];
  }
  return (n * sty - st * sy) / (n * stt - st * st);
}

/// Artifacts produced by the training criterion and reused by later ones.
struct Shared {
  bool trained = false;
  OperatorNet net;
  Eigen::VectorXd box_lo, box_hi;
};

// ---------------------------------------------------------------------------
// 1. Fixed-coordinate distance task on the analytic arc: exponential decay.

Outcome fixed_task_convergence() {
  const auto t0 = Clock::now();
  const CcShapeModel model(1.0);
  const Eigen::VectorXd target = model.shape(Eigen::VectorXd::Constant(1, 0.9), 1.0);
  const TaskSpec spec = TaskSpec::make(TaskKind::DistFixed, target, 1.0, 1);
  ClikConfig cfg;
  cfg.K = 10.0 * Eigen::MatrixXd::Identity(1, 1);
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.lambda_dls = 0.0;
  const Trajectory traj = run_clik(spec, model, Eigen::VectorXd::Constant(1, 0.1), cfg);
  const double wall = seconds_since(t0);

  const double ratio = traj.error_norm.back() / traj.error_norm.front();
  const double bound = 2.0 * std::exp(-10.0);
  const bool pass = ratio <= bound && wall < 1.0;
  return {pass, fmt("final/initial %.2e (bound %.2e), %.2f s", ratio, bound, wall)};
}

// ---------------------------------------------------------------------------
// 2. Closest-point distance task: monotone decay, s* matches a dense scan.

Outcome closest_point_task() {
  const auto t0 = Clock::now();
  const CcShapeModel model(1.0);
  const Eigen::VectorXd target = model.shape(Eigen::VectorXd::Constant(1, 0.9), 0.7);
  const TaskSpec spec = TaskSpec::make(TaskKind::DistOpt, target, 1.0, 1);
  ClikConfig cfg;
  cfg.K = 10.0 * Eigen::MatrixXd::Identity(1, 1);
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.lambda_dls = 0.0;
  const Trajectory traj = run_clik(spec, model, Eigen::VectorXd::Constant(1, 0.1), cfg);

  bool monotone = true;
  const double slack = 1e-15 * traj.error_norm.front();
  for (std::size_t k = 1; k + 1 < traj.error_norm.size(); ++k)
    if (traj.error_norm[k + 1] > traj.error_norm[k] + slack) monotone = false;

  // dense-grid closest point at every 10th logged step
  double worst_s = 0.0;
  const int grid = 100000;
  for (std::size_t k = 0; k < traj.q.size(); k += 10) {
    double best = std::numeric_limits<double>::infinity();
    double s_best = 0.0;
    for (int i = 0; i <= grid; ++i) {
      const double s = static_cast<double>(i) / grid;
      const double d2 = (model.shape(traj.q[k], s) - target).squaredNorm();
      if (d2 < best) {
        best = d2;
        s_best = s;
      }
    }
    worst_s = std::max(worst_s, std::abs(traj.s_used[k] - s_best));
  }
  const double wall = seconds_since(t0);
  const bool pass = monotone && worst_s <= 1e-4 && wall < 5.0;
  return {pass, fmt("monotone=%s, max |s - s_oracle| %.1e (bound 1e-4), %.2f s",
                    monotone ? "yes" : "no", worst_s, wall)};
}

// ---------------------------------------------------------------------------
// 3. Derivative oracles against central finite differences.

Outcome derivative_oracles() {
  Rng rng(314);

  // analytic arc Jacobian
  const double pi = std::acos(-1.0);
  double worst_cc = 0.0;
  for (int i = 0; i < 100; ++i) {
    CcParams p;
    p.q = rng.uniform(-2.0 * pi, 2.0 * pi);
    const double s = rng.uniform(0.0, 1.0);
    const double h = 1e-4;
    CcParams up = p, dn = p;
    up.q += h;
    dn.q -= h;
    const Eigen::Vector2d fd = (cc_shape(up, s) - cc_shape(dn, s)) / (2.0 * h);
    const Eigen::Vector2d an = cc_jacobian(p, s);
    worst_cc = std::max(worst_cc, (an - fd).norm() / std::max(fd.norm(), 1e-12));
  }

  // operator input gradient on an untrained network with non-trivial scales
  OperatorNet net = OperatorNet::make(3, 3, 8, {16, 16}, {16, 16}, 99);
  net.in_scale.center = Eigen::Vector3d::Constant(-0.5);
  net.in_scale.scale = Eigen::Vector3d::Constant(1.2);
  net.out_scale.center = Eigen::Vector3d(0.05, -0.02, 0.01);
  net.out_scale.scale = Eigen::Vector3d(2.0, 1.5, 0.8);
  double worst_qa = 0.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::Vector3d q(rng.uniform(-1.0, 0.0), rng.uniform(-1.0, 0.0), rng.uniform(-1.0, 0.0));
    const double s = rng.uniform(0.0, 1.0);
    const Eigen::MatrixXd an = operator_grad_qa(net, q, s);
    Eigen::MatrixXd fd(3, 3);
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d qp = q, qm = q;
      qp(j) += h;
      qm(j) -= h;
      fd.col(j) = (operator_eval(net, qp, s) - operator_eval(net, qm, s)) / (2.0 * h);
    }
    worst_qa = std::max(worst_qa, (an - fd).norm() / std::max(fd.norm(), 1e-12));
  }

  // parameter gradients on a network small enough to difference exhaustively
  OperatorNet tiny = OperatorNet::make(2, 2, 2, {3}, {3}, 77);
  const std::int64_t n_params =
      tiny.branch.parameter_count() + tiny.trunk.parameter_count();
  Eigen::MatrixXd q_batch(2, 4), targets(2, 4);
  Eigen::RowVectorXd s_batch(4);
  for (int c = 0; c < 4; ++c) {
    q_batch.col(c) = Eigen::Vector2d(rng.uniform(-1.0, 0.0), rng.uniform(-1.0, 0.0));
    s_batch(c) = rng.uniform(0.0, 1.0);
    targets.col(c) = Eigen::Vector2d(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
  }
  OperatorGrads grads = OperatorGrads::zeros_like(tiny);
  OperatorWorkspace ws;
  operator_backward(tiny, q_batch, s_batch, targets, grads, ws);
  auto loss_at = [&]() {
    OperatorGrads scratch = OperatorGrads::zeros_like(tiny);
    return operator_backward(tiny, q_batch, s_batch, targets, scratch, ws);
  };
  double worst_param = 0.0;
  const double h = 1e-5;
  for (MlpParams* part : {&tiny.branch, &tiny.trunk}) {
    MlpGrads& g = part == &tiny.branch ? grads.branch : grads.trunk;
    for (int l = 0; l < part->layers(); ++l) {
      for (Eigen::Index i = 0; i < part->W[l].size(); ++i) {
        double& p = part->W[l].data()[i];
        const double keep = p;
        p = keep + h;
        const double up = loss_at();
        p = keep - h;
        const double dn = loss_at();
        p = keep;
        const double fd = (up - dn) / (2.0 * h);
        worst_param = std::max(worst_param, std::abs(g.W[l].data()[i] - fd) /
                                                std::max(std::abs(fd), 1e-12));
      }
      for (Eigen::Index i = 0; i < part->b[l].size(); ++i) {
        double& p = part->b[l](i);
        const double keep = p;
        p = keep + h;
        const double up = loss_at();
        p = keep - h;
        const double dn = loss_at();
        p = keep;
        const double fd = (up - dn) / (2.0 * h);
        worst_param =
            std::max(worst_param, std::abs(g.b[l](i) - fd) / std::max(std::abs(fd), 1e-12));
      }
    }
  }

  const bool pass =
      worst_cc < 1e-6 && worst_qa < 1e-6 && worst_param < 1e-5 && n_params <= 100;
  return {pass, fmt("arc %.1e (<1e-6), operator input %.1e (<1e-6), "
                    "parameters %.1e (<1e-5, %lld params)",
                    worst_cc, worst_qa, worst_param, static_cast<long long>(n_params))};
}

// ---------------------------------------------------------------------------
// 4. Rod equilibrium: unloaded straightness, hanging balance, grid refinement.

Outcome rod_equilibrium() {
  RodParams p;
  const Eigen::Vector3d down = p.gravity;
  const Eigen::VectorXd rest = Eigen::VectorXd::Zero(3);
  double max_wall = 0.0;

  RodParams weightless = p;
  weightless.w = 0.0;
  auto t0 = Clock::now();
  const BvpSolution straight = solve_bvp(weightless, rest, 100);
  max_wall = std::max(max_wall, seconds_since(t0));
  const Eigen::Vector3d tip = straight.centerline.values().row(99).transpose();
  const double tip_err = (tip - p.L * down).norm() / p.L;
  const bool a_ok = tip_err < 1e-8 && straight.residual < 1e-8;

  t0 = Clock::now();
  const BvpSolution hanging = solve_bvp(p, rest, 100);
  max_wall = std::max(max_wall, seconds_since(t0));
  double perp = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Vector3d r = hanging.centerline.values().row(k).transpose();
    perp = std::max(perp, (r - r.dot(down) * down).norm());
  }
  const double weight = p.w * p.L;  // unit extension at rest
  const double force_err = std::abs(hanging.xi.head<3>().norm() - weight) / weight;
  const bool b_ok = perp < 1e-6 * p.L && force_err < 1e-6;

  const Eigen::Vector3d q_bent(-1.67, 0.0, -1.67);
  t0 = Clock::now();
  const BvpSolution coarse = solve_bvp(p, q_bent, 50);
  max_wall = std::max(max_wall, seconds_since(t0));
  t0 = Clock::now();
  const BvpSolution fine = solve_bvp(p, q_bent, 99);
  max_wall = std::max(max_wall, seconds_since(t0));
  const double shift = (coarse.centerline.values().row(49) - fine.centerline.values().row(98))
                           .norm() /
                       p.L;
  const bool c_ok = shift < 1e-6;

  const bool pass = a_ok && b_ok && c_ok && max_wall < 1.0;
  return {pass, fmt("straight tip %.1e, residual %.1e; hanging offset %.1e, "
                    "force balance %.1e; refinement shift %.1e; slowest solve %.2f s",
                    tip_err, straight.residual, perp / p.L, force_err, shift, max_wall)};
}

// ---------------------------------------------------------------------------
// 5. Affine model: the discrete error recursion holds to near machine precision.

Outcome linear_model_recursion() {
  Eigen::MatrixXd a0(2, 2), a1(2, 2);
  a0 << 2.0, 0.3, -0.1, 1.5;
  a1 << 0.5, 0.0, 0.0, 0.2;
  const LinearShapeModel model(a0, a1, Eigen::Vector2d(0.1, -0.2), Eigen::Vector2d(0.0, 0.3));
  const TaskSpec spec = TaskSpec::make(TaskKind::PosFixed, Eigen::Vector2d(0.8, 0.5), 1.0, 2);
  ClikConfig cfg;
  cfg.K = Eigen::Vector2d(8.0, 4.0).asDiagonal();
  cfg.dt = 1e-3;
  cfg.t_end = 0.1;
  cfg.lambda_dls = 0.0;
  const Trajectory traj = run_clik(spec, model, Eigen::Vector2d(0.2, -0.3), cfg);

  // the task value is the offset from the reference point, so the error the
  // loop drives to zero is its negation
  const Eigen::Matrix2d contraction =
      Eigen::Matrix2d::Identity() - cfg.dt * Eigen::Matrix2d(cfg.K);
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < traj.task.size(); ++k) {
    const Eigen::Vector2d e_k = -traj.task[k];
    const Eigen::Vector2d e_next = -traj.task[k + 1];
    worst = std::max(worst, (e_next - contraction * e_k).norm() /
                                std::max(1.0, e_k.norm()));
  }
  return {worst <= 1e-12, fmt("max recursion defect %.1e (bound 1e-12)", worst)};
}

// ---------------------------------------------------------------------------
// 6. Desk-scale pipeline: 20k samples, 100 epochs, held-out accuracy.

Outcome desk_training(Shared& shared) {
  RodParams p;
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -1.67);
  const Eigen::VectorXd hi = Eigen::VectorXd::Zero(3);

  auto t0 = Clock::now();
  const Dataset ds = generate(p, lo, hi, 20000, 100, 1);
  const double gen_wall = seconds_since(t0);

  const DatasetSplit parts = split(ds, {0.64, 0.16, 0.20}, 1);
  OperatorNet net = OperatorNet::make(3, 3, 64, {64, 64, 64}, {64, 64, 64}, 1);
  fit_normalization(net, parts.train, lo, hi);

  TrainConfig tc;
  tc.epochs = 100;
  t0 = Clock::now();
  TrainResult result = train(std::move(net), parts.train, parts.validation, tc);
  const double train_wall = seconds_since(t0);

  const Metrics held_out = evaluate(result.net, parts.test);
  shared.net = result.net;
  shared.box_lo = lo;
  shared.box_hi = hi;
  shared.trained = true;

  const bool pass = held_out.l2_relative < 5e-2 && gen_wall + train_wall < 1800.0;
  return {pass, fmt("held-out L2 relative %.3e (bound 5e-2), mse %.3e, "
                    "generate %.0f s + train %.0f s (budget 1800 s)",
                    held_out.l2_relative, held_out.mse_physical, gen_wall, train_wall)};
}

// ---------------------------------------------------------------------------
// 7. Closed-loop control of the learned model to random reachable targets.

Outcome neural_control(const Shared& shared) {
  if (!shared.trained) return {false, "skipped: training criterion did not produce a model"};
  const auto t0 = Clock::now();
  const NeuralShapeModel model(shared.net);
  Rng rng(2026);

  std::string summary;
  bool pass = true;
  for (const TaskKind kind : {TaskKind::PosFixed, TaskKind::PosOpt}) {
    int converged = 0, decaying = 0;
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::Vector3d q_star;
      for (int j = 0; j < 3; ++j) q_star(j) = rng.uniform(shared.box_lo(j), shared.box_hi(j));
      const Eigen::VectorXd target = model.shape(q_star, 1.0);
      const TaskSpec spec = TaskSpec::make(kind, target, 1.0, 3);

      ClikConfig cfg;
      cfg.K = 8.0 * Eigen::MatrixXd::Identity(3, 3);
      cfg.dt = 1e-3;
      cfg.t_end = 1.0;
      cfg.clamp = true;
      cfg.clamp_lo = shared.box_lo;
      cfg.clamp_hi = shared.box_hi;
      const Eigen::VectorXd q0 = 0.5 * (shared.box_lo + shared.box_hi);
      const Trajectory traj = run_clik(spec, model, q0, cfg);

      if (traj.error_norm.back() < 0.05 * traj.error_norm.front()) ++converged;
      std::vector<double> log_err(traj.error_norm.size());
      for (std::size_t k = 0; k < log_err.size(); ++k)
        log_err[k] = std::log(std::max(traj.error_norm[k], 1e-300));
      if (fitted_slope(traj.times, log_err, log_err.size() / 2, log_err.size()) < 0.0)
        ++decaying;
    }
    pass = pass && converged >= 9 && decaying == 10;
    summary += fmt("%s%s %d/10 below 5%%, %d/10 decaying", summary.empty() ? "" : "; ",
                   to_string(kind).c_str(), converged, decaying);
  }
  const double wall = seconds_since(t0);
  pass = pass && wall < 60.0;
  return {pass, summary + fmt(", %.1f s", wall)};
}

// ---------------------------------------------------------------------------
// 8. Bit-exact reruns of generation, training, and control.

Outcome determinism(const Shared& shared) {
  RodParams p;
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -1.0);
  const Eigen::VectorXd hi = Eigen::VectorXd::Zero(3);

  setenv("SOFTCLIK_THREADS", "1", 1);
  const Dataset ds1 = generate(p, lo, hi, 30, 12, 9);
  setenv("SOFTCLIK_THREADS", "4", 1);
  const Dataset ds2 = generate(p, lo, hi, 30, 12, 9);
  unsetenv("SOFTCLIK_THREADS");

  const fs::path dir = fs::temp_directory_path();
  const std::string g1 = (dir / "softclik_accept_g1.bin").string();
  const std::string g2 = (dir / "softclik_accept_g2.bin").string();
  save(ds1, g1);
  save(ds2, g2);
  const bool gen_ok = read_bytes(g1) == read_bytes(g2);
  fs::remove(g1);
  fs::remove(g2);
  const std::string ck1 = (dir / "softclik_accept_ck1.bin").string();
  const std::string ck2 = (dir / "softclik_accept_ck2.bin").string();
  TrainConfig tc;
  tc.epochs = 3;
  tc.seed = 5;
  for (const std::string& path : {ck1, ck2}) {
    OperatorNet net = OperatorNet::make(3, 3, 8, {16, 16}, {16, 16}, 5);
    fit_normalization(net, ds1, lo, hi);
    save_checkpoint(train(std::move(net), ds1, ds1, tc).net, path);
  }
  const bool train_ok = read_bytes(ck1) == read_bytes(ck2);
  fs::remove(ck1);
  fs::remove(ck2);

  const CcShapeModel arc(1.0);
  const Eigen::VectorXd target = arc.shape(Eigen::VectorXd::Constant(1, 0.9), 1.0);
  const TaskSpec spec = TaskSpec::make(TaskKind::DistFixed, target, 1.0, 1);
  ClikConfig cfg;
  cfg.K = 10.0 * Eigen::MatrixXd::Identity(1, 1);
  cfg.dt = 1e-3;
  cfg.t_end = 0.2;
  cfg.lambda_dls = 0.0;
  const Trajectory run1 = run_clik(spec, arc, Eigen::VectorXd::Constant(1, 0.1), cfg);
  const Trajectory run2 = run_clik(spec, arc, Eigen::VectorXd::Constant(1, 0.1), cfg);
  bool clik_ok = run1.q.size() == run2.q.size();
  for (std::size_t k = 0; clik_ok && k < run1.q.size(); ++k)
    clik_ok = run1.q[k] == run2.q[k];

  bool neural_ok = true;
  if (shared.trained) {
    const NeuralShapeModel model(shared.net);
    const Eigen::VectorXd q0 = 0.5 * (shared.box_lo + shared.box_hi);
    const Eigen::VectorXd ntarget = model.shape(0.25 * shared.box_lo, 1.0);
    const TaskSpec nspec = TaskSpec::make(TaskKind::PosFixed, ntarget, 1.0, 3);
    ClikConfig ncfg;
    ncfg.K = 8.0 * Eigen::MatrixXd::Identity(3, 3);
    ncfg.dt = 1e-3;
    ncfg.t_end = 0.1;
    const Trajectory n1 = run_clik(nspec, model, q0, ncfg);
    const Trajectory n2 = run_clik(nspec, model, q0, ncfg);
    for (std::size_t k = 0; neural_ok && k < n1.q.size(); ++k) neural_ok = n1.q[k] == n2.q[k];
  }

  const bool pass = gen_ok && train_ok && clik_ok && neural_ok;
  return {pass, fmt("generation %s, training %s, control %s, learned-model control %s",
                    gen_ok ? "identical" : "DIFFERS", train_ok ? "identical" : "DIFFERS",
                    clik_ok ? "identical" : "DIFFERS", neural_ok ? "identical" : "DIFFERS")};
}

// ---------------------------------------------------------------------------
// 9. Serialization round trips and corrupted-file rejection.

Outcome format_round_trips() {
  RodParams p;
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(3, -1.0);
  const Eigen::VectorXd hi = Eigen::VectorXd::Zero(3);
  const Dataset ds = generate(p, lo, hi, 8, 10, 4);

  const fs::path dir = fs::temp_directory_path();
  const std::string d1 = (dir / "softclik_accept_d1.bin").string();
  const std::string d2 = (dir / "softclik_accept_d2.bin").string();
  save(ds, d1);
  save(load(d1), d2);
  const bool ds_ok = read_bytes(d1) == read_bytes(d2);

  OperatorNet net = OperatorNet::make(3, 3, 4, {8}, {8}, 13);
  const std::string c1 = (dir / "softclik_accept_c1.bin").string();
  const std::string c2 = (dir / "softclik_accept_c2.bin").string();
  save_checkpoint(net, c1);
  save_checkpoint(load_checkpoint(c1), c2);
  const bool ck_ok = read_bytes(c1) == read_bytes(c2);

  // every corruption must surface as a format error, never a crash
  int rejected = 0, expected = 0;
  const std::string scratch = (dir / "softclik_accept_bad.bin").string();
  for (const std::string& source : {d1, c1}) {
    const std::vector<char> good = read_bytes(source);
    std::vector<std::vector<char>> bad_files;
    bad_files.push_back(good);
    bad_files.back()[0] = 'Z';
    bad_files.push_back({good.begin(), good.end() - 11});
    bad_files.push_back(good);
    bad_files.back().push_back('\0');
    for (const auto& bytes : bad_files) {
      ++expected;
      write_bytes(scratch, bytes);
      try {
        if (source == d1)
          load(scratch);
        else
          load_checkpoint(scratch);
      } catch (const FormatError&) {
        ++rejected;
      } catch (...) {
      }
    }
  }
  fs::remove(d1);
  fs::remove(d2);
  fs::remove(c1);
  fs::remove(c2);
  fs::remove(scratch);

  const bool pass = ds_ok && ck_ok && rejected == expected;
  return {pass, fmt("dataset round trip %s, checkpoint round trip %s, "
                    "%d/%d corruptions rejected",
                    ds_ok ? "byte-identical" : "DIFFERS",
                    ck_ok ? "byte-identical" : "DIFFERS", rejected, expected)};
}

}  // namespace

int main() {
  Shared shared;
  struct Entry {
    const char* label;
    std::function<Outcome()> fn;
  };
  const Entry entries[] = {
      {"fixed-coordinate convergence on the analytic arc",
       [] { return fixed_task_convergence(); }},
      {"closest-point task on the analytic arc", [] { return closest_point_task(); }},
      {"derivative oracles", [] { return derivative_oracles(); }},
      {"rod equilibrium checks", [] { return rod_equilibrium(); }},
      {"affine-model error recursion", [] { return linear_model_recursion(); }},
      {"desk-scale operator training", [&] { return desk_training(shared); }},
      {"closed-loop control of the learned model", [&] { return neural_control(shared); }},
      {"bit-exact reruns", [&] { return determinism(shared); }},
      {"format round trips and rejection", [] { return format_round_trips(); }},
  };

  int failures = 0;
  int id = 0;
  for (const Entry& entry : entries) {
    ++id;
    Outcome outcome;
    try {
      outcome = entry.fn();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("[%s] %d. %s — %s\n", outcome.pass ? "PASS" : "FAIL", id, entry.label,
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures;
}
