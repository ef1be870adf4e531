// Command-line front end: dataset generation, operator training, evaluation,
// and controller runs, all driven by one key-value config that CLI flags
// override. Every command echoes the fully resolved config next to its
// outputs so a run can be reproduced from the echo alone.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "softclik/cc_model.hpp"
#include "softclik/clik.hpp"
#include "softclik/config.hpp"
#include "softclik/dataset.hpp"
#include "softclik/errors.hpp"
#include "softclik/neuralop.hpp"
#include "softclik/rod_model.hpp"
#include "softclik/tasks.hpp"
#include "softclik/trainer.hpp"

namespace {

using namespace softclik;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Registers flags that shadow config keys and applies the ones actually
/// given on the command line (flags > file > defaults).
class ConfigFlags {
 public:
  explicit ConfigFlags(CLI::App* cmd) : cmd_(cmd) {}

  void add(const std::string& flag, const std::string& key, const std::string& help) {
    auto slot = std::make_unique<std::string>();
    CLI::Option* opt = cmd_->add_option(flag, *slot, help);
    bindings_.push_back({opt, key, std::move(slot)});
  }

  void apply(Config& cfg) const {
    for (const auto& b : bindings_)
      if (b.opt->count() > 0) cfg.set(b.key, *b.value);
  }

 private:
  struct Binding {
    CLI::Option* opt;
    std::string key;
    std::unique_ptr<std::string> value;
  };

  CLI::App* cmd_;
  std::vector<Binding> bindings_;
};

Config resolve_config(const std::string& path, const ConfigFlags& flags) {
  Config cfg = path.empty() ? Config::defaults() : Config::from_file(path);
  flags.apply(cfg);
  return cfg;
}

RodParams rod_from_config(const Config& cfg) {
  RodParams p;
  p.L = cfg.get_double("rod.L");
  p.EI1 = cfg.get_double("rod.EI1");
  p.EI2 = cfg.get_double("rod.EI2");
  p.GJ = cfg.get_double("rod.GJ");
  p.EA = cfg.get_double("rod.EA");
  p.w = cfg.get_double("rod.w");
  const auto g = cfg.get_list("rod.gravity");
  if (g.size() != 3) throw ConfigError("rod.gravity needs exactly 3 components");
  p.gravity = Eigen::Vector3d(g[0], g[1], g[2]);
  p.fibers.c_b = cfg.get_double("rod.c_b");
  p.fibers.c_e = cfg.get_double("rod.c_e");
  p.fibers.c_h = cfg.get_double("rod.c_h");
  p.fibers.tau_c = cfg.get_double("rod.tau_c");
  p.fibers.c_e2 = cfg.get_double("rod.c_e2");
  p.fibers.n_t = cfg.get_double("rod.n_t");
  p.validate();
  return p;
}

/// dataset.box is either "lo,hi" (shared by all coordinates) or per-coordinate
/// "lo1,hi1,lo2,hi2,...".
void box_from_config(const Config& cfg, int m, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  const auto b = cfg.get_list("dataset.box");
  if (b.size() == 2) {
    lo = Eigen::VectorXd::Constant(m, b[0]);
    hi = Eigen::VectorXd::Constant(m, b[1]);
  } else if (b.size() == 2 * static_cast<std::size_t>(m)) {
    lo.resize(m);
    hi.resize(m);
    for (int i = 0; i < m; ++i) {
      lo[i] = b[2 * i];
      hi[i] = b[2 * i + 1];
    }
  } else {
    throw ConfigError("dataset.box needs lo,hi or one lo,hi pair per coordinate");
  }
  if (((hi - lo).array() < 0.0).any())
    throw ConfigError("dataset.box bounds must satisfy lo <= hi");
}

Eigen::Vector3d split_from_config(const Config& cfg) {
  const auto f = cfg.get_list("train.split");
  if (f.size() != 3) throw ConfigError("train.split needs three fractions");
  return {f[0], f[1], f[2]};
}

TrainConfig train_config(const Config& cfg) {
  TrainConfig tc;
  tc.epochs = cfg.get_int("train.epochs");
  tc.batch_size = cfg.get_int("train.batch");
  tc.lr0 = cfg.get_double("train.lr0");
  tc.lr_final = cfg.get_double("train.lr_final");
  tc.seed = cfg.get_u64("train.seed");
  tc.validate();
  return tc;
}

int cmd_generate(const Config& cfg, const std::string& out, const std::string& csv) {
  const RodParams p = rod_from_config(cfg);
  Eigen::VectorXd lo, hi;
  box_from_config(cfg, 3, lo, hi);

  Timer timer;
  const Dataset ds =
      generate(p, lo, hi, cfg.get_long("dataset.n"), cfg.get_int("dataset.ns"),
               cfg.get_u64("dataset.seed"), cfg.get_int("dataset.retries"),
               cfg.get_double("rod.tol"));
  save(ds, out);
  if (!csv.empty()) export_csv(ds, csv);
  cfg.write(out + ".config");

  std::printf("file=%s\n", out.c_str());
  std::printf("rows=%lld\n", static_cast<long long>(ds.count));
  std::printf("failed_draws=%lld\n", static_cast<long long>(ds.failed));
  std::printf("dropped=%lld\n", static_cast<long long>(cfg.get_long("dataset.n") - ds.count));
  std::printf("wall_seconds=%.3f\n", timer.seconds());
  return 0;
}

int cmd_train(const Config& cfg, const std::string& data_path, const std::string& out,
              const std::string& history) {
  const Dataset ds = load(data_path);
  const DatasetSplit parts = split(ds, split_from_config(cfg), cfg.get_u64("train.seed"));

  Eigen::VectorXd lo, hi;
  box_from_config(cfg, ds.m, lo, hi);

  const TrainConfig tc = train_config(cfg);
  OperatorNet net = OperatorNet::make(ds.m, ds.d, 64, {64, 64, 64}, {64, 64, 64}, tc.seed);
  fit_normalization(net, parts.train, lo, hi);

  Timer timer;
  TrainResult result = train(std::move(net), parts.train, parts.validation, tc);
  save_checkpoint(result.net, out);
  if (!history.empty()) write_history_csv(result.history, history);
  cfg.write(out + ".config");

  std::printf("checkpoint=%s\n", out.c_str());
  std::printf("epochs=%d\n", tc.epochs);
  std::printf("best_epoch=%d\n", result.best_epoch);
  std::printf("best_val_mse=%.12e\n", result.best_val_mse);
  std::printf("wall_seconds=%.3f\n", timer.seconds());
  return 0;
}

int cmd_eval(const Config& cfg, const std::string& data_path, const std::string& ckpt_path,
             bool whole) {
  const OperatorNet net = load_checkpoint(ckpt_path);
  const Dataset ds = load(data_path);
  if (ds.m != net.m() || ds.d != net.d)
    throw ConfigError("checkpoint dimensions do not match the dataset");

  Metrics metrics;
  std::int64_t count = 0;
  if (whole) {
    metrics = evaluate(net, ds);
    count = ds.count;
  } else {
    const DatasetSplit parts = split(ds, split_from_config(cfg), cfg.get_u64("train.seed"));
    metrics = evaluate(net, parts.test);
    count = parts.test.count;
  }

  std::printf("count=%lld\n", static_cast<long long>(count));
  std::printf("mse=%.12e\n", metrics.mse_physical);
  std::printf("mse_normalized=%.12e\n", metrics.mse_normalized);
  std::printf("l2_relative=%.12e\n", metrics.l2_relative);
  return 0;
}

Eigen::VectorXd vector_from_list(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int cmd_run(const Config& cfg, const std::string& model_name, const std::string& ckpt_path,
            const std::string& out) {
  std::unique_ptr<ShapeModel> model;
  Eigen::VectorXd box_lo, box_hi;
  if (model_name == "cc") {
    model = std::make_unique<CcShapeModel>(cfg.get_double("clik.cc_length"));
  } else if (model_name == "neural") {
    if (ckpt_path.empty())
      throw ConfigError("--model neural requires --checkpoint");
    OperatorNet net = load_checkpoint(ckpt_path);
    // The training box is recoverable from the input normalization.
    box_lo = net.in_scale.center - net.in_scale.scale.cwiseInverse();
    box_hi = net.in_scale.center + net.in_scale.scale.cwiseInverse();
    model = std::make_unique<NeuralShapeModel>(std::move(net));
  } else {
    throw ConfigError("--model must be cc or neural");
  }
  const int m = model->actuation_dim();
  const int d = model->ambient_dim();

  const TaskKind kind = task_kind_from_string(cfg.get("task.kind"));
  auto target = cfg.get_list("task.target");
  if (static_cast<int>(target.size()) != d)
    throw ConfigError("task.target needs " + std::to_string(d) +
                      " coordinates for this model");
  const TaskSpec spec =
      TaskSpec::make(kind, vector_from_list(target), cfg.get_double("task.sbar"), m);

  ClikConfig cc;
  const auto gains = cfg.get_list("clik.K");
  if (gains.size() == 1) {
    cc.K = Eigen::MatrixXd::Identity(spec.p, spec.p) * gains[0];
  } else if (gains.size() == static_cast<std::size_t>(spec.p)) {
    cc.K = Eigen::MatrixXd(vector_from_list(gains).asDiagonal());
  } else {
    throw ConfigError("clik.K must be a scalar or one gain per task dimension");
  }
  cc.dt = cfg.get_double("clik.dt");
  cc.t_end = cfg.get_double("clik.tend");
  cc.lambda_dls = cfg.get_double("clik.lambda_dls");
  cc.cond_warn = cfg.get_double("clik.cond_warn");
  cc.n_coarse = cfg.get_int("task.n_coarse");
  cc.snapshot_every = cfg.get_int("clik.snapshot_every");
  cc.clamp = model_name == "neural" && cfg.get_bool("clik.clamp");
  if (cc.clamp) {
    cc.clamp_lo = box_lo;
    cc.clamp_hi = box_hi;
  }

  auto q0 = cfg.get_list("clik.q0");
  if (q0.size() == 1 && m > 1) q0.assign(static_cast<std::size_t>(m), q0[0]);
  if (static_cast<int>(q0.size()) != m)
    throw ConfigError("clik.q0 needs one value or one per actuation coordinate");

  Timer timer;
  const Trajectory traj = run_clik(spec, *model, vector_from_list(q0), cc);
  export_trajectory(traj, out + ".csv", out);
  cfg.write(out + ".config");

  std::printf("csv=%s.csv\n", out.c_str());
  std::printf("steps=%lld\n", static_cast<long long>(traj.times.size()) - 1);
  std::printf("initial_error=%.12e\n", traj.error_norm.front());
  std::printf("final_error=%.12e\n", traj.error_norm.back());
  std::printf("clamp_events=%lld\n", static_cast<long long>(traj.clamp_events));
  std::printf("s_jumps=%lld\n", static_cast<long long>(traj.s_jumps));
  std::printf("wall_seconds=%.3f\n", timer.seconds());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop inverse kinematics for soft robots: rod dataset "
               "generation, operator training, and controller runs"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Sample activations and solve the rod for each");
  std::string gen_config, gen_out = "dataset.bin", gen_csv;
  gen->add_option("--config", gen_config, "Config file (flags override it)");
  gen->add_option("--out", gen_out, "Output dataset file");
  gen->add_option("--csv", gen_csv, "Also export rows as CSV");
  ConfigFlags gen_flags(gen);
  gen_flags.add("--n", "dataset.n", "Number of samples");
  gen_flags.add("--ns", "dataset.ns", "Centerline nodes per sample");
  gen_flags.add("--seed", "dataset.seed", "Generation seed");
  gen_flags.add("--box", "dataset.box", "Activation box lo,hi (or per-coordinate pairs)");
  gen_flags.add("--retries", "dataset.retries", "Redraws per failed sample");

  // train
  auto* tr = app.add_subcommand("train", "Fit the branch/trunk operator to a dataset");
  std::string tr_config, tr_data, tr_out = "model.ckpt", tr_history;
  tr->add_option("--config", tr_config, "Config file (flags override it)");
  tr->add_option("--data", tr_data, "Dataset file")->required();
  tr->add_option("--out", tr_out, "Checkpoint file");
  tr->add_option("--history", tr_history, "Per-epoch loss CSV");
  ConfigFlags tr_flags(tr);
  tr_flags.add("--epochs", "train.epochs", "Training epochs");
  tr_flags.add("--batch", "train.batch", "Minibatch size");
  tr_flags.add("--lr0", "train.lr0", "Initial learning rate");
  tr_flags.add("--lr-final", "train.lr_final", "Final learning rate");
  tr_flags.add("--seed", "train.seed", "Split/shuffle/init seed");
  tr_flags.add("--split", "train.split", "Train,validation,test fractions");
  tr_flags.add("--box", "dataset.box", "Activation box used for input normalization");

  // eval
  auto* ev = app.add_subcommand("eval", "Score a checkpoint on a dataset's test split");
  std::string ev_config, ev_data, ev_ckpt;
  bool ev_whole = false;
  ev->add_option("--config", ev_config, "Config file (flags override it)");
  ev->add_option("--data", ev_data, "Dataset file")->required();
  ev->add_option("--checkpoint", ev_ckpt, "Checkpoint file")->required();
  ev->add_flag("--whole", ev_whole, "Score the whole file instead of the test split");
  ConfigFlags ev_flags(ev);
  ev_flags.add("--split", "train.split", "Fractions matching the training run");
  ev_flags.add("--seed", "train.seed", "Split seed matching the training run");

  // run
  auto* rn = app.add_subcommand("run", "Run the closed-loop controller and export plots");
  std::string rn_config, rn_model = "cc", rn_ckpt, rn_out = "clik_run";
  rn->add_option("--config", rn_config, "Config file (flags override it)");
  rn->add_option("--model", rn_model, "Shape model: cc or neural");
  rn->add_option("--checkpoint", rn_ckpt, "Checkpoint for --model neural");
  rn->add_option("--out", rn_out, "Output basename for CSV/SVG/config");
  ConfigFlags rn_flags(rn);
  rn_flags.add("--task", "task.kind", "pos_fixed | pos_opt | dist_fixed | dist_opt");
  rn_flags.add("--target", "task.target", "Target point x,y[,z]");
  rn_flags.add("--sbar", "task.sbar", "Evaluation coordinate for the fixed tasks");
  rn_flags.add("--ncoarse", "task.n_coarse", "Closest-point scan intervals");
  rn_flags.add("--K", "clik.K", "Feedback gain (scalar or per-dimension list)");
  rn_flags.add("--dt", "clik.dt", "Euler step");
  rn_flags.add("--tend", "clik.tend", "Run duration");
  rn_flags.add("--lambda", "clik.lambda_dls", "Damped least-squares parameter");
  rn_flags.add("--q0", "clik.q0", "Initial activation (scalar broadcasts)");
  rn_flags.add("--cc-length", "clik.cc_length", "Arc length for --model cc");
  rn_flags.add("--snapshot-every", "clik.snapshot_every", "Record the shape every k steps");
  rn_flags.add("--clamp", "clik.clamp", "Clamp activations to the training box (true/false)");
  rn_flags.add("--seed", "clik.seed", "Accepted for uniformity; controller runs are deterministic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_generate(resolve_config(gen_config, gen_flags), gen_out, gen_csv);
    if (tr->parsed())
      return cmd_train(resolve_config(tr_config, tr_flags), tr_data, tr_out, tr_history);
    if (ev->parsed())
      return cmd_eval(resolve_config(ev_config, ev_flags), ev_data, ev_ckpt, ev_whole);
    if (rn->parsed())
      return cmd_run(resolve_config(rn_config, rn_flags), rn_model, rn_ckpt, rn_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    // Bad parameter values (dimension pairings, nonphysical constants) are
    // usage errors; failures of well-posed runs land in the catch below.
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
