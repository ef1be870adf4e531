#include "softclik/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>

#include "softclik/config.hpp"
#include "softclik/errors.hpp"
#include "softclik/rng.hpp"

namespace softclik {

void TrainConfig::validate() const {
  if (epochs < 1) throw DomainError("training needs at least 1 epoch");
  if (batch_size < 1) throw DomainError("batch size must be at least 1");
  if (!(lr0 > 0.0 && lr_final > 0.0 && lr_final <= lr0))
    throw DomainError("learning rates must satisfy 0 < lr_final <= lr0");
  if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && eps > 0.0))
    throw DomainError("optimizer constants out of range");
}

double lr_at(const TrainConfig& cfg, int epoch) {
  return cfg.lr0 * std::pow(cfg.lr_final / cfg.lr0,
                            static_cast<double>(epoch) / static_cast<double>(cfg.epochs));
}

namespace {

template <typename Block>
void adam_update_block(Block& p, const Block& g, Block& m, Block& v, double lr, double beta1,
                       double beta2, double eps, double c1, double c2) {
  m = beta1 * m + (1.0 - beta1) * g;
  v.array() = beta2 * v.array() + (1.0 - beta2) * g.array().square();
  p.array() -= lr * (m.array() * c1) / ((v.array() * c2).sqrt() + eps);
}

}  // namespace

void adam_step(MlpParams& p, const MlpGrads& g, MlpGrads& m, MlpGrads& v, std::int64_t t,
               double lr, double beta1, double beta2, double eps) {
  const double c1 = 1.0 / (1.0 - std::pow(beta1, static_cast<double>(t)));
  const double c2 = 1.0 / (1.0 - std::pow(beta2, static_cast<double>(t)));
  for (int l = 0; l < p.layers(); ++l) {
    adam_update_block(p.W[l], g.W[l], m.W[l], v.W[l], lr, beta1, beta2, eps, c1, c2);
    adam_update_block(p.b[l], g.b[l], m.b[l], v.b[l], lr, beta1, beta2, eps, c1, c2);
  }
}

void fit_normalization(OperatorNet& net, const Dataset& train_ds,
                       const Eigen::VectorXd& box_lo, const Eigen::VectorXd& box_hi) {
  if (train_ds.m != net.m() || train_ds.d != net.d)
    throw DomainError("dataset dimensions do not match the network");
  for (std::int64_t i = 0; i < train_ds.count; ++i)
    for (int j = 0; j < train_ds.m; ++j)
      if (train_ds.q(i, j) < box_lo(j) - 1e-12 || train_ds.q(i, j) > box_hi(j) + 1e-12)
        throw DomainError("training activation outside the declared box; pass the box the "
                          "dataset was generated with");
  net.in_scale = AffineScale::box_to_unit(box_lo, box_hi);
  const Eigen::VectorXd mean = train_ds.shapes.colwise().mean().transpose();
  Eigen::VectorXd stddev(train_ds.d);
  for (int j = 0; j < train_ds.d; ++j) {
    const double var =
        (train_ds.shapes.col(j).array() - mean(j)).square().sum() / train_ds.shapes.rows();
    stddev(j) = std::sqrt(var);
  }
  net.out_scale = AffineScale::standardize(mean, stddev);
}

namespace {

struct AdamState {
  MlpGrads m_branch, v_branch, m_trunk, v_trunk;
  std::int64_t t = 0;
};

}  // namespace

TrainResult train(OperatorNet net, const Dataset& train_ds, const Dataset& val_ds,
                  const TrainConfig& cfg) {
  cfg.validate();
  net.check();
  if (train_ds.count < 1 || val_ds.count < 1)
    throw DomainError("training and validation sets must be non-empty");
  if (train_ds.m != net.m() || train_ds.d != net.d || val_ds.m != net.m() ||
      val_ds.d != net.d)
    throw DomainError("dataset dimensions do not match the network");

  const std::int64_t n_triples = train_ds.count * train_ds.n_s;
  const int n_s = train_ds.n_s;
  std::vector<std::int64_t> order(static_cast<std::size_t>(n_triples));

  OperatorGrads grads = OperatorGrads::zeros_like(net);
  AdamState adam{MlpGrads::zeros_like(net.branch), MlpGrads::zeros_like(net.branch),
                 MlpGrads::zeros_like(net.trunk), MlpGrads::zeros_like(net.trunk)};
  OperatorWorkspace ws;

  const int b_max = static_cast<int>(std::min<std::int64_t>(cfg.batch_size, n_triples));
  Eigen::MatrixXd q_batch(net.m(), b_max);
  Eigen::RowVectorXd s_batch(b_max);
  Eigen::MatrixXd t_batch(net.d, b_max);

  TrainResult result{net, {}, 0, std::numeric_limits<double>::infinity()};
  result.history.reserve(static_cast<std::size_t>(cfg.epochs));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at(cfg, epoch);
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    for (std::int64_t i = n_triples - 1; i > 0; --i)
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(
                    shuffle_rng.below(static_cast<std::uint64_t>(i + 1)))]);

    double loss_sum = 0.0;
    std::int64_t loss_count = 0;
    for (std::int64_t start = 0; start < n_triples; start += cfg.batch_size) {
      const int b = static_cast<int>(std::min<std::int64_t>(cfg.batch_size, n_triples - start));
      for (int c = 0; c < b; ++c) {
        const std::int64_t idx = order[static_cast<std::size_t>(start + c)];
        const std::int64_t sample = idx / n_s;
        const int node = static_cast<int>(idx % n_s);
        q_batch.col(c) = train_ds.q.row(sample).transpose();
        s_batch(c) = static_cast<double>(node) / (n_s - 1);
        t_batch.col(c) = train_ds.shapes.row(sample * n_s + node).transpose();
      }
      const double loss =
          operator_backward(net, q_batch.leftCols(b), s_batch.leftCols(b),
                            t_batch.leftCols(b), grads, ws);
      if (!std::isfinite(loss))
        throw NumericalError("training loss became non-finite at epoch " +
                             std::to_string(epoch) + ", batch " +
                             std::to_string(start / cfg.batch_size) + ", lr " +
                             format_double(lr));
      ++adam.t;
      adam_step(net.branch, grads.branch, adam.m_branch, adam.v_branch, adam.t, lr,
                cfg.beta1, cfg.beta2, cfg.eps);
      adam_step(net.trunk, grads.trunk, adam.m_trunk, adam.v_trunk, adam.t, lr, cfg.beta1,
                cfg.beta2, cfg.eps);
      loss_sum += loss * b;
      loss_count += b;
    }

    const double val_mse = evaluate(net, val_ds).mse_normalized;
    result.history.push_back(
        {epoch, lr, loss_sum / static_cast<double>(loss_count), val_mse});
    if (val_mse < result.best_val_mse) {
      result.best_val_mse = val_mse;
      result.best_epoch = epoch;
      result.net = net;
    }
  }
  return result;
}

Metrics evaluate(const OperatorNet& net, const Dataset& ds) {
  net.check();
  if (ds.count < 1) throw DomainError("cannot evaluate on an empty dataset");
  if (ds.m != net.m() || ds.d != net.d)
    throw DomainError("dataset dimensions do not match the network");
  const int n_s = ds.n_s, d = ds.d, v = net.v;

  // Trunk outputs on the grid once; branch outputs in sample batches.
  MlpWorkspace ws;
  Eigen::MatrixXd s_grid(1, n_s);
  for (int k = 0; k < n_s; ++k) s_grid(0, k) = static_cast<double>(k) / (n_s - 1);
  mlp_forward(net.trunk, s_grid, ws);
  const Eigen::MatrixXd tr = ws.a.back();  // (v*d) x n_s

  double se_norm = 0.0, se_phys = 0.0, l2_sum = 0.0;
  const Eigen::VectorXd inv_scale = net.out_scale.scale.cwiseInverse();
  constexpr std::int64_t kChunk = 2048;
  MlpWorkspace wsb;
  Eigen::MatrixXd y(d, n_s), t_hat(d, n_s), resid_norm(d, n_s), resid_phys(d, n_s),
      truth(d, n_s);
  for (std::int64_t base = 0; base < ds.count; base += kChunk) {
    const std::int64_t b = std::min<std::int64_t>(kChunk, ds.count - base);
    Eigen::MatrixXd q_in(net.m(), b);
    for (std::int64_t c = 0; c < b; ++c)
      q_in.col(c) = net.in_scale.apply(ds.q.row(base + c).transpose());
    mlp_forward(net.branch, q_in, wsb);
    const Eigen::MatrixXd& br = wsb.a.back();  // (v*d) x b
    for (std::int64_t c = 0; c < b; ++c) {
      y.setZero();
      for (int j = 0; j < v; ++j)
        y += br.col(c).segment(j * d, d).asDiagonal() * tr.middleRows(j * d, d);
      truth = ds.shape(base + c).transpose();
      // y is the normalized prediction; compare in both unit systems.
      t_hat = truth;
      t_hat.colwise() -= net.out_scale.center;
      t_hat.array().colwise() *= net.out_scale.scale.array();
      resid_norm = y - t_hat;
      se_norm += resid_norm.squaredNorm();
      resid_phys = resid_norm.array().colwise() * inv_scale.array();
      se_phys += resid_phys.squaredNorm();
      l2_sum += std::sqrt(resid_phys.squaredNorm()) / std::sqrt(truth.squaredNorm());
    }
  }
  const double denom = static_cast<double>(ds.count) * n_s * d;
  return {se_norm / denom, se_phys / denom, l2_sum / static_cast<double>(ds.count)};
}

namespace {

constexpr char kMagic[8] = {'S', 'O', 'F', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), 4);
}

void write_f64_block(std::ofstream& out, const double* data, std::size_t n) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(8 * n));
}

// Row-major parameter serialization, branch then trunk, W then b per layer.
void write_mlp(std::ofstream& out, const MlpParams& p) {
  for (int l = 0; l < p.layers(); ++l) {
    for (Eigen::Index i = 0; i < p.W[l].rows(); ++i)
      for (Eigen::Index j = 0; j < p.W[l].cols(); ++j) {
        const double x = p.W[l](i, j);
        write_f64_block(out, &x, 1);
      }
    write_f64_block(out, p.b[l].data(), static_cast<std::size_t>(p.b[l].size()));
  }
}

struct Reader {
  std::ifstream in;
  std::size_t offset = 0;

  void read(void* dst, std::size_t n, const char* what) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n))
      throw FormatError(std::string("checkpoint truncated while reading ") + what,
                        offset + static_cast<std::size_t>(in.gcount()));
    offset += n;
  }
  std::uint32_t u32(const char* what) {
    std::uint32_t v;
    read(&v, 4, what);
    return v;
  }
};

void read_mlp(Reader& r, MlpParams& p) {
  for (int l = 0; l < p.layers(); ++l) {
    for (Eigen::Index i = 0; i < p.W[l].rows(); ++i)
      for (Eigen::Index j = 0; j < p.W[l].cols(); ++j) r.read(&p.W[l](i, j), 8, "weights");
    r.read(p.b[l].data(), 8 * static_cast<std::size_t>(p.b[l].size()), "biases");
  }
}

}  // namespace

void save_checkpoint(const OperatorNet& net, const std::string& path) {
  net.check();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  out.write(kMagic, 8);
  write_u32(out, kVersion);
  write_u32(out, static_cast<std::uint32_t>(net.v));
  write_u32(out, static_cast<std::uint32_t>(net.d));
  write_u32(out, static_cast<std::uint32_t>(net.branch.sizes.size()));
  write_u32(out, static_cast<std::uint32_t>(net.trunk.sizes.size()));
  for (int s : net.branch.sizes) write_u32(out, static_cast<std::uint32_t>(s));
  for (int s : net.trunk.sizes) write_u32(out, static_cast<std::uint32_t>(s));
  write_f64_block(out, net.in_scale.center.data(), static_cast<std::size_t>(net.m()));
  write_f64_block(out, net.in_scale.scale.data(), static_cast<std::size_t>(net.m()));
  write_f64_block(out, net.out_scale.center.data(), static_cast<std::size_t>(net.d));
  write_f64_block(out, net.out_scale.scale.data(), static_cast<std::size_t>(net.d));
  write_mlp(out, net.branch);
  write_mlp(out, net.trunk);
  if (!out) throw Error("write failed: " + path);
}

OperatorNet load_checkpoint(const std::string& path) {
  Reader r;
  r.in.open(path, std::ios::binary);
  if (!r.in) throw Error("cannot open: " + path);
  char magic[8];
  r.read(magic, 8, "magic");
  if (std::memcmp(magic, kMagic, 8) != 0) throw FormatError("bad checkpoint magic", 0);
  if (r.u32("version") != kVersion) throw FormatError("unsupported checkpoint version", 8);
  OperatorNet net;
  net.v = static_cast<int>(r.u32("latent width"));
  net.d = static_cast<int>(r.u32("output dimension"));
  const std::uint32_t nb = r.u32("branch layer count");
  const std::uint32_t nt = r.u32("trunk layer count");
  if (net.v < 1 || net.v > 65536 || net.d < 1 || net.d > 16 || nb < 2 || nb > 64 ||
      nt < 2 || nt > 64)
    throw FormatError("implausible checkpoint architecture", 12);
  std::vector<int> bs(nb), ts(nt);
  for (auto& s : bs) {
    s = static_cast<int>(r.u32("branch layer size"));
    if (s < 1 || s > 1 << 20) throw FormatError("implausible layer width", r.offset - 4);
  }
  for (auto& s : ts) {
    s = static_cast<int>(r.u32("trunk layer size"));
    if (s < 1 || s > 1 << 20) throw FormatError("implausible layer width", r.offset - 4);
  }
  net.branch = MlpParams::zeros(bs);
  net.trunk = MlpParams::zeros(ts);
  const int m = net.branch.sizes.front();
  net.in_scale = AffineScale::identity(m);
  net.out_scale = AffineScale::identity(net.d);
  r.read(net.in_scale.center.data(), 8 * static_cast<std::size_t>(m), "input center");
  r.read(net.in_scale.scale.data(), 8 * static_cast<std::size_t>(m), "input scale");
  r.read(net.out_scale.center.data(), 8 * static_cast<std::size_t>(net.d), "output center");
  r.read(net.out_scale.scale.data(), 8 * static_cast<std::size_t>(net.d), "output scale");
  read_mlp(r, net.branch);
  read_mlp(r, net.trunk);
  char extra;
  r.in.read(&extra, 1);
  if (r.in.gcount() != 0) throw FormatError("checkpoint has trailing bytes", r.offset);
  try {
    net.check();
  } catch (const DomainError& e) {
    throw FormatError(std::string("checkpoint inconsistent: ") + e.what(), r.offset);
  }
  return net;
}

void write_history_csv(const std::vector<EpochStats>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "epoch,lr,train_mse,val_mse\n";
  out.precision(17);
  for (const auto& e : history)
    out << e.epoch << "," << e.lr << "," << e.train_mse << "," << e.val_mse << "\n";
  if (!out) throw Error("write failed: " + path);
}

}  // namespace softclik
