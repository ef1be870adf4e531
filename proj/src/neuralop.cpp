#include "softclik/neuralop.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>

#include "softclik/errors.hpp"

namespace softclik {

namespace {

// tanh via 1 - 2/(exp(2x)+1): one vectorizable exp instead of Eigen's scalar
// tanh loop, exact at the overflow ends (exp -> inf gives 1, exp -> 0 gives
// -1). Training spends most of its time here and in the GEMMs.
inline void tanh_inplace(Eigen::MatrixXd& x) {
  x.array() = 1.0 - 2.0 / ((2.0 * x.array()).exp() + 1.0);
}

// Forward from ws.a[0], which the caller has already filled.
void forward_from_input(const MlpParams& p, MlpWorkspace& ws) {
  const int layers = p.layers();
  ws.a.resize(layers + 1);
  ws.g.resize(layers + 1);
  const Eigen::Index batch = ws.a[0].cols();
  for (int l = 0; l < layers; ++l) {
    ws.a[l + 1].resize(p.sizes[l + 1], batch);
    ws.a[l + 1].noalias() = p.W[l] * ws.a[l];
    ws.a[l + 1].colwise() += p.b[l];
    if (l + 1 < layers) tanh_inplace(ws.a[l + 1]);
  }
}

Eigen::VectorXd combine_latent(const Eigen::VectorXd& br, const Eigen::VectorXd& tr,
                               int v, int d) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < v; ++j)
    y += br.segment(j * d, d).cwiseProduct(tr.segment(j * d, d));
  return y;
}

}  // namespace

MlpParams MlpParams::zeros(std::vector<int> sizes) {
  if (sizes.size() < 2) throw DomainError("network needs at least input and output layers");
  for (int n : sizes)
    if (n < 1) throw DomainError("network layer widths must be positive");
  MlpParams p;
  p.sizes = std::move(sizes);
  for (std::size_t l = 0; l + 1 < p.sizes.size(); ++l) {
    p.W.push_back(Eigen::MatrixXd::Zero(p.sizes[l + 1], p.sizes[l]));
    p.b.push_back(Eigen::VectorXd::Zero(p.sizes[l + 1]));
  }
  return p;
}

MlpParams MlpParams::glorot(std::vector<int> sizes, Rng& rng) {
  MlpParams p = zeros(std::move(sizes));
  for (int l = 0; l < p.layers(); ++l) {
    const double r = std::sqrt(6.0 / (p.sizes[l] + p.sizes[l + 1]));
    for (Eigen::Index i = 0; i < p.W[l].rows(); ++i)
      for (Eigen::Index j = 0; j < p.W[l].cols(); ++j) p.W[l](i, j) = rng.uniform(-r, r);
  }
  return p;
}

std::int64_t MlpParams::parameter_count() const {
  std::int64_t n = 0;
  for (int l = 0; l < layers(); ++l) n += W[l].size() + b[l].size();
  return n;
}

void MlpParams::check() const {
  if (sizes.size() < 2 || W.size() + 1 != sizes.size() || b.size() != W.size())
    throw DomainError("network layer bookkeeping is inconsistent");
  for (int l = 0; l < layers(); ++l) {
    if (W[l].rows() != sizes[l + 1] || W[l].cols() != sizes[l] || b[l].size() != sizes[l + 1])
      throw DomainError("network parameter shapes do not match the layer sizes");
    if (!W[l].allFinite() || !b[l].allFinite())
      throw DomainError("network parameters must be finite");
  }
}

MlpGrads MlpGrads::zeros_like(const MlpParams& p) {
  MlpGrads g;
  for (int l = 0; l < p.layers(); ++l) {
    g.W.push_back(Eigen::MatrixXd::Zero(p.W[l].rows(), p.W[l].cols()));
    g.b.push_back(Eigen::VectorXd::Zero(p.b[l].size()));
  }
  return g;
}

void MlpGrads::set_zero() {
  for (auto& w : W) w.setZero();
  for (auto& v : b) v.setZero();
}

void mlp_forward(const MlpParams& p, const Eigen::MatrixXd& input, MlpWorkspace& ws) {
  if (input.rows() != p.sizes.front())
    throw DomainError("network input dimension does not match the first layer");
  ws.a.resize(p.layers() + 1);
  ws.a[0] = input;
  forward_from_input(p, ws);
}

void mlp_backward(const MlpParams& p, MlpWorkspace& ws, MlpGrads& grads,
                  bool want_input_grad) {
  const int layers = p.layers();
  for (int l = layers - 1; l >= 0; --l) {
    Eigen::MatrixXd& gz = ws.g[l + 1];
    if (l + 1 < layers) gz.array() *= 1.0 - ws.a[l + 1].array().square();
    grads.W[l].noalias() = gz * ws.a[l].transpose();
    grads.b[l] = gz.rowwise().sum();
    if (l > 0 || want_input_grad) {
      ws.g[l].resize(p.sizes[l], gz.cols());
      ws.g[l].noalias() = p.W[l].transpose() * gz;
    }
  }
}

Eigen::MatrixXd mlp_input_grad(const MlpParams& p, const MlpWorkspace& ws,
                               Eigen::MatrixXd g_out) {
  const int layers = p.layers();
  Eigen::MatrixXd g = std::move(g_out);
  for (int l = layers - 1; l >= 0; --l) {
    if (l + 1 < layers)
      g.array().colwise() *= 1.0 - ws.a[l + 1].col(0).array().square();
    g = (p.W[l].transpose() * g).eval();
  }
  return g;
}

AffineScale AffineScale::identity(int n) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Ones(n)};
}

AffineScale AffineScale::box_to_unit(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  if (lo.size() != hi.size() || ((hi - lo).array() <= 0.0).any())
    throw DomainError("normalization box must have positive extent");
  return {(lo + hi) / 2.0, (2.0 * (hi - lo).cwiseInverse().array()).matrix()};
}

AffineScale AffineScale::standardize(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev) {
  Eigen::VectorXd scale(stddev.size());
  // A coordinate that never varies gets unit scale instead of a blowup.
  for (Eigen::Index i = 0; i < stddev.size(); ++i)
    scale(i) = stddev(i) > 1e-12 ? 1.0 / stddev(i) : 1.0;
  return {mean, scale};
}

OperatorNet OperatorNet::make(int m, int d, int v, const std::vector<int>& branch_hidden,
                              const std::vector<int>& trunk_hidden, std::uint64_t seed) {
  if (m < 1 || d < 1 || v < 1) throw DomainError("operator dimensions must be positive");
  OperatorNet net;
  net.v = v;
  net.d = d;
  std::vector<int> bs{m};
  bs.insert(bs.end(), branch_hidden.begin(), branch_hidden.end());
  bs.push_back(v * d);
  std::vector<int> ts{1};
  ts.insert(ts.end(), trunk_hidden.begin(), trunk_hidden.end());
  ts.push_back(v * d);
  Rng branch_rng(mix_seed(seed, 0xb1));
  Rng trunk_rng(mix_seed(seed, 0x72));
  net.branch = MlpParams::glorot(bs, branch_rng);
  net.trunk = MlpParams::glorot(ts, trunk_rng);
  net.in_scale = AffineScale::identity(m);
  net.out_scale = AffineScale::identity(d);
  return net;
}

void OperatorNet::check() const {
  branch.check();
  trunk.check();
  if (branch.sizes.back() != v * d || trunk.sizes.back() != v * d)
    throw DomainError("branch/trunk output width must equal latent width x output dimension");
  if (in_scale.center.size() != m() || in_scale.scale.size() != m() ||
      out_scale.center.size() != d || out_scale.scale.size() != d)
    throw DomainError("normalization dimensions do not match the network");
  if ((in_scale.scale.array() == 0.0).any() || (out_scale.scale.array() == 0.0).any())
    throw DomainError("normalization maps must be invertible");
}

namespace {

void warn_outside_box_once() {
  static std::atomic<bool> warned{false};
  if (!warned.exchange(true))
    std::fprintf(stderr,
                 "warning: operator network evaluated outside its training box; "
                 "predictions there are extrapolations\n");
}

bool inside_box(const OperatorNet& net, const Eigen::VectorXd& q_a) {
  const Eigen::VectorXd z = net.in_scale.apply(q_a);
  return (z.array() >= -1.0 - 1e-9).all() && (z.array() <= 1.0 + 1e-9).all();
}

}  // namespace

Eigen::VectorXd operator_eval(const OperatorNet& net, const Eigen::VectorXd& q_a, double s) {
  if (q_a.size() != net.m()) throw DomainError("actuation dimension does not match the network");
  if (!inside_box(net, q_a)) warn_outside_box_once();
  MlpWorkspace wsb, wst;
  mlp_forward(net.branch, net.in_scale.apply(q_a), wsb);
  mlp_forward(net.trunk, Eigen::VectorXd::Constant(1, s), wst);
  return net.out_scale.invert(
      combine_latent(wsb.a.back().col(0), wst.a.back().col(0), net.v, net.d));
}

Eigen::MatrixXd operator_grad_qa(const OperatorNet& net, const Eigen::VectorXd& q_a, double s) {
  if (q_a.size() != net.m()) throw DomainError("actuation dimension does not match the network");
  MlpWorkspace wsb, wst;
  mlp_forward(net.branch, net.in_scale.apply(q_a), wsb);
  mlp_forward(net.trunk, Eigen::VectorXd::Constant(1, s), wst);
  const Eigen::VectorXd tr = wst.a.back().col(0);
  // Seed one reverse pass per output coordinate; column k picks out the
  // trunk entries that multiply branch slot (j,k).
  Eigen::MatrixXd seed = Eigen::MatrixXd::Zero(net.v * net.d, net.d);
  for (int k = 0; k < net.d; ++k)
    for (int j = 0; j < net.v; ++j) seed(readout_index(j, k, net.d), k) = tr(readout_index(j, k, net.d));
  const Eigen::MatrixXd g_in = mlp_input_grad(net.branch, wsb, std::move(seed));  // m x d
  Eigen::MatrixXd jac = g_in.transpose();
  jac.array().rowwise() *= net.in_scale.scale.transpose().array();
  jac.array().colwise() /= net.out_scale.scale.array();
  return jac;
}

Eigen::VectorXd operator_grad_s(const OperatorNet& net, const Eigen::VectorXd& q_a, double s) {
  if (q_a.size() != net.m()) throw DomainError("actuation dimension does not match the network");
  MlpWorkspace wsb, wst;
  mlp_forward(net.branch, net.in_scale.apply(q_a), wsb);
  mlp_forward(net.trunk, Eigen::VectorXd::Constant(1, s), wst);
  // Forward-mode sweep through the trunk (single scalar input).
  Eigen::VectorXd dot = Eigen::VectorXd::Ones(1);
  for (int l = 0; l < net.trunk.layers(); ++l) {
    dot = (net.trunk.W[l] * dot).eval();
    if (l + 1 < net.trunk.layers())
      dot.array() *= 1.0 - wst.a[l + 1].col(0).array().square();
  }
  return combine_latent(wsb.a.back().col(0), dot, net.v, net.d)
      .cwiseQuotient(net.out_scale.scale);
}

OperatorGrads OperatorGrads::zeros_like(const OperatorNet& net) {
  return {MlpGrads::zeros_like(net.branch), MlpGrads::zeros_like(net.trunk)};
}

double operator_backward(const OperatorNet& net, const Eigen::MatrixXd& q_batch,
                         const Eigen::RowVectorXd& s_batch, const Eigen::MatrixXd& targets,
                         OperatorGrads& grads, OperatorWorkspace& ws) {
  const Eigen::Index batch = q_batch.cols();
  if (batch == 0) throw DomainError("training batch must be non-empty");
  if (q_batch.rows() != net.m() || s_batch.cols() != batch || targets.rows() != net.d ||
      targets.cols() != batch)
    throw DomainError("training batch dimensions do not match the network");
  const int v = net.v, d = net.d;
  const int bl = net.branch.layers(), tl = net.trunk.layers();

  ws.branch.a.resize(bl + 1);
  ws.branch.g.resize(bl + 1);
  ws.trunk.a.resize(tl + 1);
  ws.trunk.g.resize(tl + 1);
  ws.branch.a[0].resize(net.m(), batch);
  ws.branch.a[0] = q_batch;
  ws.branch.a[0].colwise() -= net.in_scale.center;
  ws.branch.a[0].array().colwise() *= net.in_scale.scale.array();
  ws.trunk.a[0] = s_batch;
  forward_from_input(net.branch, ws.branch);
  forward_from_input(net.trunk, ws.trunk);

  const Eigen::MatrixXd& br = ws.branch.a.back();
  const Eigen::MatrixXd& tr = ws.trunk.a.back();
  ws.prod.resize(v * d, batch);
  ws.prod = br.cwiseProduct(tr);
  ws.y.resize(d, batch);
  ws.y.setZero();
  for (int j = 0; j < v; ++j) ws.y += ws.prod.middleRows(j * d, d);

  ws.diff.resize(d, batch);
  ws.diff = targets;
  ws.diff.colwise() -= net.out_scale.center;
  ws.diff.array().colwise() *= net.out_scale.scale.array();
  ws.diff = ws.y - ws.diff;

  const double denom = static_cast<double>(batch) * d;
  const double loss = ws.diff.squaredNorm() / denom;

  ws.diff *= 2.0 / denom;  // gradient of the loss w.r.t. predictions
  ws.branch.g[bl].resize(v * d, batch);
  ws.trunk.g[tl].resize(v * d, batch);
  for (int j = 0; j < v; ++j) {
    ws.branch.g[bl].middleRows(j * d, d) = ws.diff.cwiseProduct(tr.middleRows(j * d, d));
    ws.trunk.g[tl].middleRows(j * d, d) = ws.diff.cwiseProduct(br.middleRows(j * d, d));
  }
  mlp_backward(net.branch, ws.branch, grads.branch);
  mlp_backward(net.trunk, ws.trunk, grads.trunk);
  return loss;
}

NeuralShapeModel::NeuralShapeModel(OperatorNet net) : net_(std::move(net)) {
  net_.check();
  box_lo_ = net_.in_scale.center - net_.in_scale.scale.cwiseInverse();
  box_hi_ = net_.in_scale.center + net_.in_scale.scale.cwiseInverse();
}

void NeuralShapeModel::refresh_branch(const Eigen::VectorXd& q_a) const {
  if (cached_q_.size() == q_a.size() && (cached_q_.array() == q_a.array()).all()) return;
  if (((q_a - box_hi_).array() > 1e-9).any() || ((box_lo_ - q_a).array() > 1e-9).any()) {
    ++out_of_box_;
    if (!warned_) {
      warned_ = true;
      std::fprintf(stderr,
                   "warning: shape model queried outside its training box; "
                   "predictions there are extrapolations\n");
    }
  }
  MlpWorkspace wsb;
  mlp_forward(net_.branch, net_.in_scale.apply(q_a), wsb);
  cached_branch_ = wsb.a.back().col(0);
  cached_q_ = q_a;
}

Eigen::VectorXd NeuralShapeModel::shape(const Eigen::VectorXd& q_a, double s) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  refresh_branch(q_a);
  MlpWorkspace wst;
  mlp_forward(net_.trunk, Eigen::VectorXd::Constant(1, s), wst);
  return net_.out_scale.invert(
      combine_latent(cached_branch_, wst.a.back().col(0), net_.v, net_.d));
}

Eigen::MatrixXd NeuralShapeModel::partials(const Eigen::VectorXd& q_a, double s) const {
  return operator_grad_qa(net_, q_a, s);
}

}  // namespace softclik
