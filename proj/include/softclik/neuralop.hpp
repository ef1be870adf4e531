#pragma once

#include <cstdint>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "softclik/rng.hpp"
#include "softclik/shape_model.hpp"

namespace softclik {

/// Fully connected network: tanh on hidden layers, identity on the output
/// layer. W[l] maps layer l to layer l+1 (sizes[l+1] x sizes[l]).
struct MlpParams {
  std::vector<int> sizes;
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;

  static MlpParams zeros(std::vector<int> sizes);
  /// Symmetric uniform fan-in/fan-out init, weights drawn layer by layer in
  /// row-major order from rng; biases zero.
  static MlpParams glorot(std::vector<int> sizes, Rng& rng);

  int layers() const { return static_cast<int>(W.size()); }
  std::int64_t parameter_count() const;
  void check() const;  // dimension compatibility + finiteness
};

/// Per-layer gradient (or optimizer moment) storage with MlpParams shapes.
struct MlpGrads {
  std::vector<Eigen::MatrixXd> W;
  std::vector<Eigen::VectorXd> b;

  static MlpGrads zeros_like(const MlpParams& p);
  void set_zero();
};

/// Reusable forward/backward buffers: a[l] activations (a[0] = input), g[l]
/// gradient w.r.t. a[l]. Keeping them between steps avoids reallocation.
struct MlpWorkspace {
  std::vector<Eigen::MatrixXd> a;
  std::vector<Eigen::MatrixXd> g;
};

/// Batched forward pass; input columns are samples. ws.a[0] receives the
/// input, ws.a.back() the output.
void mlp_forward(const MlpParams& p, const Eigen::MatrixXd& input, MlpWorkspace& ws);

/// Reverse pass. ws.g.back() must hold dLoss/d(output); fills grads and, when
/// want_input_grad, leaves dLoss/d(input) in ws.g[0].
void mlp_backward(const MlpParams& p, MlpWorkspace& ws, MlpGrads& grads,
                  bool want_input_grad = false);

/// Input-gradient-only reverse pass for a single-sample tape: g_out may carry
/// several columns (one per seeded output direction) against a batch-1 tape.
Eigen::MatrixXd mlp_input_grad(const MlpParams& p, const MlpWorkspace& ws,
                               Eigen::MatrixXd g_out);

/// Invertible componentwise affine map: apply(x) = (x - center) .* scale.
struct AffineScale {
  Eigen::VectorXd center;
  Eigen::VectorXd scale;

  static AffineScale identity(int n);
  static AffineScale box_to_unit(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  static AffineScale standardize(const Eigen::VectorXd& mean, const Eigen::VectorXd& stddev);

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    return (x - center).cwiseProduct(scale);
  }
  Eigen::VectorXd invert(const Eigen::VectorXd& y) const {
    return y.cwiseQuotient(scale) + center;
  }
};

/// Index of latent slot j, output coordinate k inside the branch/trunk output
/// vector (latent-major layout).
inline int readout_index(int j, int k, int d) { return j * d + k; }

/// Branch/trunk operator network. The branch encodes the actuation vector,
/// the trunk the evaluation coordinate s; the prediction per output
/// coordinate k is the latent dot product
///   y_k = sum_j branch[j*d+k] * trunk[j*d+k],
/// computed in normalized space and mapped back through out_scale.
struct OperatorNet {
  MlpParams branch;  // input m, output v*d
  MlpParams trunk;   // input 1, output v*d
  int v = 0;         // latent width
  int d = 0;         // output dimension
  AffineScale in_scale;   // actuation -> normalized
  AffineScale out_scale;  // physical point -> normalized

  static OperatorNet make(int m, int d, int v, const std::vector<int>& branch_hidden,
                          const std::vector<int>& trunk_hidden, std::uint64_t seed);

  int m() const { return branch.sizes.front(); }
  void check() const;
};

/// Prediction at one (q_a, s).
Eigen::VectorXd operator_eval(const OperatorNet& net, const Eigen::VectorXd& q_a, double s);

/// Exact d x m derivative of operator_eval with respect to q_a (reverse mode
/// through the branch; trunk held fixed).
Eigen::MatrixXd operator_grad_qa(const OperatorNet& net, const Eigen::VectorXd& q_a, double s);

/// Exact derivative of operator_eval with respect to s (forward mode through
/// the trunk).
Eigen::VectorXd operator_grad_s(const OperatorNet& net, const Eigen::VectorXd& q_a, double s);

struct OperatorGrads {
  MlpGrads branch;
  MlpGrads trunk;

  static OperatorGrads zeros_like(const OperatorNet& net);
};

/// Scratch buffers for batched training steps.
struct OperatorWorkspace {
  MlpWorkspace branch;
  MlpWorkspace trunk;
  Eigen::MatrixXd prod;  // branch .* trunk outputs
  Eigen::MatrixXd y;     // predictions, d x B
  Eigen::MatrixXd diff;  // residuals, d x B
};

/// Batched loss and parameter gradients. Columns of q_batch / targets are
/// samples; s_batch holds the matching coordinates. targets are physical
/// positions; the loss is the mean over batch and coordinates of the squared
/// normalized residual. Returns the loss.
double operator_backward(const OperatorNet& net, const Eigen::MatrixXd& q_batch,
                         const Eigen::RowVectorXd& s_batch, const Eigen::MatrixXd& targets,
                         OperatorGrads& grads, OperatorWorkspace& ws);

/// ShapeModel adapter around a trained network. Caches the branch output for
/// the most recent q_a (closest-point searches evaluate many s per q_a).
/// Evaluations outside the training box are counted and warned about once.
class NeuralShapeModel final : public ShapeModel {
 public:
  explicit NeuralShapeModel(OperatorNet net);

  int actuation_dim() const override { return net_.m(); }
  int ambient_dim() const override { return net_.d; }
  Eigen::VectorXd shape(const Eigen::VectorXd& q_a, double s) const override;
  Eigen::MatrixXd partials(const Eigen::VectorXd& q_a, double s) const override;

  const OperatorNet& net() const { return net_; }
  std::int64_t out_of_box_count() const { return out_of_box_; }

 private:
  void refresh_branch(const Eigen::VectorXd& q_a) const;

  OperatorNet net_;
  Eigen::VectorXd box_lo_, box_hi_;
  mutable std::mutex cache_mutex_;
  mutable Eigen::VectorXd cached_q_;
  mutable Eigen::VectorXd cached_branch_;
  mutable std::int64_t out_of_box_ = 0;
  mutable bool warned_ = false;
};

}  // namespace softclik
