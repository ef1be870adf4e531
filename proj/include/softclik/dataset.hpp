#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "softclik/rod_model.hpp"

namespace softclik {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Activation-to-shape sample collection. Shapes are stacked: the position of
/// sample i at grid node k is shapes.row(i * n_s + k). Row-major storage
/// mirrors the on-disk layout, so save/load round-trip byte-for-byte.
struct Dataset {
  int m = 0;
  int n_s = 0;
  int d = 0;
  std::int64_t count = 0;
  std::uint64_t seed = 0;
  std::uint64_t params_hash = 0;  // rod parameters + box + grid, for provenance
  std::uint64_t failed = 0;       // solver failures replaced during generation

  RowMatrixXd q;       // count x m
  RowMatrixXd shapes;  // (count * n_s) x d

  Eigen::Map<const RowMatrixXd> shape(std::int64_t i) const {
    return {shapes.data() + i * n_s * d, n_s, d};
  }

  /// Sub-dataset selected by row indices (metadata carried over).
  Dataset select(const std::vector<std::int64_t>& indices) const;
};

/// Hash of the generation inputs stored in the dataset header.
std::uint64_t rod_params_hash(const RodParams& p, const Eigen::VectorXd& box_lo,
                              const Eigen::VectorXd& box_hi, int n_s);

/// Draws activations uniformly from the box (per-sample stream seed ^ i, so
/// any worker count produces the same file), solves the equilibrium for each,
/// and replaces solver failures with fresh draws (up to `retries` per slot).
/// Slots that still fail are dropped; more than 1% of them is an error.
Dataset generate(const RodParams& p, const Eigen::VectorXd& box_lo,
                 const Eigen::VectorXd& box_hi, std::int64_t n, int n_s,
                 std::uint64_t seed, int retries = 3, double tol = 1e-10);

struct SplitIndices {
  std::vector<std::int64_t> train, validation, test;
};

/// Seeded permutation split; sizes are floor(fraction * N) with the remainder
/// given to the largest fractional parts (ties to the earlier part).
SplitIndices split_indices(std::int64_t n, const Eigen::Vector3d& fractions,
                           std::uint64_t seed);

struct DatasetSplit {
  Dataset train, validation, test;
};
DatasetSplit split(const Dataset& ds, const Eigen::Vector3d& fractions, std::uint64_t seed);

void save(const Dataset& ds, const std::string& path);
Dataset load(const std::string& path);

/// One row per (sample, node): i, s, q..., x... for eyeballing in other tools.
void export_csv(const Dataset& ds, const std::string& path);

}  // namespace softclik
