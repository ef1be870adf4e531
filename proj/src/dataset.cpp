#include "softclik/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>

#include "softclik/errors.hpp"
#include "softclik/rng.hpp"
#include "softclik/threads.hpp"

namespace softclik {

Dataset Dataset::select(const std::vector<std::int64_t>& indices) const {
  Dataset out;
  out.m = m;
  out.n_s = n_s;
  out.d = d;
  out.count = static_cast<std::int64_t>(indices.size());
  out.seed = seed;
  out.params_hash = params_hash;
  out.failed = failed;
  out.q.resize(out.count, m);
  out.shapes.resize(out.count * n_s, d);
  for (std::int64_t row = 0; row < out.count; ++row) {
    const std::int64_t i = indices[static_cast<std::size_t>(row)];
    if (i < 0 || i >= count) throw DomainError("dataset row index out of range");
    out.q.row(row) = q.row(i);
    out.shapes.middleRows(row * n_s, n_s) = shapes.middleRows(i * n_s, n_s);
  }
  return out;
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t hash_doubles(std::uint64_t h, const double* v, std::size_t n) {
  return fnv1a(h, v, n * sizeof(double));
}

}  // namespace

std::uint64_t rod_params_hash(const RodParams& p, const Eigen::VectorXd& box_lo,
                              const Eigen::VectorXd& box_hi, int n_s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  const double scalars[] = {p.L,          p.EI1,          p.EI2,         p.GJ,
                            p.EA,         p.w,            p.fibers.c_b,  p.fibers.c_e,
                            p.fibers.c_h, p.fibers.tau_c, p.fibers.c_e2, p.fibers.n_t};
  h = hash_doubles(h, scalars, sizeof(scalars) / sizeof(double));
  h = hash_doubles(h, p.gravity.data(), 3);
  h = hash_doubles(h, box_lo.data(), static_cast<std::size_t>(box_lo.size()));
  h = hash_doubles(h, box_hi.data(), static_cast<std::size_t>(box_hi.size()));
  const std::uint64_t ns64 = static_cast<std::uint64_t>(n_s);
  h = fnv1a(h, &ns64, sizeof(ns64));
  return h;
}

Dataset generate(const RodParams& p, const Eigen::VectorXd& box_lo,
                 const Eigen::VectorXd& box_hi, std::int64_t n, int n_s,
                 std::uint64_t seed, int retries, double tol) {
  p.validate();
  if (n < 1) throw DomainError("dataset size must be at least 1");
  if (n_s < 2) throw DomainError("dataset grid needs at least 2 nodes");
  const int m = static_cast<int>(box_lo.size());
  if (box_hi.size() != m || m != 3)
    throw DomainError("activation box must list 3 lower and 3 upper bounds");
  if (((box_hi - box_lo).array() < 0.0).any())
    throw DomainError("activation box must satisfy lo <= hi");

  RowMatrixXd q(n, m);
  RowMatrixXd shapes(n * n_s, 3);
  std::vector<std::uint64_t> attempts(static_cast<std::size_t>(n), 0);
  std::vector<char> ok(static_cast<std::size_t>(n), 0);

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt <= retries; ++attempt) {
      Eigen::VectorXd qa(m);
      for (int j = 0; j < m; ++j) qa(j) = rng.uniform(box_lo(j), box_hi(j));
      try {
        const BvpSolution sol = solve_bvp(p, qa, n_s, tol);
        q.row(static_cast<std::int64_t>(i)) = qa.transpose();
        shapes.middleRows(static_cast<std::int64_t>(i) * n_s, n_s) = sol.centerline.values();
        ok[i] = 1;
        attempts[i] = static_cast<std::uint64_t>(attempt);
        return;
      } catch (const Error&) {
        // solver failure or nonphysical draw: redraw from the same stream
      }
    }
    attempts[i] = static_cast<std::uint64_t>(retries) + 1;
  });

  std::uint64_t failed_draws = 0;
  std::vector<std::int64_t> good;
  good.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    failed_draws += attempts[static_cast<std::size_t>(i)];
    if (ok[static_cast<std::size_t>(i)]) good.push_back(i);
  }
  const std::int64_t dropped = n - static_cast<std::int64_t>(good.size());
  if (static_cast<double>(dropped) > 0.01 * static_cast<double>(n))
    throw Error("dataset generation lost " + std::to_string(dropped) + " of " +
                std::to_string(n) + " samples to solver failures; the rod parameters are "
                "likely outside the solvable regime");

  Dataset ds;
  ds.m = m;
  ds.n_s = n_s;
  ds.d = 3;
  ds.seed = seed;
  ds.params_hash = rod_params_hash(p, box_lo, box_hi, n_s);
  ds.failed = failed_draws;
  if (dropped == 0) {
    ds.count = n;
    ds.q = std::move(q);
    ds.shapes = std::move(shapes);
  } else {
    ds.count = static_cast<std::int64_t>(good.size());
    ds.q.resize(ds.count, m);
    ds.shapes.resize(ds.count * n_s, 3);
    for (std::int64_t row = 0; row < ds.count; ++row) {
      ds.q.row(row) = q.row(good[static_cast<std::size_t>(row)]);
      ds.shapes.middleRows(row * n_s, n_s) =
          shapes.middleRows(good[static_cast<std::size_t>(row)] * n_s, n_s);
    }
  }
  if (!ds.q.allFinite() || !ds.shapes.allFinite())
    throw Error("dataset generation produced non-finite values");
  return ds;
}

SplitIndices split_indices(std::int64_t n, const Eigen::Vector3d& fractions,
                           std::uint64_t seed) {
  if (n < 1) throw DomainError("cannot split an empty dataset");
  if ((fractions.array() < 0.0).any() || std::abs(fractions.sum() - 1.0) > 1e-9)
    throw DomainError("split fractions must be nonnegative and sum to 1");
  // Sizes: floor each share, hand the remainder to the largest fractional
  // parts (ties to the earlier part).
  std::int64_t sizes[3];
  double fracpart[3];
  std::int64_t assigned = 0;
  for (int j = 0; j < 3; ++j) {
    const double share = fractions(j) * static_cast<double>(n);
    sizes[j] = static_cast<std::int64_t>(std::floor(share));
    fracpart[j] = share - std::floor(share);
    assigned += sizes[j];
  }
  int order[3] = {0, 1, 2};
  std::stable_sort(order, order + 3, [&](int a, int b) { return fracpart[a] > fracpart[b]; });
  for (int j = 0; assigned < n; ++j, ++assigned) ++sizes[order[j % 3]];

  std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(mix_seed(seed, 0x5b117));
  for (std::int64_t i = n - 1; i > 0; --i)
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);

  SplitIndices out;
  auto it = perm.begin();
  out.train.assign(it, it + sizes[0]);
  it += sizes[0];
  out.validation.assign(it, it + sizes[1]);
  it += sizes[1];
  out.test.assign(it, it + sizes[2]);
  return out;
}

DatasetSplit split(const Dataset& ds, const Eigen::Vector3d& fractions, std::uint64_t seed) {
  const SplitIndices idx = split_indices(ds.count, fractions, seed);
  return {ds.select(idx.train), ds.select(idx.validation), ds.select(idx.test)};
}

namespace {

constexpr char kMagic[8] = {'S', 'O', 'F', 'T', 'C', 'L', 'I', 'K'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 64;

void put_u32(unsigned char* at, std::uint32_t v) { std::memcpy(at, &v, 4); }
void put_u64(unsigned char* at, std::uint64_t v) { std::memcpy(at, &v, 8); }
std::uint32_t get_u32(const unsigned char* at) {
  std::uint32_t v;
  std::memcpy(&v, at, 4);
  return v;
}
std::uint64_t get_u64(const unsigned char* at) {
  std::uint64_t v;
  std::memcpy(&v, at, 8);
  return v;
}

}  // namespace

void save(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path);
  unsigned char header[kHeaderSize] = {};
  std::memcpy(header, kMagic, 8);
  put_u32(header + 8, kVersion);
  put_u32(header + 12, static_cast<std::uint32_t>(ds.m));
  put_u32(header + 16, static_cast<std::uint32_t>(ds.n_s));
  put_u32(header + 20, static_cast<std::uint32_t>(ds.d));
  put_u64(header + 24, static_cast<std::uint64_t>(ds.count));
  put_u64(header + 32, ds.seed);
  put_u64(header + 40, ds.params_hash);
  put_u64(header + 48, ds.failed);
  out.write(reinterpret_cast<const char*>(header), kHeaderSize);
  out.write(reinterpret_cast<const char*>(ds.q.data()),
            static_cast<std::streamsize>(sizeof(double) * ds.q.size()));
  out.write(reinterpret_cast<const char*>(ds.shapes.data()),
            static_cast<std::streamsize>(sizeof(double) * ds.shapes.size()));
  if (!out) throw Error("write failed: " + path);
}

Dataset load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path);
  unsigned char header[kHeaderSize];
  in.read(reinterpret_cast<char*>(header), kHeaderSize);
  if (in.gcount() != static_cast<std::streamsize>(kHeaderSize))
    throw FormatError("dataset file shorter than its header", static_cast<std::size_t>(in.gcount()));
  if (std::memcmp(header, kMagic, 8) != 0) throw FormatError("bad dataset magic", 0);
  if (get_u32(header + 8) != kVersion) throw FormatError("unsupported dataset version", 8);
  Dataset ds;
  ds.m = static_cast<int>(get_u32(header + 12));
  ds.n_s = static_cast<int>(get_u32(header + 16));
  ds.d = static_cast<int>(get_u32(header + 20));
  ds.count = static_cast<std::int64_t>(get_u64(header + 24));
  ds.seed = get_u64(header + 32);
  ds.params_hash = get_u64(header + 40);
  ds.failed = get_u64(header + 48);
  if (ds.m < 1 || ds.m > 1024) throw FormatError("implausible activation dimension", 12);
  if (ds.n_s < 2 || ds.n_s > 1000000) throw FormatError("implausible grid size", 16);
  if (ds.d != 2 && ds.d != 3) throw FormatError("implausible ambient dimension", 20);
  if (ds.count < 0 || ds.count > (std::int64_t(1) << 40))
    throw FormatError("implausible sample count", 24);

  ds.q.resize(ds.count, ds.m);
  ds.shapes.resize(ds.count * ds.n_s, ds.d);
  const std::streamsize q_bytes = static_cast<std::streamsize>(sizeof(double) * ds.q.size());
  in.read(reinterpret_cast<char*>(ds.q.data()), q_bytes);
  if (in.gcount() != q_bytes)
    throw FormatError("dataset file truncated in the activation block",
                      kHeaderSize + static_cast<std::size_t>(in.gcount()));
  const std::streamsize s_bytes =
      static_cast<std::streamsize>(sizeof(double) * ds.shapes.size());
  in.read(reinterpret_cast<char*>(ds.shapes.data()), s_bytes);
  if (in.gcount() != s_bytes)
    throw FormatError("dataset file truncated in the shape block",
                      kHeaderSize + static_cast<std::size_t>(q_bytes + in.gcount()));
  char extra;
  if (in.read(&extra, 1), in.gcount() != 0)
    throw FormatError("dataset file has trailing bytes",
                      kHeaderSize + static_cast<std::size_t>(q_bytes + s_bytes));
  if (!ds.q.allFinite() || !ds.shapes.allFinite())
    throw FormatError("dataset payload contains non-finite values", kHeaderSize);
  return ds;
}

void export_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "sample,s";
  for (int j = 0; j < ds.m; ++j) out << ",q" << j + 1;
  const char* coord = "xyz";
  for (int j = 0; j < ds.d; ++j) out << "," << coord[j];
  out << "\n";
  out.precision(17);
  for (std::int64_t i = 0; i < ds.count; ++i)
    for (int k = 0; k < ds.n_s; ++k) {
      out << i << "," << static_cast<double>(k) / (ds.n_s - 1);
      for (int j = 0; j < ds.m; ++j) out << "," << ds.q(i, j);
      for (int j = 0; j < ds.d; ++j) out << "," << ds.shapes(i * ds.n_s + k, j);
      out << "\n";
    }
  if (!out) throw Error("write failed: " + path);
}

}  // namespace softclik
