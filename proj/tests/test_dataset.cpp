#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <limits>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "softclik/dataset.hpp"
#include "softclik/errors.hpp"
#include "softclik/rod_model.hpp"

using namespace softclik;

namespace {

std::vector<char> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::string& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name)
      : path((std::filesystem::temp_directory_path() / name).string()) {}
  ~TempFile() { std::filesystem::remove(path); }
};

Dataset tiny_dataset(std::uint64_t seed = 3) {
  const RodParams p;
  const Eigen::Vector3d lo = Eigen::Vector3d::Constant(-1.0);
  const Eigen::Vector3d hi = Eigen::Vector3d::Zero();
  return generate(p, lo, hi, 12, 10, seed);
}

}  // namespace

TEST_CASE("generation is deterministic and seed-sensitive") {
  const Dataset a = tiny_dataset(3);
  const Dataset b = tiny_dataset(3);
  const Dataset c = tiny_dataset(4);
  CHECK(a.q == b.q);
  CHECK(a.shapes == b.shapes);
  CHECK(a.failed == b.failed);
  CHECK(a.q != c.q);
}

TEST_CASE("generation ignores the worker-count environment") {
  setenv("SOFTCLIK_THREADS", "4", 1);
  const Dataset a = tiny_dataset(11);
  setenv("SOFTCLIK_THREADS", "1", 1);
  const Dataset b = tiny_dataset(11);
  unsetenv("SOFTCLIK_THREADS");
  CHECK(a.q == b.q);
  CHECK(a.shapes == b.shapes);
}

TEST_CASE("a collapsed box repeats the single activation") {
  const RodParams p;
  const Eigen::Vector3d point = Eigen::Vector3d::Constant(-0.5);
  const Dataset ds = generate(p, point, point, 5, 8, 1);
  REQUIRE(ds.count == 5);
  for (int i = 1; i < 5; ++i) {
    CHECK(ds.q.row(i) == ds.q.row(0));
    CHECK(Eigen::MatrixXd(ds.shape(i)) == Eigen::MatrixXd(ds.shape(0)));
  }
}

TEST_CASE("hopeless parameters abort instead of silently shrinking") {
  const RodParams p;
  const Eigen::Vector3d lo = Eigen::Vector3d::Constant(-80.0);
  const Eigen::Vector3d hi = Eigen::Vector3d::Zero();
  CHECK_THROWS_AS(generate(p, lo, hi, 60, 8, 1, 1), Error);
}

TEST_CASE("generation validates its arguments") {
  const RodParams p;
  const Eigen::Vector3d lo = Eigen::Vector3d::Constant(-1.0);
  const Eigen::Vector3d hi = Eigen::Vector3d::Zero();
  CHECK_THROWS_AS(generate(p, lo, hi, 0, 10, 1), DomainError);
  CHECK_THROWS_AS(generate(p, lo, hi, 4, 1, 1), DomainError);
  CHECK_THROWS_AS(generate(p, hi, lo, 4, 10, 1), DomainError);
}

TEST_CASE("the provenance hash tracks parameters and box") {
  const RodParams p;
  RodParams heavier = p;
  heavier.w = 0.3;
  const Eigen::Vector3d lo = Eigen::Vector3d::Constant(-1.0);
  const Eigen::Vector3d hi = Eigen::Vector3d::Zero();
  CHECK(rod_params_hash(p, lo, hi, 10) == rod_params_hash(p, lo, hi, 10));
  CHECK(rod_params_hash(p, lo, hi, 10) != rod_params_hash(heavier, lo, hi, 10));
  CHECK(rod_params_hash(p, lo, hi, 10) != rod_params_hash(p, lo, hi, 20));
  CHECK(rod_params_hash(p, lo, hi, 10) != rod_params_hash(p, 0.5 * lo, hi, 10));
}

TEST_CASE("the documented split example produces 6/2/2") {
  const SplitIndices idx = split_indices(10, {0.64, 0.16, 0.20}, 42);
  CHECK(idx.train.size() == 6);
  CHECK(idx.validation.size() == 2);
  CHECK(idx.test.size() == 2);
  std::vector<char> seen(10, 0);
  for (const auto& part : {idx.train, idx.validation, idx.test})
    for (const std::int64_t i : part) {
      REQUIRE(i >= 0);
      REQUIRE(i < 10);
      CHECK(!seen[static_cast<std::size_t>(i)]);
      seen[static_cast<std::size_t>(i)] = 1;
    }
  for (const char s : seen) CHECK(s == 1);
}

TEST_CASE("split fractions must be a partition") {
  CHECK_THROWS_AS(split_indices(10, {0.5, 0.2, 0.2}, 1), DomainError);
  CHECK_THROWS_AS(split_indices(10, {1.2, -0.1, -0.1}, 1), DomainError);
  CHECK_THROWS_AS(split_indices(0, {0.6, 0.2, 0.2}, 1), DomainError);
}

TEST_CASE("splits are deterministic in the seed and cover the dataset") {
  const Dataset ds = tiny_dataset();
  const DatasetSplit s1 = split(ds, {0.5, 0.25, 0.25}, 9);
  const DatasetSplit s2 = split(ds, {0.5, 0.25, 0.25}, 9);
  CHECK(s1.train.q == s2.train.q);
  CHECK(s1.test.shapes == s2.test.shapes);
  CHECK(s1.train.count + s1.validation.count + s1.test.count == ds.count);
  // metadata rides along
  CHECK(s1.train.n_s == ds.n_s);
  CHECK(s1.train.params_hash == ds.params_hash);
  // every selected row exists verbatim in the source
  for (int i = 0; i < s1.train.count; ++i) {
    bool found = false;
    for (int j = 0; j < ds.count && !found; ++j)
      found = s1.train.q.row(i) == ds.q.row(j);
    CHECK(found);
  }
}

TEST_CASE("select pulls rows with their shape blocks") {
  const Dataset ds = tiny_dataset();
  const Dataset sub = ds.select({2, 5, 7});
  REQUIRE(sub.count == 3);
  CHECK(sub.q.row(0) == ds.q.row(2));
  CHECK(sub.q.row(2) == ds.q.row(7));
  CHECK(Eigen::MatrixXd(sub.shape(1)) == Eigen::MatrixXd(ds.shape(5)));
  CHECK_THROWS_AS(ds.select({12}), DomainError);
}

TEST_CASE("save and load round trip byte for byte") {
  const Dataset ds = tiny_dataset();
  TempFile first("softclik_ds_a.bin"), second("softclik_ds_b.bin");
  save(ds, first.path);
  const Dataset back = load(first.path);
  CHECK(back.m == ds.m);
  CHECK(back.n_s == ds.n_s);
  CHECK(back.d == ds.d);
  CHECK(back.count == ds.count);
  CHECK(back.seed == ds.seed);
  CHECK(back.params_hash == ds.params_hash);
  CHECK(back.failed == ds.failed);
  CHECK(back.q == ds.q);
  CHECK(back.shapes == ds.shapes);
  save(back, second.path);
  CHECK(read_bytes(first.path) == read_bytes(second.path));
}

TEST_CASE("corrupted dataset files are rejected with positions") {
  const Dataset ds = tiny_dataset();
  TempFile file("softclik_ds_corrupt.bin");
  save(ds, file.path);
  const std::vector<char> good = read_bytes(file.path);

  SUBCASE("bad magic") {
    std::vector<char> bad = good;
    bad[0] = 'X';
    write_bytes(file.path, bad);
    try {
      load(file.path);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.offset == 0);
    }
  }
  SUBCASE("unsupported version") {
    std::vector<char> bad = good;
    bad[8] = 9;
    write_bytes(file.path, bad);
    try {
      load(file.path);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(e.offset == 8);
    }
  }
  SUBCASE("truncated header") {
    write_bytes(file.path, {good.begin(), good.begin() + 30});
    CHECK_THROWS_AS(load(file.path), FormatError);
  }
  SUBCASE("truncated payload") {
    write_bytes(file.path, {good.begin(), good.end() - 17});
    CHECK_THROWS_AS(load(file.path), FormatError);
  }
  SUBCASE("trailing bytes") {
    std::vector<char> bad = good;
    bad.push_back('\0');
    write_bytes(file.path, bad);
    CHECK_THROWS_AS(load(file.path), FormatError);
  }
  SUBCASE("non-finite payload") {
    std::vector<char> bad = good;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::memcpy(bad.data() + 64, &nan, sizeof(nan));
    write_bytes(file.path, bad);
    CHECK_THROWS_AS(load(file.path), FormatError);
  }
  SUBCASE("missing file") { CHECK_THROWS_AS(load("/nonexistent/ds.bin"), Error); }
}

TEST_CASE("csv export writes one row per grid node") {
  const Dataset ds = tiny_dataset();
  TempFile file("softclik_ds.csv");
  export_csv(ds, file.path);
  std::ifstream in(file.path);
  std::string line;
  std::int64_t lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + ds.count * ds.n_s);
}
