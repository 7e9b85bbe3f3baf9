#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

#include "streamattn/matf.hpp"
#include "streamattn/matrix.hpp"

using namespace streamattn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "streamattn_tensor_core";
  fs::create_directories(dir);
  return dir / name;
}

DenseMatrix seeded(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(RngSeed{seed});
  DenseMatrix m(rows, cols);
  for (double& x : m.data()) x = rng.normal() * std::pow(10.0, rng.uniform(-30, 30));
  return m;
}

void write_raw(const fs::path& path, std::uint32_t rows, std::uint32_t cols,
               const std::vector<double>& payload) {
  std::ofstream out(path, std::ios::binary);
  out.write(kMatfMagic, 8);
  out.write(reinterpret_cast<const char*>(&rows), 4);
  out.write(reinterpret_cast<const char*>(&cols), 4);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
}

}  // namespace

TEST_CASE("DenseMatrix rejects bad construction") {
  CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DenseMatrix(1, 1, {std::numeric_limits<double>::infinity()}),
                  std::invalid_argument);
  DenseMatrix z(3, 2);
  CHECK(z.size() == 6);
  CHECK(z.max_abs() == 0.0);
}

TEST_CASE("mat_store sizes") {
  const auto p = scratch("one.matf");
  mat_store(DenseMatrix(1, 1), p);
  // 8-byte magic + two u32 dims + one float64.
  CHECK(fs::file_size(p) == 24);
  const auto q = scratch("two_by_three.matf");
  mat_store(DenseMatrix(2, 3), q);
  CHECK(fs::file_size(q) - kMatfHeaderBytes == 48);
}

TEST_CASE("identity round-trips bit-exactly") {
  const auto p = scratch("eye.matf");
  mat_store(DenseMatrix::identity(2), p);
  CHECK(mat_load(p) == DenseMatrix::identity(2));
}

TEST_CASE("header layout is little-endian u32 dims after the magic") {
  const auto p = scratch("layout.matf");
  mat_store(DenseMatrix(3, 5), p);
  std::ifstream in(p, std::ios::binary);
  unsigned char header[16];
  in.read(reinterpret_cast<char*>(header), 16);
  CHECK(std::memcmp(header, "MATF0001", 8) == 0);
  CHECK(header[8] == 3);
  CHECK(header[9] == 0);
  CHECK(header[12] == 5);
  CHECK(header[15] == 0);
}

TEST_CASE("seeded matrices round-trip bit-exactly") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng shape(RngSeed{seed + 1000});
    const std::size_t rows = 1 + shape.below(12);
    const std::size_t cols = 1 + shape.below(9);
    const DenseMatrix m = seeded(rows, cols, seed);
    const auto p = scratch("prop.matf");
    mat_store(m, p);
    const DenseMatrix back = mat_load(p);
    REQUIRE(back.rows() == rows);
    REQUIRE(back.cols() == cols);
    CHECK(std::memcmp(back.data().data(), m.data().data(), m.size() * sizeof(double)) == 0);
  }
  const auto p = scratch("eight_by_four.matf");
  const DenseMatrix m = seeded(8, 4, 7);
  mat_store(m, p);
  CHECK(mat_load(p) == m);
}

TEST_CASE("mat_load errors") {
  SUBCASE("payload length mismatch") {
    const auto p = scratch("short.matf");
    write_raw(p, 2, 2, {1.0, 2.0, 3.0});
    CHECK_THROWS_WITH_AS(mat_load(p), doctest::Contains("payload length mismatch"), MatfError);
  }
  SUBCASE("bad magic") {
    const auto p = scratch("magic.matf");
    std::ofstream(p, std::ios::binary) << "NOTMATF!xxxxxxxx";
    CHECK_THROWS_WITH_AS(mat_load(p), doctest::Contains("bad magic"), MatfError);
  }
  SUBCASE("truncated header") {
    const auto p = scratch("trunc.matf");
    std::ofstream(p, std::ios::binary) << "MATF0";
    CHECK_THROWS_AS(mat_load(p), MatfError);
  }
  SUBCASE("non-finite entry names the cell") {
    const auto p = scratch("nan.matf");
    write_raw(p, 2, 2, {1.0, 2.0, std::numeric_limits<double>::quiet_NaN(), 4.0});
    CHECK_THROWS_WITH_AS(mat_load(p), doctest::Contains("cell (1, 0), byte offset 32"),
                         MatfError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(mat_load(scratch("does_not_exist.matf")), MatfError);
  }
}

TEST_CASE("mat_store surfaces the path on I/O failure") {
  const fs::path bad = scratch("no_such_dir") / "x.matf";
  CHECK_THROWS_WITH_AS(mat_store(DenseMatrix(1, 1), bad), doctest::Contains("no_such_dir"),
                       MatfError);
}

TEST_CASE("spectral_norm_upper known cases") {
  CHECK(spectral_norm_upper(DenseMatrix(3, 4)) == 0.0);
  DenseMatrix diag(2, 2, {3.0, 0.0, 0.0, 1.0});
  const double s = spectral_norm_upper(diag);
  CHECK(s >= 3.0);
  CHECK(s <= 3.0 * (1.0 + 1e-6));
  // The all-ones start is orthogonal to the only right singular direction.
  DenseMatrix skew(1, 2, {1.0, -1.0});
  CHECK(spectral_norm_upper(skew) >= std::sqrt(2.0));
}

TEST_CASE("spectral_norm_upper matches an SVD oracle") {
  const DenseMatrix m = [] {
    Rng rng(RngSeed{42});
    DenseMatrix x(16, 4);
    for (double& v : x.data()) v = rng.normal();
    return x;
  }();
  Eigen::MatrixXd e(16, 4);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 4; ++j) e(i, j) = m(i, j);
  const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(e).singularValues()(0);
  CHECK(std::abs(spectral_norm_upper(m) - sigma) / sigma <= 1e-4);
}

TEST_CASE("spectral_norm_upper dominates every column norm") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(RngSeed{seed});
    const std::size_t rows = 1 + rng.below(10);
    const std::size_t cols = 1 + rng.below(6);
    DenseMatrix m(rows, cols);
    for (double& v : m.data()) v = rng.uniform(-1, 1);
    const double s = spectral_norm_upper(m);
    for (std::size_t c = 0; c < cols; ++c) CHECK(s >= norm2(m.column(c)));
  }
}

TEST_CASE("Rng is a pure function of its seed") {
  Rng a(RngSeed{9});
  Rng b(RngSeed{9});
  Rng c(RngSeed{10});
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    CHECK(x == b.normal());
    differs |= x != c.normal();
  }
  CHECK(differs);
  CHECK(RngSeed{5}.derive(1) == RngSeed{5}.derive(1));
  CHECK(!(RngSeed{5}.derive(1) == RngSeed{5}.derive(2)));
}

TEST_CASE("Rng uniform stays in range") {
  Rng rng(RngSeed{3});
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform(-2.0, 2.0);
    CHECK(u >= -2.0);
    CHECK(u < 2.0);
    CHECK(rng.below(7) < 7);
  }
}

TEST_CASE("ProblemParams validation") {
  ProblemParams ok;
  CHECK_NOTHROW(ok.validate());
  auto bad = ok;
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.eps1 = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.eps2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.delta = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = ok;
  bad.k = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
