#include "streamattn/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace streamattn {

namespace {

void require_finite(std::span<const double> data, std::size_t cols) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      throw std::invalid_argument("non-finite matrix entry at (" +
                                  std::to_string(cols ? i / cols : 0) + ", " +
                                  std::to_string(cols ? i % cols : 0) + ")");
    }
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("matrix data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
  }
  require_finite(data_, cols_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> DenseMatrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix DenseMatrix::operator*(const DenseMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("matrix product shape mismatch");
  DenseMatrix out(rows_, rhs.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t p = 0; p < cols_; ++p) {
      const double a = (*this)(i, p);
      if (a == 0.0) continue;
      auto src = rhs.row(p);
      auto dst = out.row(i);
      for (std::size_t j = 0; j < rhs.cols_; ++j) dst[j] += a * src[j];
    }
  }
  return out;
}

DenseMatrix DenseMatrix::transpose() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

namespace {

// v <- MᵀM v, normalized; returns ‖M v_in‖.
double power_step(const DenseMatrix& m, std::vector<double>& v) {
  std::vector<double> mv(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) mv[r] = dot(m.row(r), v);
  const double gain = norm2(mv);
  std::vector<double> next(m.cols(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) next[c] += mv[r] * row[c];
  }
  const double len = norm2(next);
  if (len > 0.0) {
    for (double& x : next) x /= len;
    v = std::move(next);
  }
  return gain;
}

double power_estimate(const DenseMatrix& m, std::vector<double> v) {
  // At least 30 rounds, then continue until the gain settles; close top
  // singular values make the fixed 30-round estimate fall short of ‖M‖.
  double prev = 0.0;
  for (int it = 0; it < 5000; ++it) {
    const double gain = power_step(m, v);
    if (gain == 0.0) return 0.0;
    if (it >= 30 && std::abs(gain - prev) <= 1e-14 * gain) break;
    prev = gain;
  }
  std::vector<double> mv(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) mv[r] = dot(m.row(r), v);
  return norm2(mv);
}

}  // namespace

double spectral_norm_upper(const DenseMatrix& m) {
  if (m.empty()) return 0.0;
  double max_col = 0.0;
  std::size_t heaviest = 0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const double len = norm2(m.column(c));
    if (len > max_col) {
      max_col = len;
      heaviest = c;
    }
  }
  if (max_col == 0.0) return 0.0;

  std::vector<double> start(m.cols(), 1.0 / std::sqrt(static_cast<double>(m.cols())));
  double est = power_estimate(m, start);
  // The all-ones start can be orthogonal to every right singular vector with
  // nonzero value (e.g. [1, -1]); retry from the heaviest column's axis.
  if (est < max_col) {
    std::vector<double> axis(m.cols(), 0.0);
    axis[heaviest] = 1.0;
    est = std::max(est, power_estimate(m, std::move(axis)));
  }
  return std::max(est, max_col) * (1.0 + 1e-6);
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngSeed RngSeed::derive(std::uint64_t stream) const {
  return RngSeed{mix64(mix64(value) ^ mix64(stream + 0x632be59bd9b4e019ULL))};
}

Rng::Rng(RngSeed seed) : engine_(mix64(seed.value)) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Reject the partial top block so the modulo is unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

void ProblemParams::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(b >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("B must be finite and >= 0");
  if (!(eps1 > 0.0 && eps1 < 1.0)) throw std::invalid_argument("eps1 must lie in (0, 1)");
  if (!(eps2 > 0.0 && eps2 < 1.0)) throw std::invalid_argument("eps2 must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

}  // namespace streamattn
