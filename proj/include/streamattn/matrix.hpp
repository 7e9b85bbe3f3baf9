#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace streamattn {

/// Row-major real matrix. Every entry is finite; constructors reject NaN/Inf.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  std::vector<double> column(std::size_t c) const;

  /// Largest absolute entry (the max-norm); 0 for an empty matrix.
  double max_abs() const;

  DenseMatrix operator*(const DenseMatrix& rhs) const;
  DenseMatrix transpose() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Upper estimate of the spectral norm: power iteration on MᵀM from the
/// normalized all-ones vector (30 rounds minimum, then until the estimate
/// stops moving), scaled by (1 + 1e-6). Never below the largest column norm.
double spectral_norm_upper(const DenseMatrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

struct RngSeed {
  std::uint64_t value = 0;

  /// Independent child seed for a named sub-stream.
  RngSeed derive(std::uint64_t stream) const;

  friend bool operator==(const RngSeed&, const RngSeed&) = default;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seeded generator. Conversions to real values are done here rather than
/// through <random> distributions so outputs are identical across standard
/// library implementations.
class Rng {
 public:
  explicit Rng(RngSeed seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct ProblemParams {
  std::size_t n = 1;
  std::size_t d = 1;
  double b = 1.0;
  std::size_t k = 1;
  double eps1 = 0.5;
  double eps2 = 0.1;
  double delta = 0.01;

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
};

}  // namespace streamattn
