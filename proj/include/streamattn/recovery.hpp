#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "streamattn/hash.hpp"
#include "streamattn/matrix.hpp"

namespace streamattn {

inline constexpr double kRepsConstant = 4.0;
inline constexpr double kWidthConstant = 8.0;

struct RecoveryDims {
  std::size_t reps = 0;
  std::size_t width = 0;
  std::size_t m1 = 0;

  friend bool operator==(const RecoveryDims&, const RecoveryDims&) = default;
};

/// reps = ceil(C_r·log2 n) (at least 1), width = ceil(C_w·k/eps1), m1 = reps·width.
RecoveryDims recovery_dims(std::size_t k, double eps1, std::size_t n,
                           double c_reps = kRepsConstant, double c_width = kWidthConstant);

/// z = Φx for one tracked vector, tagged with the sketch that produced it.
struct Measurement {
  std::uint64_t sketch_id = 0;
  std::vector<double> z;
};

struct SparseEntry {
  std::size_t index = 0;
  double value = 0.0;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sorted by strictly increasing index.
struct SparseColumn {
  std::vector<SparseEntry> entries;

  std::size_t nnz() const { return entries.size(); }
  std::vector<double> to_dense(std::size_t n) const;

  friend bool operator==(const SparseColumn&, const SparseColumn&) = default;
};

class SketchMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Count-sketch realization of the k-sparse recovery matrix Φ ∈ R^{m1×n}.
///
/// Each index lands in one bucket per repetition with a random sign, so a
/// column of Φ has exactly `reps` nonzeros. Decoding takes the median of the
/// signed bucket values across repetitions for every candidate index and
/// keeps the 2k largest in magnitude.
class RecoverySketch {
 public:
  RecoverySketch(std::size_t n, std::size_t k, double eps1, RngSeed seed,
                 double c_reps = kRepsConstant, double c_width = kWidthConstant);
  RecoverySketch(std::size_t n, std::size_t k, double eps1, RngSeed seed, RecoveryDims dims);

  std::size_t n() const { return n_; }
  std::size_t k() const { return k_; }
  double eps1() const { return eps1_; }
  const RecoveryDims& dims() const { return dims_; }
  std::size_t m1() const { return dims_.m1; }
  std::uint64_t id() const { return id_; }

  Measurement new_measurement() const;

  /// z += Φ e_i · delta; touches exactly `reps` cells.
  void encode_update(Measurement& z, std::size_t i, double delta) const;

  /// Cell offsets and signs of column i of Φ, one per repetition.
  void locate(std::size_t i, std::span<std::size_t> offsets, std::span<double> signs) const;

  SparseColumn decode_topk(const Measurement& z) const;

  /// Median-of-repetitions estimate for a single coordinate.
  double estimate(const Measurement& z, std::size_t i) const;

  /// Materialized Φ (m1×n); test scale only.
  DenseMatrix materialize() const;

  /// Hash coefficients stored: 2 per bucket hash, 4 per sign hash.
  std::size_t state_words() const { return 6 * dims_.reps; }

 private:
  void check_measurement(const Measurement& z) const;

  std::size_t n_;
  std::size_t k_;
  double eps1_;
  RecoveryDims dims_;
  std::uint64_t id_;
  std::vector<PairwiseHash> bucket_hashes_;
  std::vector<HashFamily4> sign_hashes_;
};

/// ℓ2 norm of x after zeroing its k largest-magnitude entries.
double tail_k(std::span<const double> x, std::size_t k);

}  // namespace streamattn
