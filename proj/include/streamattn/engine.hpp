#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "streamattn/features.hpp"
#include "streamattn/matrix.hpp"
#include "streamattn/recovery.hpp"
#include "streamattn/sketch.hpp"

namespace streamattn {

enum class Phase { AwaitV, AwaitK, AwaitQ, AwaitX2, AwaitX1, Finalized };

std::string to_string(Phase p);

class PhaseError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when an approximate softmax denominator is not strictly positive.
class PositivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Query/key/value projections applied to streamed X1 and X2 rows.
struct CrossWeights {
  DenseMatrix w_q;
  DenseMatrix w_k;
  DenseMatrix w_v;

  void validate(std::size_t d) const;
};

struct EngineOptions {
  SketchKind sketch = SketchKind::Ams;
  double jl_constant = kJlConstant;
  double reps_constant = kRepsConstant;
  double width_constant = kWidthConstant;
  /// Union-bound count inside jl_dim; 0 means n·d.
  std::size_t union_count = 0;
  /// Pin the derived sketch sizes instead of computing them from n.
  std::optional<std::size_t> m2;
  std::optional<RecoveryDims> recovery;
};

struct EngineDims {
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t t = 0;
  std::size_t m2 = 0;
  RecoveryDims recovery;
};

EngineDims derive_dims(const ProblemParams& p, const FeatureConfig& cfg,
                       const EngineOptions& opts = {});

struct ColumnDiagnostics {
  double measurement_norm = 0.0;
  std::size_t nnz = 0;
};

struct AttentionOutput {
  std::size_t n = 0;
  std::vector<SparseColumn> columns;
  std::vector<ColumnDiagnostics> diagnostics;
  /// sk(U2)ᵀ·sk(V) ∈ R^{t×d}; with the row-wise D̃⁻¹U1 it gives ŷ = D̃⁻¹U1·core.
  DenseMatrix core;

  DenseMatrix to_dense() const;
};

/// One-pass streaming approximation of softmax attention.
///
/// Plain mode reads V, then K, then Q, each exactly once and in row order.
/// Cross mode reads X2 (producing K and V rows through W_K, W_V) and then X1
/// (producing Q rows through W_Q). Nothing held by the engine grows with n:
/// the state is sk(U2) = ΨU2, sk(V) = ΨV, the bank ΦD̃⁻¹U1 (one measurement
/// per feature column), the running U2ᵀ1_n, and hash seeds.
class StreamEngine {
 public:
  StreamEngine(const ProblemParams& p, const FeatureConfig& cfg, RngSeed seed,
               EngineOptions opts = {});
  StreamEngine(const ProblemParams& p, const FeatureConfig& cfg, RngSeed seed,
               CrossWeights weights, EngineOptions opts = {});

  void ingest_v_row(std::size_t i, std::span<const double> v_row);
  void ingest_k_row(std::size_t i, std::span<const double> k_row);
  void ingest_q_row(std::size_t i, std::span<const double> q_row);
  void ingest_x2_row(std::size_t i, std::span<const double> x2_row);
  void ingest_x1_row(std::size_t i, std::span<const double> x1_row);

  AttentionOutput finalize();

  Phase phase() const { return phase_; }
  bool cross_mode() const { return weights_.has_value(); }
  std::size_t rows_seen() const { return counter_; }
  const EngineDims& dims() const { return dims_; }
  const FeatureConfig& features() const { return cfg_; }
  const Sketcher& psi() const { return psi_; }
  const RecoverySketch& phi() const { return phi_; }
  const std::optional<CrossWeights>& weights() const { return weights_; }

  /// ΨV and ΨU2 (m2×d and m2×t, row-major). Complete once their phase ends.
  std::span<const double> sk_v() const { return sk_v_.buffer(); }
  std::span<const double> sk_u2() const { return sk_u2_.buffer(); }
  const SketchAccumulator& sk_v_accumulator() const { return sk_v_; }
  const SketchAccumulator& sk_u2_accumulator() const { return sk_u2_; }
  /// Column c of ΦD̃⁻¹U1 lives at [c·m1, (c+1)·m1).
  std::span<const double> sk_dinv_u1() const { return sk_dinv_u1_; }
  Measurement dinv_u1_measurement(std::size_t c) const;
  std::span<const double> prod_u2() const { return prod_u2_; }

  /// Per-row scratch: the feature row (t), the two projected rows (d each,
  /// cross mode), and the Φ cell offsets and signs (reps each).
  std::size_t feature_scratch_numbers() const { return feature_scratch_.size(); }
  std::size_t projection_scratch_numbers() const {
    return proj_scratch_.size() + proj_scratch2_.size();
  }
  std::size_t cell_scratch_numbers() const { return cell_offsets_.size() + cell_signs_.size(); }
  std::size_t scratch_numbers() const {
    return feature_scratch_numbers() + projection_scratch_numbers() + cell_scratch_numbers();
  }

 private:
  void expect(Phase want, std::size_t i, std::size_t len, const char* op) const;
  void advance();
  void absorb_v(std::size_t i, std::span<const double> v_row);
  void absorb_k(std::size_t i, std::span<const double> k_row);
  void absorb_q(std::size_t i, std::span<const double> q_row);

  ProblemParams params_;
  FeatureConfig cfg_;
  EngineDims dims_;
  Sketcher psi_;
  RecoverySketch phi_;
  std::optional<CrossWeights> weights_;

  Phase phase_;
  std::size_t counter_ = 0;

  SketchAccumulator sk_u2_;
  SketchAccumulator sk_v_;
  std::vector<double> sk_dinv_u1_;
  std::vector<double> prod_u2_;

  std::vector<double> feature_scratch_;
  std::vector<double> proj_scratch_;
  std::vector<double> proj_scratch2_;
  std::vector<std::size_t> cell_offsets_;
  std::vector<double> cell_signs_;
};

/// row · W for a 1×d row and d×d W.
void project_row(std::span<const double> row, const DenseMatrix& w, std::span<double> out);

}  // namespace streamattn
