#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "streamattn/features.hpp"
#include "streamattn/matrix.hpp"

namespace streamattn {

/// Largest n the exact oracle will materialize work for.
inline constexpr std::size_t kOracleMaxN = 4096;

struct OracleResult {
  DenseMatrix y;                     // D⁻¹AV
  std::vector<double> d_diag;        // A·1_n
  bool has_tilde = false;
  DenseMatrix y_tilde;               // D̃⁻¹ÃV
  std::vector<double> d_tilde_diag;  // Ã·1_n
};

/// Exact softmax attention with A = exp(QKᵀ/d) in float64. With a feature
/// config, also the low-rank counterpart Ã = U1U2ᵀ, evaluated as
/// D̃⁻¹U1(U2ᵀV) so Ã itself is not formed.
OracleResult exact_attention(const DenseMatrix& q, const DenseMatrix& k, const DenseMatrix& v,
                             const std::optional<FeatureConfig>& cfg = std::nullopt);

/// Rows of the feature map applied to every row of x (n×t).
DenseMatrix feature_matrix(const DenseMatrix& x, const FeatureConfig& cfg);

/// Ã = U1U2ᵀ materialized (n×n). Test scale.
DenseMatrix approx_attention_matrix(const DenseMatrix& q, const DenseMatrix& k,
                                    const FeatureConfig& cfg);

/// ŷ = D̃⁻¹U1·core, where core = (ΨU2)ᵀ(ΨV) comes from a finalized engine.
DenseMatrix sketched_output(const DenseMatrix& q, std::span<const double> d_tilde_diag,
                            const DenseMatrix& core, const FeatureConfig& cfg);

}  // namespace streamattn
