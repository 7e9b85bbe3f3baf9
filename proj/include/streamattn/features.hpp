#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace streamattn {

/// Truncated-Taylor feature map for the exponential kernel exp(qᵀk/d).
///
/// Block j of a feature row is x^{⊗j} / (√(j!)·d^{j/2}), j = 0..g, so that
/// ⟨φ(q), φ(k)⟩ = Σ_j (qᵀk/d)^j / j!. The same map produces rows of U1 (from
/// query rows) and U2 (from key rows). An even degree keeps the truncated
/// series strictly positive on the whole real line.
struct FeatureConfig {
  std::size_t d = 1;
  unsigned g = 2;
  std::size_t t = 3;

  /// Throws std::invalid_argument for d == 0, odd g, g < 2, or a width that
  /// overflows.
  static FeatureConfig make(std::size_t d, unsigned g);
};

/// Σ_{j=0..g} d^j.
std::size_t feature_width(std::size_t d, unsigned g);

using FeatureRow = std::vector<double>;

FeatureRow build_feature_row(std::span<const double> x, const FeatureConfig& cfg);

/// Allocation-free variant; `out` must have length cfg.t.
void build_feature_row(std::span<const double> x, const FeatureConfig& cfg,
                       std::span<double> out);

/// Lagrange remainder (B²)^{g+1}·e^{B²}/(g+1)! bounding each entry of A − Ã
/// when ‖q‖∞, ‖k‖∞ ≤ B (then |qᵀk/d| ≤ B²). Independent of d.
double kernel_error_bound(double b, std::size_t d, unsigned g);

/// Σ_{j=0..g} s^j / j!.
double taylor_exp(double s, unsigned g);

/// Degree used when none is given: 6 for B ≤ 1, 8 for B ≤ 2. Larger B has
/// no default (throws std::invalid_argument).
unsigned default_degree(double b);

}  // namespace streamattn
