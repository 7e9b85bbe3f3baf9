#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "streamattn/hash.hpp"
#include "streamattn/matrix.hpp"

namespace streamattn {

/// AMS sign sketch Ψ ∈ R^{m2×n}: Ψ(r, i) = ±1/√m2 from the r-th 4-wise
/// independent hash. Only the m2 hash polynomials are stored.
class AmsSketcher {
 public:
  AmsSketcher(std::size_t m2, std::size_t n, RngSeed seed);

  std::size_t rows() const { return hashes_.size(); }
  std::size_t domain() const { return n_; }
  RngSeed seed() const { return seed_; }

  void column(std::size_t i, std::span<double> out) const;

  /// Stored words: four field coefficients per row.
  std::size_t state_words() const { return 4 * hashes_.size(); }

 private:
  std::size_t n_;
  RngSeed seed_;
  double scale_;
  std::vector<HashFamily4> hashes_;
};

/// Gaussian sketch with N(0, 1/m2) entries generated on demand from
/// (seed, column, row); never materialized.
class GaussianSketcher {
 public:
  GaussianSketcher(std::size_t m2, std::size_t n, RngSeed seed);

  std::size_t rows() const { return m2_; }
  std::size_t domain() const { return n_; }
  RngSeed seed() const { return seed_; }

  void column(std::size_t i, std::span<double> out) const;

  std::size_t state_words() const { return 1; }

 private:
  std::size_t m2_;
  std::size_t n_;
  RngSeed seed_;
  double scale_;
};

using Sketcher = std::variant<AmsSketcher, GaussianSketcher>;

enum class SketchKind { Ams, Gaussian };

Sketcher make_sketcher(SketchKind kind, std::size_t m2, std::size_t n, RngSeed seed);

std::size_t sketch_rows(const Sketcher& s);
std::size_t sketch_domain(const Sketcher& s);
std::size_t sketch_state_words(const Sketcher& s);

/// Column i of the implicit Ψ. Throws std::out_of_range for i ≥ n.
std::vector<double> sketch_column(const Sketcher& s, std::size_t i);
void sketch_column(const Sketcher& s, std::size_t i, std::span<double> out);

/// Running value of Ψ·R for a row matrix R delivered one row at a time.
///
/// accumulate_rank_one applies an update immediately. stage() defers up to
/// kStageRows updates and applies them together as one block product on
/// flush(); the result is the same sum up to floating-point reassociation.
class SketchAccumulator {
 public:
  static constexpr std::size_t kStageRows = 32;

  SketchAccumulator(std::size_t m2, std::size_t width);

  std::size_t rows() const { return m2_; }
  std::size_t width() const { return width_; }

  void accumulate_rank_one(const Sketcher& s, std::size_t i, std::span<const double> row);

  void stage(const Sketcher& s, std::size_t i, std::span<const double> row);
  void flush();
  std::size_t pending() const { return staged_count_; }

  /// m2×width, row-major. Call flush() first if rows are staged.
  std::span<const double> buffer() const { return buffer_; }

  std::size_t buffer_numbers() const { return buffer_.size(); }
  /// Staged rows (kStageRows×width), their Ψ columns (m2×kStageRows), and
  /// the single Ψ column used by accumulate_rank_one (m2).
  std::size_t staged_row_numbers() const { return staged_rows_.size(); }
  std::size_t staged_psi_numbers() const { return staged_psi_.size(); }
  std::size_t column_scratch_numbers() const { return scratch_column_.size(); }
  std::size_t staging_numbers() const {
    return staged_rows_.size() + staged_psi_.size() + scratch_column_.size();
  }

 private:
  void check_width(std::size_t len) const;

  std::size_t m2_;
  std::size_t width_;
  std::vector<double> buffer_;
  std::vector<double> scratch_column_;
  std::vector<double> staged_rows_;  // kStageRows × width
  std::vector<double> staged_psi_;   // m2 × kStageRows
  std::size_t staged_count_ = 0;
};

inline constexpr double kJlConstant = 8.0;

/// m2 = ceil(C · eps2⁻² · ln(union_count / delta)).
std::size_t jl_dim(double eps2, double delta, std::size_t union_count,
                   double constant = kJlConstant);

}  // namespace streamattn
