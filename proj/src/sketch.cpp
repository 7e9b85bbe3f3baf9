#include "streamattn/sketch.hpp"

#include <Eigen/Core>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace streamattn {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_index(std::size_t i, std::size_t n) {
  if (i >= n) {
    throw std::out_of_range("sketch column " + std::to_string(i) + " outside [0, " +
                            std::to_string(n) + ")");
  }
}

}  // namespace

AmsSketcher::AmsSketcher(std::size_t m2, std::size_t n, RngSeed seed)
    : n_(n), seed_(seed), scale_(1.0 / std::sqrt(static_cast<double>(m2))) {
  if (m2 == 0) throw std::invalid_argument("sketch needs at least one row");
  Rng rng(seed);
  hashes_.reserve(m2);
  for (std::size_t r = 0; r < m2; ++r) hashes_.emplace_back(rng);
}

void AmsSketcher::column(std::size_t i, std::span<double> out) const {
  check_index(i, n_);
  for (std::size_t r = 0; r < hashes_.size(); ++r) out[r] = hashes_[r].sign(i) * scale_;
}

GaussianSketcher::GaussianSketcher(std::size_t m2, std::size_t n, RngSeed seed)
    : m2_(m2), n_(n), seed_(seed), scale_(1.0 / std::sqrt(static_cast<double>(m2))) {
  if (m2 == 0) throw std::invalid_argument("sketch needs at least one row");
}

void GaussianSketcher::column(std::size_t i, std::span<double> out) const {
  check_index(i, n_);
  const std::uint64_t base = mix64(seed_.value ^ mix64(i));
  // Rows 2p and 2p+1 share one Box–Muller pair keyed by (seed, i, p).
  for (std::size_t r = 0; r < m2_; r += 2) {
    const std::uint64_t a = mix64(base + r);
    const std::uint64_t b = mix64(base + r + 1);
    const double u1 = static_cast<double>((a >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    out[r] = radius * std::cos(angle) * scale_;
    if (r + 1 < m2_) out[r + 1] = radius * std::sin(angle) * scale_;
  }
}

Sketcher make_sketcher(SketchKind kind, std::size_t m2, std::size_t n, RngSeed seed) {
  if (kind == SketchKind::Ams) return AmsSketcher(m2, n, seed);
  return GaussianSketcher(m2, n, seed);
}

std::size_t sketch_rows(const Sketcher& s) {
  return std::visit([](const auto& x) { return x.rows(); }, s);
}

std::size_t sketch_domain(const Sketcher& s) {
  return std::visit([](const auto& x) { return x.domain(); }, s);
}

std::size_t sketch_state_words(const Sketcher& s) {
  return std::visit([](const auto& x) { return x.state_words(); }, s);
}

void sketch_column(const Sketcher& s, std::size_t i, std::span<double> out) {
  if (out.size() != sketch_rows(s)) throw std::invalid_argument("sketch column length mismatch");
  std::visit([&](const auto& x) { x.column(i, out); }, s);
}

std::vector<double> sketch_column(const Sketcher& s, std::size_t i) {
  std::vector<double> out(sketch_rows(s));
  sketch_column(s, i, out);
  return out;
}

SketchAccumulator::SketchAccumulator(std::size_t m2, std::size_t width)
    : m2_(m2),
      width_(width),
      buffer_(m2 * width, 0.0),
      scratch_column_(m2, 0.0),
      staged_rows_(kStageRows * width, 0.0),
      staged_psi_(m2 * kStageRows, 0.0) {}

void SketchAccumulator::check_width(std::size_t len) const {
  if (len != width_) {
    throw std::invalid_argument("update row has width " + std::to_string(len) +
                                ", accumulator expects " + std::to_string(width_));
  }
}

void SketchAccumulator::accumulate_rank_one(const Sketcher& s, std::size_t i,
                                            std::span<const double> row) {
  check_width(row.size());
  if (sketch_rows(s) != m2_) throw std::invalid_argument("sketcher row count mismatch");
  sketch_column(s, i, scratch_column_);
  for (std::size_t r = 0; r < m2_; ++r) {
    const double coef = scratch_column_[r];
    double* dst = buffer_.data() + r * width_;
    for (std::size_t c = 0; c < width_; ++c) dst[c] += coef * row[c];
  }
}

void SketchAccumulator::stage(const Sketcher& s, std::size_t i, std::span<const double> row) {
  check_width(row.size());
  if (sketch_rows(s) != m2_) throw std::invalid_argument("sketcher row count mismatch");
  sketch_column(s, i, scratch_column_);  // validates i before anything is staged
  const std::size_t slot = staged_count_;
  std::copy(row.begin(), row.end(), staged_rows_.begin() + slot * width_);
  for (std::size_t r = 0; r < m2_; ++r) staged_psi_[r * kStageRows + slot] = scratch_column_[r];
  if (++staged_count_ == kStageRows) flush();
}

void SketchAccumulator::flush() {
  if (staged_count_ == 0) return;
  const auto b = static_cast<Eigen::Index>(staged_count_);
  Eigen::Map<RowMajor> acc(buffer_.data(), m2_, width_);
  Eigen::Map<const RowMajor, 0, Eigen::OuterStride<>> psi(
      staged_psi_.data(), m2_, b, Eigen::OuterStride<>(kStageRows));
  Eigen::Map<const RowMajor> rows(staged_rows_.data(), b, width_);
  acc.noalias() += psi * rows;
  staged_count_ = 0;
}

std::size_t jl_dim(double eps2, double delta, std::size_t union_count, double constant) {
  if (!(eps2 > 0.0 && eps2 <= 1.0)) throw std::invalid_argument("eps2 must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (union_count == 0) throw std::invalid_argument("union count must be >= 1");
  const double m = constant / (eps2 * eps2) * std::log(static_cast<double>(union_count) / delta);
  return static_cast<std::size_t>(std::ceil(m));
}

}  // namespace streamattn
