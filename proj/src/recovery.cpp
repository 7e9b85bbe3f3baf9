#include "streamattn/recovery.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <numeric>
#include <string>

namespace streamattn {

RecoveryDims recovery_dims(std::size_t k, double eps1, std::size_t n, double c_reps,
                           double c_width) {
  if (k == 0) throw std::invalid_argument("sparsity k must be >= 1");
  if (!(eps1 > 0.0 && eps1 <= 1.0)) throw std::invalid_argument("eps1 must lie in (0, 1]");
  if (n == 0) throw std::invalid_argument("dimension n must be >= 1");
  RecoveryDims dims;
  dims.reps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(c_reps * std::log2(static_cast<double>(n)))));
  dims.width = static_cast<std::size_t>(std::ceil(c_width * static_cast<double>(k) / eps1));
  dims.m1 = dims.reps * dims.width;
  return dims;
}

std::vector<double> SparseColumn::to_dense(std::size_t n) const {
  std::vector<double> out(n, 0.0);
  for (const auto& e : entries) out.at(e.index) = e.value;
  return out;
}

RecoverySketch::RecoverySketch(std::size_t n, std::size_t k, double eps1, RngSeed seed,
                               double c_reps, double c_width)
    : RecoverySketch(n, k, eps1, seed, recovery_dims(k, eps1, n, c_reps, c_width)) {}

RecoverySketch::RecoverySketch(std::size_t n, std::size_t k, double eps1, RngSeed seed,
                               RecoveryDims dims)
    : n_(n), k_(k), eps1_(eps1), dims_(dims) {
  if (n == 0 || k == 0) throw std::invalid_argument("recovery sketch needs n, k >= 1");
  if (dims.reps == 0 || dims.width == 0 || dims.m1 != dims.reps * dims.width) {
    throw std::invalid_argument("inconsistent recovery dimensions");
  }
  Rng rng(seed);
  bucket_hashes_.reserve(dims.reps);
  sign_hashes_.reserve(dims.reps);
  for (std::size_t r = 0; r < dims.reps; ++r) {
    bucket_hashes_.emplace_back(rng);
    sign_hashes_.emplace_back(rng);
  }
  id_ = mix64(seed.value ^ mix64(dims.reps * 0x10001 + dims.width) ^ mix64(n));
}

Measurement RecoverySketch::new_measurement() const {
  return Measurement{id_, std::vector<double>(dims_.m1, 0.0)};
}

void RecoverySketch::check_measurement(const Measurement& z) const {
  if (z.sketch_id != id_ || z.z.size() != dims_.m1) {
    throw SketchMismatch("measurement was not produced by this recovery sketch");
  }
}

void RecoverySketch::locate(std::size_t i, std::span<std::size_t> offsets,
                            std::span<double> signs) const {
  if (i >= n_) {
    throw std::out_of_range("recovery index " + std::to_string(i) + " outside [0, " +
                            std::to_string(n_) + ")");
  }
  for (std::size_t r = 0; r < dims_.reps; ++r) {
    offsets[r] = r * dims_.width + bucket_hashes_[r].bucket(i, dims_.width);
    signs[r] = sign_hashes_[r].sign(i);
  }
}

void RecoverySketch::encode_update(Measurement& z, std::size_t i, double delta) const {
  check_measurement(z);
  if (i >= n_) {
    throw std::out_of_range("recovery index " + std::to_string(i) + " outside [0, " +
                            std::to_string(n_) + ")");
  }
  for (std::size_t r = 0; r < dims_.reps; ++r) {
    z.z[r * dims_.width + bucket_hashes_[r].bucket(i, dims_.width)] +=
        sign_hashes_[r].sign(i) * delta;
  }
}

namespace {

double median_in_place(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  // Equal middles return the shared value exactly.
  return lower == upper ? upper : 0.5 * (lower + upper);
}

}  // namespace

double RecoverySketch::estimate(const Measurement& z, std::size_t i) const {
  check_measurement(z);
  if (i >= n_) throw std::out_of_range("recovery index outside domain");
  std::vector<double> votes(dims_.reps);
  for (std::size_t r = 0; r < dims_.reps; ++r) {
    votes[r] = sign_hashes_[r].sign(i) * z.z[r * dims_.width + bucket_hashes_[r].bucket(i, dims_.width)];
  }
  return median_in_place(votes);
}

SparseColumn RecoverySketch::decode_topk(const Measurement& z) const {
  check_measurement(z);
  std::vector<SparseEntry> candidates;
  std::vector<double> votes(dims_.reps);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t r = 0; r < dims_.reps; ++r) {
      votes[r] = sign_hashes_[r].sign(i) *
                 z.z[r * dims_.width + bucket_hashes_[r].bucket(i, dims_.width)];
    }
    const double est = median_in_place(votes);
    if (est != 0.0) candidates.push_back({i, est});
  }
  const std::size_t keep = std::min(candidates.size(), 2 * k_);
  auto heavier = [](const SparseEntry& a, const SparseEntry& b) {
    const double ma = std::abs(a.value);
    const double mb = std::abs(b.value);
    return ma != mb ? ma > mb : a.index < b.index;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(), heavier);
  candidates.resize(keep);
  std::sort(candidates.begin(), candidates.end(),
            [](const SparseEntry& a, const SparseEntry& b) { return a.index < b.index; });
  return SparseColumn{std::move(candidates)};
}

DenseMatrix RecoverySketch::materialize() const {
  DenseMatrix phi(dims_.m1, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t r = 0; r < dims_.reps; ++r) {
      phi(r * dims_.width + bucket_hashes_[r].bucket(i, dims_.width), i) +=
          sign_hashes_[r].sign(i);
    }
  }
  return phi;
}

double tail_k(std::span<const double> x, std::size_t k) {
  std::vector<double> mags(x.size());
  std::transform(x.begin(), x.end(), mags.begin(), [](double v) { return std::abs(v); });
  if (k >= mags.size()) return 0.0;
  std::nth_element(mags.begin(), mags.begin() + static_cast<std::ptrdiff_t>(k), mags.end(),
                   std::greater<>());
  double sum = 0.0;
  for (std::size_t i = k; i < mags.size(); ++i) sum += mags[i] * mags[i];
  return std::sqrt(sum);
}

}  // namespace streamattn
