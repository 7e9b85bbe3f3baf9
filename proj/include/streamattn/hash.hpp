#pragma once

#include <array>
#include <cstdint>

#include "streamattn/matrix.hpp"

namespace streamattn {

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

inline std::uint64_t mod_mersenne61(unsigned __int128 x) {
  std::uint64_t lo = static_cast<std::uint64_t>(x & kMersenne61);
  std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
  std::uint64_t r = lo + hi;
  r = (r & kMersenne61) + (r >> 61);
  return r >= kMersenne61 ? r - kMersenne61 : r;
}

/// Random polynomial of degree Independence−1 over GF(2^61 − 1); the family
/// is Independence-wise independent on keys below the prime.
template <unsigned Independence>
class PolynomialHash {
 public:
  static_assert(Independence >= 2);

  PolynomialHash() = default;
  explicit PolynomialHash(Rng& rng) {
    for (auto& c : coeffs_) c = rng.below(kMersenne61);
  }

  std::uint64_t operator()(std::uint64_t key) const {
    const std::uint64_t x = key % kMersenne61;
    std::uint64_t acc = coeffs_[0];
    for (unsigned i = 1; i < Independence; ++i) {
      acc = mod_mersenne61(static_cast<unsigned __int128>(acc) * x + coeffs_[i]);
    }
    return acc;
  }

  /// ±1 from the low bit of the field value.
  int sign(std::uint64_t key) const { return ((*this)(key) & 1) ? 1 : -1; }

  std::uint64_t bucket(std::uint64_t key, std::uint64_t range) const {
    return (*this)(key) % range;
  }

  const std::array<std::uint64_t, Independence>& coeffs() const { return coeffs_; }

  friend bool operator==(const PolynomialHash&, const PolynomialHash&) = default;

 private:
  std::array<std::uint64_t, Independence> coeffs_{};
};

using PairwiseHash = PolynomialHash<2>;
using HashFamily4 = PolynomialHash<4>;

}  // namespace streamattn
