#include "streamattn/features.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace streamattn {

std::size_t feature_width(std::size_t d, unsigned g) {
  constexpr std::size_t kMax = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  std::size_t block = 1;
  for (unsigned j = 0; j <= g; ++j) {
    if (total > kMax - block) throw std::invalid_argument("feature width overflows");
    total += block;
    if (j < g) {
      if (d != 0 && block > kMax / d) throw std::invalid_argument("feature width overflows");
      block *= d;
    }
  }
  return total;
}

FeatureConfig FeatureConfig::make(std::size_t d, unsigned g) {
  if (d == 0) throw std::invalid_argument("feature dimension d must be >= 1");
  if (g < 2 || g % 2 != 0) {
    throw std::invalid_argument("Taylor degree g must be even and >= 2, got " +
                                std::to_string(g));
  }
  return FeatureConfig{d, g, feature_width(d, g)};
}

void build_feature_row(std::span<const double> x, const FeatureConfig& cfg,
                       std::span<double> out) {
  if (x.size() != cfg.d) {
    throw std::invalid_argument("feature input has length " + std::to_string(x.size()) +
                                ", expected d = " + std::to_string(cfg.d));
  }
  if (out.size() != cfg.t) throw std::invalid_argument("feature output width mismatch");

  const double d = static_cast<double>(cfg.d);
  out[0] = 1.0;
  std::size_t prev_begin = 0;
  std::size_t prev_len = 1;
  std::size_t cursor = 1;
  for (unsigned j = 1; j <= cfg.g; ++j) {
    // block_j = kron(block_{j-1}, x) / sqrt(j·d)
    const double scale = 1.0 / std::sqrt(static_cast<double>(j) * d);
    for (std::size_t a = 0; a < prev_len; ++a) {
      const double base = out[prev_begin + a] * scale;
      for (std::size_t c = 0; c < cfg.d; ++c) out[cursor + a * cfg.d + c] = base * x[c];
    }
    prev_begin = cursor;
    cursor += prev_len * cfg.d;
    prev_len *= cfg.d;
  }
}

FeatureRow build_feature_row(std::span<const double> x, const FeatureConfig& cfg) {
  FeatureRow row(cfg.t);
  build_feature_row(x, cfg, row);
  return row;
}

double kernel_error_bound(double b, std::size_t /*d*/, unsigned g) {
  const double s = b * b;
  return std::exp((g + 1) * std::log(s) + s - std::lgamma(g + 2.0));
}

double taylor_exp(double s, unsigned g) {
  double term = 1.0;
  double sum = 1.0;
  for (unsigned j = 1; j <= g; ++j) {
    term *= s / j;
    sum += term;
  }
  return sum;
}

unsigned default_degree(double b) {
  if (b <= 1.0) return 6;
  if (b <= 2.0) return 8;
  throw std::invalid_argument("no default Taylor degree for B > 2; pass one explicitly");
}

}  // namespace streamattn
