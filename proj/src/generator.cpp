#include "streamattn/generator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace streamattn {

Profile parse_profile(const std::string& name) {
  if (name == "uniform") return Profile::Uniform;
  if (name == "spiky") return Profile::Spiky;
  throw std::invalid_argument("unknown profile '" + name + "' (expected uniform|spiky)");
}

std::string to_string(Profile p) { return p == Profile::Uniform ? "uniform" : "spiky"; }

DenseMatrix random_matrix(std::size_t rows, std::size_t cols, double scale, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (double& x : m.data()) x = rng.uniform(-scale, scale);
  return m;
}

namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

// Row c of a d×d ±1 matrix; orthogonal rows when d is a power of two.
std::vector<double> sign_direction(std::size_t c, std::size_t d, Rng& rng) {
  std::vector<double> h(d);
  if (std::has_single_bit(d)) {
    for (std::size_t j = 0; j < d; ++j) h[j] = (std::popcount(c & j) % 2) ? -1.0 : 1.0;
  } else {
    for (auto& x : h) x = (rng.next_u64() & 1) ? 1.0 : -1.0;
  }
  return h;
}

void rescale_to_spectral(DenseMatrix& v) {
  const double target = 1.0 / std::sqrt(static_cast<double>(v.rows()));
  const double norm = spectral_norm_upper(v);
  if (norm == 0.0) return;
  const double factor = target / norm;
  for (double& x : v.data()) x *= factor;
}

}  // namespace

Instance gen_instance(const ProblemParams& p, RngSeed seed, Profile profile) {
  p.validate();
  const std::size_t n = p.n;
  const std::size_t d = p.d;
  Rng rng(seed);
  Instance inst;
  if (profile == Profile::Uniform) {
    inst.q = random_matrix(n, d, p.b, rng);
    inst.k = random_matrix(n, d, p.b, rng);
    inst.v = DenseMatrix(n, d);
    for (double& x : inst.v.data()) x = rng.normal();
    rescale_to_spectral(inst.v);
    return inst;
  }

  inst.q = random_matrix(n, d, kSpikyBackground * p.b, rng);
  inst.k = random_matrix(n, d, p.b, rng);
  inst.v = DenseMatrix(n, d);

  std::vector<std::size_t> key_order(n);
  std::iota(key_order.begin(), key_order.end(), 0);
  shuffle(key_order, rng);
  std::vector<std::size_t> query_order(n);
  std::iota(query_order.begin(), query_order.end(), 0);
  shuffle(query_order, rng);

  const std::size_t group = std::max<std::size_t>(1, n / (4 * d));
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> dir = sign_direction(c, d, rng);
    for (double& x : dir) x *= p.b;

    std::vector<bool> in_group(n, false);
    std::size_t members = 0;
    for (std::size_t j = 0; j < group; ++j) {
      const std::size_t key = key_order[(c * group + j) % n];
      std::copy(dir.begin(), dir.end(), inst.k.row(key).begin());
      if (!in_group[key]) ++members;
      in_group[key] = true;
    }
    // Column c of V: +1 on the group, a constant offset elsewhere so the
    // column sums to zero and diffuse queries average it away.
    const double outside = members < n ? -static_cast<double>(members) / (n - members) : 0.0;
    for (std::size_t l = 0; l < n; ++l) inst.v(l, c) = in_group[l] ? 1.0 : outside;

    for (std::size_t j = 0; j < p.k; ++j) {
      const std::size_t query = query_order[(c * p.k + j) % n];
      std::copy(dir.begin(), dir.end(), inst.q.row(query).begin());
    }
  }
  rescale_to_spectral(inst.v);
  return inst;
}

}  // namespace streamattn
