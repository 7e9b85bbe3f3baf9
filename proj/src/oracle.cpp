#include "streamattn/oracle.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace streamattn {

namespace {

void check_shapes(const DenseMatrix& q, const DenseMatrix& k, const DenseMatrix& v) {
  if (q.rows() != k.rows() || q.rows() != v.rows() || q.cols() != k.cols() ||
      q.cols() != v.cols() || q.rows() == 0 || q.cols() == 0) {
    throw std::invalid_argument("Q, K, V must share one non-empty n×d shape");
  }
  if (q.rows() > kOracleMaxN) {
    throw std::invalid_argument("oracle refuses n = " + std::to_string(q.rows()) +
                                " (limit " + std::to_string(kOracleMaxN) + ")");
  }
}

}  // namespace

DenseMatrix feature_matrix(const DenseMatrix& x, const FeatureConfig& cfg) {
  DenseMatrix u(x.rows(), cfg.t);
  for (std::size_t i = 0; i < x.rows(); ++i) build_feature_row(x.row(i), cfg, u.row(i));
  return u;
}

OracleResult exact_attention(const DenseMatrix& q, const DenseMatrix& k, const DenseMatrix& v,
                             const std::optional<FeatureConfig>& cfg) {
  check_shapes(q, k, v);
  const std::size_t n = q.rows();
  const std::size_t d = q.cols();
  const double inv_d = 1.0 / static_cast<double>(d);

  OracleResult res;
  res.y = DenseMatrix(n, d);
  res.d_diag.assign(n, 0.0);
  std::vector<double> weights(n);
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
      weights[l] = std::exp(dot(q.row(j), k.row(l)) * inv_d);
      sum += weights[l];
    }
    res.d_diag[j] = sum;
    auto out = res.y.row(j);
    for (std::size_t l = 0; l < n; ++l) {
      auto vl = v.row(l);
      for (std::size_t c = 0; c < d; ++c) out[c] += weights[l] * vl[c];
    }
    for (double& x : out) x /= sum;
  }

  if (cfg) {
    if (cfg->d != d) throw std::invalid_argument("feature config dimension differs from d");
    const DenseMatrix u1 = feature_matrix(q, *cfg);
    const DenseMatrix u2 = feature_matrix(k, *cfg);
    std::vector<double> u2_sum(cfg->t, 0.0);
    DenseMatrix u2t_v(cfg->t, d);
    for (std::size_t l = 0; l < n; ++l) {
      auto row = u2.row(l);
      auto vl = v.row(l);
      for (std::size_t c = 0; c < cfg->t; ++c) {
        u2_sum[c] += row[c];
        for (std::size_t j = 0; j < d; ++j) u2t_v(c, j) += row[c] * vl[j];
      }
    }
    res.has_tilde = true;
    res.d_tilde_diag.assign(n, 0.0);
    res.y_tilde = DenseMatrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      const double denom = dot(u1.row(i), u2_sum);
      if (!(denom > 0.0)) throw std::runtime_error("approximate denominator not positive");
      res.d_tilde_diag[i] = denom;
      for (std::size_t j = 0; j < d; ++j) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cfg->t; ++c) acc += u1(i, c) * u2t_v(c, j);
        res.y_tilde(i, j) = acc / denom;
      }
    }
  }
  return res;
}

DenseMatrix approx_attention_matrix(const DenseMatrix& q, const DenseMatrix& k,
                                    const FeatureConfig& cfg) {
  const DenseMatrix u1 = feature_matrix(q, cfg);
  const DenseMatrix u2 = feature_matrix(k, cfg);
  DenseMatrix a(q.rows(), k.rows());
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < k.rows(); ++j) a(i, j) = dot(u1.row(i), u2.row(j));
  return a;
}

DenseMatrix sketched_output(const DenseMatrix& q, std::span<const double> d_tilde_diag,
                            const DenseMatrix& core, const FeatureConfig& cfg) {
  if (core.rows() != cfg.t || d_tilde_diag.size() != q.rows()) {
    throw std::invalid_argument("sketched_output shape mismatch");
  }
  DenseMatrix out(q.rows(), core.cols());
  std::vector<double> u1(cfg.t);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    build_feature_row(q.row(i), cfg, u1);
    for (std::size_t j = 0; j < core.cols(); ++j) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cfg.t; ++c) acc += u1[c] * core(c, j);
      out(i, j) = acc / d_tilde_diag[i];
    }
  }
  return out;
}

}  // namespace streamattn
