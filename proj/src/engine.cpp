#include "streamattn/engine.hpp"

#include <Eigen/Core>
#include <cmath>

namespace streamattn {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

}  // namespace

std::string to_string(Phase p) {
  switch (p) {
    case Phase::AwaitV: return "AwaitV";
    case Phase::AwaitK: return "AwaitK";
    case Phase::AwaitQ: return "AwaitQ";
    case Phase::AwaitX2: return "AwaitX2";
    case Phase::AwaitX1: return "AwaitX1";
    case Phase::Finalized: return "Finalized";
  }
  return "?";
}

void CrossWeights::validate(std::size_t d) const {
  for (const DenseMatrix* w : {&w_q, &w_k, &w_v}) {
    if (w->rows() != d || w->cols() != d) {
      throw std::invalid_argument("cross weights must be " + std::to_string(d) + "x" +
                                  std::to_string(d));
    }
  }
}

EngineDims derive_dims(const ProblemParams& p, const FeatureConfig& cfg,
                       const EngineOptions& opts) {
  p.validate();
  if (cfg.d != p.d) throw std::invalid_argument("feature config dimension differs from d");
  EngineDims dims;
  dims.n = p.n;
  dims.d = p.d;
  dims.t = cfg.t;
  const std::size_t unions = opts.union_count ? opts.union_count : p.n * p.d;
  dims.m2 = opts.m2 ? *opts.m2 : jl_dim(p.eps2, p.delta, unions, opts.jl_constant);
  dims.recovery = opts.recovery
                      ? *opts.recovery
                      : recovery_dims(p.k, p.eps1, p.n, opts.reps_constant, opts.width_constant);
  return dims;
}

DenseMatrix AttentionOutput::to_dense() const {
  DenseMatrix out(n, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (const auto& e : columns[c].entries) out(e.index, c) = e.value;
  return out;
}

void project_row(std::span<const double> row, const DenseMatrix& w, std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t j = 0; j < row.size(); ++j) {
    auto wr = w.row(j);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += row[j] * wr[c];
  }
}

StreamEngine::StreamEngine(const ProblemParams& p, const FeatureConfig& cfg, RngSeed seed,
                           EngineOptions opts)
    : params_(p),
      cfg_(cfg),
      dims_(derive_dims(p, cfg, opts)),
      psi_(make_sketcher(opts.sketch, dims_.m2, p.n, seed.derive(1))),
      phi_(p.n, p.k, p.eps1, seed.derive(2), dims_.recovery),
      phase_(Phase::AwaitV),
      sk_u2_(dims_.m2, cfg.t),
      sk_v_(dims_.m2, p.d),
      sk_dinv_u1_(dims_.recovery.m1 * cfg.t, 0.0),
      prod_u2_(cfg.t, 0.0),
      feature_scratch_(cfg.t, 0.0),
      cell_offsets_(dims_.recovery.reps, 0),
      cell_signs_(dims_.recovery.reps, 0.0) {}

StreamEngine::StreamEngine(const ProblemParams& p, const FeatureConfig& cfg, RngSeed seed,
                           CrossWeights weights, EngineOptions opts)
    : StreamEngine(p, cfg, seed, opts) {
  weights.validate(p.d);
  weights_ = std::move(weights);
  phase_ = Phase::AwaitX2;
  proj_scratch_.assign(p.d, 0.0);
  proj_scratch2_.assign(p.d, 0.0);
}

void StreamEngine::expect(Phase want, std::size_t i, std::size_t len, const char* op) const {
  if (phase_ != want) {
    throw PhaseError(std::string(op) + " called in phase " + to_string(phase_) +
                     ", expected " + to_string(want));
  }
  if (i != counter_) {
    throw PhaseError(std::string(op) + ": row " + std::to_string(i) +
                     " out of order, expected row " + std::to_string(counter_));
  }
  if (len != params_.d) {
    throw std::invalid_argument(std::string(op) + ": row has length " + std::to_string(len) +
                                ", expected d = " + std::to_string(params_.d));
  }
}

void StreamEngine::advance() {
  if (++counter_ < params_.n) return;
  counter_ = 0;
  switch (phase_) {
    case Phase::AwaitV:
      sk_v_.flush();
      phase_ = Phase::AwaitK;
      break;
    case Phase::AwaitK:
      sk_u2_.flush();
      phase_ = Phase::AwaitQ;
      break;
    case Phase::AwaitX2:
      sk_v_.flush();
      sk_u2_.flush();
      phase_ = Phase::AwaitX1;
      break;
    default:
      // Q / X1 phase complete: remain until finalize() is called.
      counter_ = params_.n;
      break;
  }
}

void StreamEngine::absorb_v(std::size_t i, std::span<const double> v_row) {
  sk_v_.stage(psi_, i, v_row);
}

void StreamEngine::absorb_k(std::size_t i, std::span<const double> k_row) {
  build_feature_row(k_row, cfg_, feature_scratch_);
  for (std::size_t c = 0; c < cfg_.t; ++c) prod_u2_[c] += feature_scratch_[c];
  sk_u2_.stage(psi_, i, feature_scratch_);
}

void StreamEngine::absorb_q(std::size_t i, std::span<const double> q_row) {
  build_feature_row(q_row, cfg_, feature_scratch_);
  const double d_tilde = dot(feature_scratch_, prod_u2_);
  if (!(d_tilde > 0.0)) {
    throw PositivityError("kernel positivity violated at row " + std::to_string(i) +
                          " (D~ = " + std::to_string(d_tilde) + ") - increase degree g");
  }
  phi_.locate(i, cell_offsets_, cell_signs_);
  const std::size_t m1 = dims_.recovery.m1;
  const std::size_t reps = dims_.recovery.reps;
  const double inv = 1.0 / d_tilde;
  for (std::size_t c = 0; c < cfg_.t; ++c) {
    const double value = feature_scratch_[c] * inv;
    double* column = sk_dinv_u1_.data() + c * m1;
    for (std::size_t r = 0; r < reps; ++r) column[cell_offsets_[r]] += cell_signs_[r] * value;
  }
}

void StreamEngine::ingest_v_row(std::size_t i, std::span<const double> v_row) {
  expect(Phase::AwaitV, i, v_row.size(), "ingest_v_row");
  absorb_v(i, v_row);
  advance();
}

void StreamEngine::ingest_k_row(std::size_t i, std::span<const double> k_row) {
  expect(Phase::AwaitK, i, k_row.size(), "ingest_k_row");
  absorb_k(i, k_row);
  advance();
}

void StreamEngine::ingest_q_row(std::size_t i, std::span<const double> q_row) {
  if (phase_ == Phase::AwaitQ && counter_ == params_.n) {
    throw PhaseError("ingest_q_row: all " + std::to_string(params_.n) + " rows already read");
  }
  expect(Phase::AwaitQ, i, q_row.size(), "ingest_q_row");
  absorb_q(i, q_row);
  advance();
}

void StreamEngine::ingest_x2_row(std::size_t i, std::span<const double> x2_row) {
  expect(Phase::AwaitX2, i, x2_row.size(), "ingest_x2_row");
  project_row(x2_row, weights_->w_k, proj_scratch_);
  project_row(x2_row, weights_->w_v, proj_scratch2_);
  absorb_k(i, proj_scratch_);
  absorb_v(i, proj_scratch2_);
  advance();
}

void StreamEngine::ingest_x1_row(std::size_t i, std::span<const double> x1_row) {
  if (phase_ == Phase::AwaitX1 && counter_ == params_.n) {
    throw PhaseError("ingest_x1_row: all " + std::to_string(params_.n) + " rows already read");
  }
  expect(Phase::AwaitX1, i, x1_row.size(), "ingest_x1_row");
  project_row(x1_row, weights_->w_q, proj_scratch_);
  absorb_q(i, proj_scratch_);
  advance();
}

Measurement StreamEngine::dinv_u1_measurement(std::size_t c) const {
  if (c >= cfg_.t) throw std::out_of_range("feature column outside [0, t)");
  const std::size_t m1 = dims_.recovery.m1;
  auto begin = sk_dinv_u1_.begin() + static_cast<std::ptrdiff_t>(c * m1);
  return Measurement{phi_.id(), std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(m1))};
}

AttentionOutput StreamEngine::finalize() {
  if (phase_ == Phase::Finalized) throw PhaseError("finalize called twice");
  const Phase last = cross_mode() ? Phase::AwaitX1 : Phase::AwaitQ;
  if (phase_ != last || counter_ != params_.n) {
    throw PhaseError("finalize called in phase " + to_string(phase_) + " after " +
                     std::to_string(counter_) + " rows; the query stream is incomplete");
  }

  const std::size_t m1 = dims_.recovery.m1;
  const std::size_t m2 = dims_.m2;
  const std::size_t t = cfg_.t;
  const std::size_t d = params_.d;

  // Z = sk(D̃⁻¹U1) · (sk(U2)ᵀ · sk(V)); the t×d core is formed first.
  Eigen::Map<const RowMajor> sku2(sk_u2_.buffer().data(), m2, t);
  Eigen::Map<const RowMajor> skv(sk_v_.buffer().data(), m2, d);
  RowMajor core = sku2.transpose() * skv;
  Eigen::Map<const ColMajor> bank(sk_dinv_u1_.data(), m1, t);
  ColMajor z = bank * core;

  AttentionOutput out;
  out.n = params_.n;
  out.core = DenseMatrix(t, d, std::vector<double>(core.data(), core.data() + t * d));
  out.columns.reserve(d);
  out.diagnostics.reserve(d);
  for (std::size_t c = 0; c < d; ++c) {
    Measurement col{phi_.id(), std::vector<double>(z.col(c).data(), z.col(c).data() + m1)};
    out.columns.push_back(phi_.decode_topk(col));
    out.diagnostics.push_back({norm2(col.z), out.columns.back().nnz()});
  }
  phase_ = Phase::Finalized;
  return out;
}

}  // namespace streamattn
