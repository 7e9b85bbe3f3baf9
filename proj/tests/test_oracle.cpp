#include <doctest.h>

#include <cmath>
#include <set>

#include "streamattn/generator.hpp"
#include "streamattn/oracle.hpp"
#include "streamattn/report.hpp"

using namespace streamattn;

namespace {

// Second, independently written evaluation of D⁻¹exp(QKᵀ/d)V.
DenseMatrix triple_loop_attention(const DenseMatrix& q, const DenseMatrix& k,
                                  const DenseMatrix& v) {
  const std::size_t n = q.rows(), d = q.cols();
  DenseMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += q(i, c) * k(j, c);
      a(i, j) = std::exp(s / d);
    }
  DenseMatrix y(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) denom += a(i, j);
    for (std::size_t c = 0; c < d; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += a(i, j) / denom * v(j, c);
      y(i, c) = acc;
    }
  }
  return y;
}

ProblemParams params(std::size_t n, std::size_t d, std::size_t k) {
  ProblemParams p;
  p.n = n;
  p.d = d;
  p.k = k;
  p.b = 1.0;
  p.eps1 = 0.5;
  p.eps2 = 0.1;
  p.delta = 0.01;
  return p;
}

}  // namespace

TEST_CASE("single key: y = V") {
  const DenseMatrix q(1, 3, {0.5, -0.2, 0.9});
  const DenseMatrix k(1, 3, {0.1, 0.4, -0.7});
  const DenseMatrix v(1, 3, {2.0, -1.0, 0.5});
  const auto res = exact_attention(q, k, v);
  for (std::size_t c = 0; c < 3; ++c) CHECK(res.y(0, c) == doctest::Approx(v(0, c)));
}

TEST_CASE("zero queries average V uniformly") {
  const auto inst = gen_instance(params(20, 3, 1), RngSeed{1}, Profile::Uniform);
  const auto res = exact_attention(DenseMatrix(20, 3), inst.k, inst.v);
  for (std::size_t c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (std::size_t l = 0; l < 20; ++l) mean += inst.v(l, c) / 20.0;
    for (std::size_t i = 0; i < 20; ++i) CHECK(res.y(i, c) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("oracle agrees with a direct triple loop") {
  const auto inst = gen_instance(params(8, 2, 1), RngSeed{2}, Profile::Uniform);
  const auto res = exact_attention(inst.q, inst.k, inst.v);
  const DenseMatrix ref = triple_loop_attention(inst.q, inst.k, inst.v);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t c = 0; c < 2; ++c) CHECK(std::abs(res.y(i, c) - ref(i, c)) <= 1e-12);
}

TEST_CASE("oracle invariants: denominators and row sums") {
  const auto p = params(64, 4, 4);
  const auto inst = gen_instance(p, RngSeed{3}, Profile::Uniform);
  const auto cfg = FeatureConfig::make(4, 4);
  const auto res = exact_attention(inst.q, inst.k, inst.v, cfg);
  REQUIRE(res.has_tilde);
  for (double dd : res.d_diag) CHECK(dd >= p.n * std::exp(-double(p.d) * p.b * p.b));
  for (double dd : res.d_tilde_diag) CHECK(dd > 0.0);
  // Row sums of D⁻¹A: attention on V = 1 column of ones gives exactly 1.
  const DenseMatrix ones(64, 4, std::vector<double>(256, 1.0));
  const auto unit = exact_attention(inst.q, inst.k, ones, cfg);
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(unit.y(i, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(unit.y_tilde(i, 0) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("y~ equals the materialized D~^-1 A~ V") {
  const auto p = params(30, 2, 2);
  const auto inst = gen_instance(p, RngSeed{4}, Profile::Spiky);
  const auto cfg = FeatureConfig::make(2, 4);
  const auto res = exact_attention(inst.q, inst.k, inst.v, cfg);
  const DenseMatrix a = approx_attention_matrix(inst.q, inst.k, cfg);
  for (std::size_t i = 0; i < p.n; ++i) {
    double denom = 0.0;
    for (std::size_t j = 0; j < p.n; ++j) denom += a(i, j);
    for (std::size_t c = 0; c < p.d; ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p.n; ++j) acc += a(i, j) * inst.v(j, c);
      CHECK(res.y_tilde(i, c) == doctest::Approx(acc / denom).epsilon(1e-10));
    }
  }
}

TEST_CASE("oracle guards") {
  CHECK_THROWS_AS(exact_attention(DenseMatrix(3, 2), DenseMatrix(3, 2), DenseMatrix(2, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(exact_attention(DenseMatrix(kOracleMaxN + 1, 1), DenseMatrix(kOracleMaxN + 1, 1),
                                  DenseMatrix(kOracleMaxN + 1, 1)),
                  std::invalid_argument);
}

TEST_CASE("generator respects the preconditions") {
  for (auto profile : {Profile::Uniform, Profile::Spiky}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      auto p = params(100, 4, 3);
      p.b = 0.7;
      const auto inst = gen_instance(p, RngSeed{s}, profile);
      CHECK(inst.q.max_abs() <= p.b);
      CHECK(inst.k.max_abs() <= p.b);
      CHECK(spectral_norm_upper(inst.v) <= (1.0 + 1e-6) / std::sqrt(100.0));
    }
  }
  CHECK(parse_profile("spiky") == Profile::Spiky);
  CHECK_THROWS_AS(parse_profile("bumpy"), std::invalid_argument);
}

TEST_CASE("generator is deterministic") {
  const auto p = params(50, 2, 2);
  const auto a = gen_instance(p, RngSeed{9}, Profile::Spiky);
  const auto b = gen_instance(p, RngSeed{9}, Profile::Spiky);
  CHECK(a.q == b.q);
  CHECK(a.k == b.k);
  CHECK(a.v == b.v);
}

TEST_CASE("spiky profile concentrates each output column on k rows") {
  const auto p = params(256, 4, 4);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto inst = gen_instance(p, RngSeed{s}, Profile::Spiky);
    const auto res = exact_attention(inst.q, inst.k, inst.v);
    for (std::size_t c = 0; c < p.d; ++c) {
      const auto y = res.y.column(c);
      CHECK(tail_k(y, p.k) / norm2(y) <= 0.2);
    }
  }
}

TEST_CASE("evaluate: exact output passes, zero output fails") {
  const auto p = params(64, 2, 64);
  const auto inst = gen_instance(p, RngSeed{5}, Profile::Uniform);
  const auto oracle = exact_attention(inst.q, inst.k, inst.v);
  const ErrorReport good = evaluate_dense(oracle.y, oracle, p);
  CHECK(good.all_pass);
  CHECK(good.max_ratio <= 1.0);

  // One dominant entry per column: tail_1 is tiny, so T = 0 misses by ~‖y‖.
  auto p1 = params(64, 2, 1);
  OracleResult big = oracle;
  big.y = DenseMatrix(64, 2);
  big.y(3, 0) = 50.0;
  big.y(7, 0) = 0.01;
  big.y(11, 1) = -40.0;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto col = big.y.column(c);
    REQUIRE(norm2(col) > (1.0 + p1.eps1) * tail_k(col, 1) + p1.eps2);
  }
  const ErrorReport bad = evaluate_dense(DenseMatrix(64, 2), big, p1);
  CHECK_FALSE(bad.all_pass);
  CHECK(bad.pass_rate == 0.0);
}

TEST_CASE("kernel gap stays within the propagated bound") {
  const auto p = params(128, 4, 4);
  const auto cfg = FeatureConfig::make(4, 4);
  const auto inst = gen_instance(p, RngSeed{6}, Profile::Uniform);
  const auto oracle = exact_attention(inst.q, inst.k, inst.v, cfg);
  const ErrorReport rep = evaluate_dense(oracle.y, oracle, p);
  for (std::size_t c = 0; c < p.d; ++c) {
    double vmax = 0.0;
    for (std::size_t l = 0; l < p.n; ++l) vmax = std::max(vmax, std::abs(inst.v(l, c)));
    REQUIRE(rep.columns[c].kernel_gap);
    CHECK(*rep.columns[c].kernel_gap <=
          kernel_gap_bound(p.b, p.n, kernel_error_bound(p.b, p.d, cfg.g), vmax));
  }
}

TEST_CASE("memory audit: arithmetic and n-invariance") {
  auto p = params(1024, 4, 16);
  p.eps2 = 0.5;
  p.delta = 0.1;
  const auto cfg = FeatureConfig::make(4, 6);
  EngineOptions opts;
  opts.m2 = 74;
  opts.recovery = recovery_dims(16, 0.5, 1024);
  {
    StreamEngine e(p, cfg, RngSeed{1}, opts);
    const MemoryReport rep = memory_audit(e);
    const auto find = [&](const std::string& name) {
      for (const auto& o : rep.objects)
        if (o.name == name) return o.numbers;
      return std::size_t{0};
    };
    CHECK(rep.m1 == 10240);
    CHECK(find("sk_dinv_u1") == 55920640);
    std::size_t sum = 0;
    for (const auto& o : rep.objects) sum += o.numbers;
    CHECK(rep.total_numbers == sum);
    CHECK(rep.total_bytes == 8 * sum);
    // Each object is a rows×cols block whose sides are derived sizes, never n.
    const std::size_t reps = opts.recovery->reps;
    const std::set<std::size_t> sides{rep.m1, rep.m2, rep.t, rep.d, reps,
                                      SketchAccumulator::kStageRows, 1, 2, 4, 6};
    for (const auto& o : rep.objects) {
      CAPTURE(o.name);
      CHECK(o.numbers == o.rows * o.cols);
      CHECK(sides.count(o.rows) == 1);
      CHECK(sides.count(o.cols) == 1);
    }
  }
  // Smaller t keeps this quick; pinned dims make the footprint n-free.
  const auto small_cfg = FeatureConfig::make(4, 2);
  std::vector<MemoryReport> reps;
  for (std::size_t n : {1024u, 4096u, 16384u}) {
    p.n = n;
    StreamEngine e(p, small_cfg, RngSeed{1}, opts);
    reps.push_back(memory_audit(e));
  }
  CHECK(reps[0].same_footprint(reps[1]));
  CHECK(reps[0].same_footprint(reps[2]));
}

TEST_CASE("identical seeds give identical report bytes") {
  const auto p = params(64, 2, 4);
  const auto cfg = FeatureConfig::make(2, 4);
  auto run = [&] {
    const auto inst = gen_instance(p, RngSeed{12}, Profile::Spiky);
    StreamEngine e(p, cfg, RngSeed{13});
    for (std::size_t i = 0; i < p.n; ++i) e.ingest_v_row(i, inst.v.row(i));
    for (std::size_t i = 0; i < p.n; ++i) e.ingest_k_row(i, inst.k.row(i));
    for (std::size_t i = 0; i < p.n; ++i) e.ingest_q_row(i, inst.q.row(i));
    const auto out = e.finalize();
    const auto oracle = exact_attention(inst.q, inst.k, inst.v, cfg);
    const DenseMatrix y_hat = sketched_output(inst.q, oracle.d_tilde_diag, out.core, cfg);
    return error_report_json(evaluate(out, oracle, p, &y_hat));
  };
  CHECK(run() == run());
}
