// streamattn: generate instances, stream them through the engine, check the
// result against the exact oracle, and audit engine memory across n.
//
// Exit codes: 0 all hard invariants hold, 1 a hard invariant failed,
// 2 bad input (unreadable files, inconsistent shapes, invalid parameters).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "streamattn/engine.hpp"
#include "streamattn/features.hpp"
#include "streamattn/frames.hpp"
#include "streamattn/generator.hpp"
#include "streamattn/matf.hpp"
#include "streamattn/matrix.hpp"
#include "streamattn/oracle.hpp"
#include "streamattn/recovery.hpp"
#include "streamattn/report.hpp"
#include "streamattn/sketch.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace streamattn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvariant = 1;
constexpr int kExitInput = 2;

// Thrown for anything the user can fix: paths, shapes, parameter ranges.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SketchKind parse_sketch(const std::string& name) {
  if (name == "ams") return SketchKind::Ams;
  if (name == "gaussian") return SketchKind::Gaussian;
  throw InputError("unknown sketch '" + name + "' (expected ams or gaussian)");
}

std::string sketch_name(SketchKind kind) { return kind == SketchKind::Ams ? "ams" : "gaussian"; }

double max_abs_both(const DenseMatrix& a, const DenseMatrix& b) {
  return std::max(a.max_abs(), b.max_abs());
}

void require_shape(const DenseMatrix& m, std::size_t rows, std::size_t cols,
                   const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw InputError(what + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw InputError("write failed: " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// gen

struct GenArgs {
  ProblemParams p;
  std::string profile = "spiky";
  std::uint64_t seed = 1;
  std::string out_dir = ".";
};

int cmd_gen(const GenArgs& a) {
  a.p.validate();
  const Instance inst = gen_instance(a.p, RngSeed{a.seed}, parse_profile(a.profile));
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  mat_store(inst.q, dir / "Q.matf");
  mat_store(inst.k, dir / "K.matf");
  mat_store(inst.v, dir / "V.matf");
  std::cout << "wrote " << (dir / "Q.matf").string() << ", K.matf, V.matf (n=" << a.p.n
            << ", d=" << a.p.d << ", profile " << a.profile << ", seed " << a.seed << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run / run-cross

struct RunArgs {
  // plain mode
  std::string q, k_mat, v;
  // cross mode
  std::string x1, x2, wq, wk, wv;

  std::size_t k_sparse = 16;
  double eps1 = 0.5;
  double eps2 = 0.1;
  double delta = 0.01;
  double b = 0.0;  // 0: take max |entry| of Q and K
  unsigned degree = 0;  // 0: default_degree(B)
  std::string sketch = "ams";
  std::uint64_t seed = 1;
  std::string out = "run";
};

std::string sparse_text(const AttentionOutput& out) {
  std::ostringstream os;
  char buf[64];
  for (std::size_t c = 0; c < out.columns.size(); ++c) {
    for (const SparseEntry& e : out.columns[c].entries) {
      std::snprintf(buf, sizeof buf, "%.17g", e.value);
      os << c << ',' << e.index << ',' << buf << '\n';
    }
  }
  return os.str();
}

int cmd_run(const RunArgs& a, bool cross) {
  DenseMatrix q_eff, k_eff, v_eff;  // the Q, K, V the engine effectively sees
  DenseMatrix x1, x2;
  std::optional<CrossWeights> weights;
  json inputs;

  if (cross) {
    x1 = mat_load(a.x1);
    x2 = mat_load(a.x2);
    if (x1.rows() != x2.rows() || x1.cols() != x2.cols()) {
      throw InputError("X1 and X2 must have the same shape");
    }
    const std::size_t d = x1.cols();
    CrossWeights w{mat_load(a.wq), mat_load(a.wk), mat_load(a.wv)};
    require_shape(w.w_q, d, d, "W_Q");
    require_shape(w.w_k, d, d, "W_K");
    require_shape(w.w_v, d, d, "W_V");
    q_eff = x1 * w.w_q;
    k_eff = x2 * w.w_k;
    v_eff = x2 * w.w_v;
    weights = std::move(w);
    inputs = {{"x1", absolute(a.x1)}, {"x2", absolute(a.x2)}, {"wq", absolute(a.wq)},
              {"wk", absolute(a.wk)}, {"wv", absolute(a.wv)}};
  } else {
    q_eff = mat_load(a.q);
    k_eff = mat_load(a.k_mat);
    v_eff = mat_load(a.v);
    require_shape(k_eff, q_eff.rows(), q_eff.cols(), "K");
    require_shape(v_eff, q_eff.rows(), q_eff.cols(), "V");
    inputs = {{"q", absolute(a.q)}, {"k", absolute(a.k_mat)}, {"v", absolute(a.v)}};
  }

  ProblemParams p;
  p.n = q_eff.rows();
  p.d = q_eff.cols();
  p.k = a.k_sparse;
  p.eps1 = a.eps1;
  p.eps2 = a.eps2;
  p.delta = a.delta;
  const double observed_b = max_abs_both(q_eff, k_eff);
  p.b = a.b > 0.0 ? a.b : std::max(observed_b, 1e-12);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (observed_b > p.b) {
    throw InputError("max |entry| of Q and K is " + std::to_string(observed_b) +
                     ", above --b " + std::to_string(p.b));
  }
  const unsigned degree = a.degree != 0 ? a.degree : default_degree(p.b);
  const FeatureConfig cfg = FeatureConfig::make(p.d, degree);

  json warnings = json::array();
  const double v_norm = spectral_norm_upper(v_eff);
  const double v_cap = 1.0 / std::sqrt(static_cast<double>(p.n));
  if (v_norm > v_cap * (1.0 + 1e-6)) {
    const std::string msg = "spectral norm of V (" + std::to_string(v_norm) +
                            ") exceeds 1/sqrt(n) = " + std::to_string(v_cap) +
                            "; the error guarantee assumes ||V|| <= 1/sqrt(n)";
    std::cerr << "warning: " << msg << '\n';
    warnings.push_back(msg);
  }

  EngineOptions opts;
  opts.sketch = parse_sketch(a.sketch);
  std::optional<StreamEngine> engine;
  if (cross) {
    engine.emplace(p, cfg, RngSeed{a.seed}, *weights, opts);
  } else {
    engine.emplace(p, cfg, RngSeed{a.seed}, opts);
  }

  // Rows travel through the wire framing, exactly as an external producer
  // would deliver them.
  std::stringstream wire(std::ios::in | std::ios::out | std::ios::binary);
  if (cross) {
    write_cross_stream(wire, x1, x2);
  } else {
    write_plain_stream(wire, q_eff, k_eff, v_eff);
  }
  const std::size_t frames = feed_stream(*engine, wire);
  const MemoryReport memory = memory_audit(*engine);
  const AttentionOutput out = engine->finalize();

  bool ok = true;
  json columns = json::array();
  for (std::size_t c = 0; c < out.columns.size(); ++c) {
    const std::size_t nnz = out.columns[c].entries.size();
    bool finite = true;
    for (const SparseEntry& e : out.columns[c].entries) finite = finite && std::isfinite(e.value);
    const bool sparse_ok = nnz <= 2 * p.k;
    if (!sparse_ok) std::cerr << "invariant: column " << c << " has nnz " << nnz << " > 2k\n";
    if (!finite) std::cerr << "invariant: column " << c << " has a non-finite entry\n";
    ok = ok && sparse_ok && finite;
    columns.push_back({{"column", c},
                       {"nnz", nnz},
                       {"measurement_norm", out.diagnostics[c].measurement_norm}});
  }

  const fs::path dir(a.out);
  fs::create_directories(dir);
  write_text(dir / "T.txt", sparse_text(out));
  mat_store(out.core, dir / "core.matf");

  const EngineDims& dims = engine->dims();
  json report;
  report["mode"] = cross ? "cross" : "plain";
  report["inputs"] = inputs;
  report["params"] = {{"n", p.n},         {"d", p.d},         {"b", p.b},
                      {"k", p.k},         {"eps1", p.eps1},   {"eps2", p.eps2},
                      {"delta", p.delta}, {"degree", degree}, {"sketch", a.sketch},
                      {"seed", a.seed}};
  report["dims"] = {{"t", dims.t},
                    {"m2", dims.m2},
                    {"m1", dims.recovery.m1},
                    {"reps", dims.recovery.reps},
                    {"width", dims.recovery.width}};
  report["frames"] = frames;
  report["v_spectral_norm_upper"] = v_norm;
  report["v_norm_cap"] = v_cap;
  report["outputs"] = {{"t", absolute((dir / "T.txt").string())},
                       {"core", absolute((dir / "core.matf").string())}};
  report["columns"] = columns;
  report["memory"] = json::parse(memory_report_json(memory));
  report["warnings"] = warnings;
  report["invariants_ok"] = ok;
  write_text(dir / "report.json", report.dump(2) + "\n");

  std::cout << (cross ? "run-cross" : "run") << ": n=" << p.n << " d=" << p.d << " t=" << dims.t
            << " m2=" << dims.m2 << " m1=" << dims.recovery.m1 << " frames=" << frames << '\n';
  for (const auto& col : columns) {
    std::cout << "  column " << col["column"] << ": nnz " << col["nnz"] << '\n';
  }
  std::cout << "state numbers " << memory.state_numbers << ", total bytes " << memory.total_bytes
            << '\n'
            << "wrote " << (dir / "report.json").string() << '\n';
  return ok ? kExitOk : kExitInvariant;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string run_report;
  std::string oracle_mode = "full";
  std::string out;
  bool strict = false;
};

DenseMatrix read_sparse_text(const fs::path& path, std::size_t n, std::size_t d,
                             std::vector<std::size_t>& nnz) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path.string());
  DenseMatrix t(n, d);
  nnz.assign(d, 0);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t c = 0, i = 0;
    double value = 0.0;
    char comma1 = 0, comma2 = 0;
    std::istringstream ls(line);
    if (!(ls >> c >> comma1 >> i >> comma2 >> value) || comma1 != ',' || comma2 != ',') {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": malformed line");
    }
    if (c >= d || i >= n) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": index out of range");
    }
    t(i, c) = value;
    ++nnz[c];
  }
  return t;
}

int cmd_verify(const VerifyArgs& a) {
  if (a.oracle_mode != "exact" && a.oracle_mode != "full") {
    throw InputError("--oracle-mode must be exact or full");
  }
  const fs::path report_path(a.run_report);
  const json run = read_json(report_path);

  DenseMatrix q, k, v;
  try {
    const json& in = run.at("inputs");
    if (run.at("mode") == "cross") {
      const DenseMatrix x1 = mat_load(in.at("x1").get<std::string>());
      const DenseMatrix x2 = mat_load(in.at("x2").get<std::string>());
      q = x1 * mat_load(in.at("wq").get<std::string>());
      k = x2 * mat_load(in.at("wk").get<std::string>());
      v = x2 * mat_load(in.at("wv").get<std::string>());
    } else {
      q = mat_load(in.at("q").get<std::string>());
      k = mat_load(in.at("k").get<std::string>());
      v = mat_load(in.at("v").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw InputError("run report is missing inputs: " + std::string(e.what()));
  }

  const json& jp = run.at("params");
  ProblemParams p;
  p.n = q.rows();
  p.d = q.cols();
  p.b = jp.at("b").get<double>();
  p.k = jp.at("k").get<std::size_t>();
  p.eps1 = jp.at("eps1").get<double>();
  p.eps2 = jp.at("eps2").get<double>();
  p.delta = jp.at("delta").get<double>();
  if (p.n > kOracleMaxN) {
    throw InputError("n = " + std::to_string(p.n) + " exceeds the oracle limit " +
                     std::to_string(kOracleMaxN));
  }
  const unsigned degree = jp.at("degree").get<unsigned>();
  const FeatureConfig cfg = FeatureConfig::make(p.d, degree);
  const bool full = a.oracle_mode == "full";

  std::vector<std::size_t> nnz;
  const DenseMatrix t =
      read_sparse_text(run.at("outputs").at("t").get<std::string>(), p.n, p.d, nnz);

  const OracleResult oracle =
      full ? exact_attention(q, k, v, cfg) : exact_attention(q, k, v);
  std::optional<DenseMatrix> y_hat;
  if (full) {
    const DenseMatrix core = mat_load(run.at("outputs").at("core").get<std::string>());
    require_shape(core, cfg.t, p.d, "core");
    y_hat = sketched_output(q, oracle.d_tilde_diag, core, cfg);
  }
  const ErrorReport rep = evaluate_dense(t, oracle, p, y_hat ? &*y_hat : nullptr);

  // Hard invariants: deterministic facts that must hold for any seed.
  std::vector<std::string> failures;
  for (std::size_t c = 0; c < p.d; ++c) {
    if (nnz[c] > 2 * p.k) {
      failures.push_back("column " + std::to_string(c) + ": nnz " + std::to_string(nnz[c]) +
                         " > 2k");
    }
  }
  // Every |qᵀk|/d is at most B², so each denominator is at least n·e^{−B²}.
  const double d_floor = static_cast<double>(p.n) * std::exp(-p.b * p.b) * (1.0 - 1e-12);
  for (std::size_t i = 0; i < p.n; ++i) {
    if (!(oracle.d_diag[i] >= d_floor)) {
      failures.push_back("softmax denominator " + std::to_string(i) + " below n*exp(-B^2)");
      break;
    }
  }
  if (full) {
    const double kb = kernel_error_bound(p.b, p.d, degree);
    for (std::size_t c = 0; c < p.d; ++c) {
      double vmax = 0.0;
      for (std::size_t l = 0; l < p.n; ++l) vmax = std::max(vmax, std::abs(v(l, c)));
      const double allowed = kernel_gap_bound(p.b, p.n, kb, vmax);
      if (rep.columns[c].kernel_gap && *rep.columns[c].kernel_gap > allowed) {
        failures.push_back("column " + std::to_string(c) + ": kernel gap " +
                           std::to_string(*rep.columns[c].kernel_gap) + " > " +
                           std::to_string(allowed));
      }
    }
  }
  if (a.strict && !rep.all_pass) failures.push_back("error bound missed (--strict)");

  print_error_table(std::cout, rep);
  json out = json::parse(error_report_json(rep));
  out["oracle_mode"] = a.oracle_mode;
  out["hard_failures"] = failures;
  const fs::path out_path =
      a.out.empty() ? report_path.parent_path() / "error_report.json" : fs::path(a.out);
  write_text(out_path, out.dump(2) + "\n");
  std::cout << "wrote " << out_path.string() << '\n';

  for (const std::string& f : failures) std::cerr << "invariant: " << f << '\n';
  return failures.empty() ? kExitOk : kExitInvariant;
}

// ---------------------------------------------------------------------------
// bench-memory

struct BenchArgs {
  std::vector<std::size_t> n_list{1024, 4096, 16384};
  std::size_t d = 4;
  double b = 1.0;
  std::size_t k = 8;
  double eps1 = 0.5;
  double eps2 = 0.5;
  double delta = 0.1;
  unsigned degree = 4;
  std::string sketch = "ams";
  std::uint64_t seed = 1;
  std::size_t pin_n = 0;  // 0: largest n in the list
  bool stream = false;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  if (a.n_list.empty()) throw InputError("--n-list is empty");
  ProblemParams base;
  base.d = a.d;
  base.b = a.b;
  base.k = a.k;
  base.eps1 = a.eps1;
  base.eps2 = a.eps2;
  base.delta = a.delta;
  const FeatureConfig cfg = FeatureConfig::make(a.d, a.degree);

  // m1 and m2 carry log n factors; pin them once so only n varies.
  ProblemParams pin = base;
  pin.n = a.pin_n != 0 ? a.pin_n : *std::max_element(a.n_list.begin(), a.n_list.end());
  pin.validate();
  EngineOptions opts;
  opts.sketch = parse_sketch(a.sketch);
  const EngineDims pinned = derive_dims(pin, cfg, opts);
  opts.m2 = pinned.m2;
  opts.recovery = pinned.recovery;

  std::vector<MemoryReport> reports;
  for (std::size_t n : a.n_list) {
    ProblemParams p = base;
    p.n = n;
    p.validate();
    StreamEngine engine(p, cfg, RngSeed{a.seed}, opts);
    if (a.stream) {
      const Instance inst = gen_instance(p, RngSeed{a.seed}, Profile::Uniform);
      std::stringstream wire(std::ios::in | std::ios::out | std::ios::binary);
      write_plain_stream(wire, inst.q, inst.k, inst.v);
      feed_stream(engine, wire);
    }
    reports.push_back(memory_audit(engine));
    if (a.stream) engine.finalize();
  }

  print_memory_table(std::cout, reports);
  bool flat = true;
  for (const MemoryReport& r : reports) flat = flat && r.same_footprint(reports.front());
  std::cout << (flat ? "footprint identical across n\n" : "footprint DIFFERS across n\n");

  if (!a.out.empty()) {
    json out;
    out["pinned"] = {{"n", pin.n},
                     {"t", pinned.t},
                     {"m2", pinned.m2},
                     {"m1", pinned.recovery.m1},
                     {"reps", pinned.recovery.reps},
                     {"width", pinned.recovery.width}};
    out["streamed"] = a.stream;
    out["identical"] = flat;
    out["reports"] = json::array();
    for (const MemoryReport& r : reports) out["reports"].push_back(json::parse(memory_report_json(r)));
    write_text(a.out, out.dump(2) + "\n");
  }
  return flat ? kExitOk : kExitInvariant;
}

void add_run_options(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("--k-sparse", a.k_sparse, "Sparsity k of each output column")
      ->capture_default_str();
  cmd->add_option("--eps1", a.eps1, "Recovery accuracy")->capture_default_str();
  cmd->add_option("--eps2", a.eps2, "Sketch accuracy")->capture_default_str();
  cmd->add_option("--delta", a.delta, "Failure probability")->capture_default_str();
  cmd->add_option("--b", a.b, "Entry bound for Q and K (default: observed max)");
  cmd->add_option("--degree", a.degree, "Even Taylor degree g (default: chosen from B)");
  cmd->add_option("--sketch", a.sketch, "Sketch for Psi")
      ->check(CLI::IsMember({"ams", "gaussian"}))
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--out", a.out, "Output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"One-pass streaming approximation of softmax attention"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic Q, K, V instance");
  gen_cmd->add_option("--n", gen.p.n, "Sequence length")->required();
  gen_cmd->add_option("--d", gen.p.d, "Head dimension")->required();
  gen_cmd->add_option("--b", gen.p.b, "Entry bound for Q and K")->capture_default_str();
  gen_cmd->add_option("--k", gen.p.k, "Planted heavy queries per column")->capture_default_str();
  gen_cmd->add_option("--profile", gen.profile, "Instance profile")
      ->check(CLI::IsMember({"uniform", "spiky"}))
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  gen_cmd->add_option("--out-dir", gen.out_dir, "Directory for Q.matf, K.matf, V.matf")
      ->capture_default_str();

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Stream V, K, Q through the engine");
  run_cmd->add_option("--q", run.q, "Q matrix (.matf)")->required();
  run_cmd->add_option("--k-mat", run.k_mat, "K matrix (.matf)")->required();
  run_cmd->add_option("--v", run.v, "V matrix (.matf)")->required();
  add_run_options(run_cmd, run);

  RunArgs cross;
  auto* cross_cmd = app.add_subcommand("run-cross", "Stream X2 then X1 through projections");
  cross_cmd->add_option("--x1", cross.x1, "Query-side input X1 (.matf)")->required();
  cross_cmd->add_option("--x2", cross.x2, "Key/value-side input X2 (.matf)")->required();
  cross_cmd->add_option("--wq", cross.wq, "W_Q (.matf, d x d)")->required();
  cross_cmd->add_option("--wk", cross.wk, "W_K (.matf, d x d)")->required();
  cross_cmd->add_option("--wv", cross.wv, "W_V (.matf, d x d)")->required();
  add_run_options(cross_cmd, cross);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check a run against the exact oracle");
  verify_cmd->add_option("--run-report", verify.run_report, "report.json written by run")
      ->required();
  verify_cmd->add_option("--oracle-mode", verify.oracle_mode,
                         "exact: y only; full: also the kernel and sketch gaps")
      ->check(CLI::IsMember({"exact", "full"}))
      ->capture_default_str();
  verify_cmd->add_option("--out", verify.out, "ErrorReport JSON (default: next to the report)");
  verify_cmd->add_flag("--strict", verify.strict, "Also fail when an error bound is missed");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench-memory", "Engine memory across n at pinned dims");
  bench_cmd->add_option("--n-list", bench.n_list, "Sequence lengths")
      ->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--d", bench.d, "Head dimension")->capture_default_str();
  bench_cmd->add_option("--b", bench.b, "Entry bound")->capture_default_str();
  bench_cmd->add_option("--k", bench.k, "Sparsity k")->capture_default_str();
  bench_cmd->add_option("--eps1", bench.eps1, "Recovery accuracy")->capture_default_str();
  bench_cmd->add_option("--eps2", bench.eps2, "Sketch accuracy")->capture_default_str();
  bench_cmd->add_option("--delta", bench.delta, "Failure probability")->capture_default_str();
  bench_cmd->add_option("--degree", bench.degree, "Even Taylor degree g")->capture_default_str();
  bench_cmd->add_option("--sketch", bench.sketch, "Sketch for Psi")
      ->check(CLI::IsMember({"ams", "gaussian"}))
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Random seed")->capture_default_str();
  bench_cmd->add_option("--pin-n", bench.pin_n, "n used to derive m1, m2 (default: max of list)");
  bench_cmd->add_flag("--stream", bench.stream, "Stream a uniform instance before auditing");
  bench_cmd->add_option("--out", bench.out, "Write the reports as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*run_cmd) return cmd_run(run, false);
    if (*cross_cmd) return cmd_run(cross, true);
    if (*verify_cmd) return cmd_verify(verify);
    if (*bench_cmd) return cmd_bench(bench);
  } catch (const PositivityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const MatfError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
  return kExitOk;
}
