#include "streamattn/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <stdexcept>
#include <variant>

namespace streamattn {

namespace {

double column_distance(const DenseMatrix& a, const DenseMatrix& b, std::size_t c) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double diff = a(r, c) - b(r, c);
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace

ErrorReport evaluate_dense(const DenseMatrix& t, const OracleResult& oracle,
                           const ProblemParams& p, const DenseMatrix* y_hat) {
  const DenseMatrix& y = oracle.y;
  if (t.rows() != y.rows() || t.cols() != y.cols()) {
    throw std::invalid_argument("output and oracle shapes differ");
  }
  ErrorReport rep;
  std::size_t passes = 0;
  for (std::size_t c = 0; c < y.cols(); ++c) {
    ColumnError col;
    col.column = c;
    col.error = column_distance(t, y, c);
    col.tail = tail_k(y.column(c), p.k);
    col.bound = (1.0 + p.eps1) * col.tail + p.eps2;
    col.pass = col.error <= col.bound;
    col.ratio = col.error / col.bound;
    for (std::size_t r = 0; r < t.rows(); ++r) col.nnz += t(r, c) != 0.0;
    if (oracle.has_tilde) {
      col.kernel_gap = column_distance(y, oracle.y_tilde, c);
      if (y_hat) col.sketch_gap = column_distance(oracle.y_tilde, *y_hat, c);
    }
    passes += col.pass;
    rep.max_ratio = std::max(rep.max_ratio, col.ratio);
    rep.columns.push_back(col);
  }
  rep.pass_rate = rep.columns.empty() ? 1.0 : static_cast<double>(passes) / rep.columns.size();
  rep.all_pass = passes == rep.columns.size();
  return rep;
}

ErrorReport evaluate(const AttentionOutput& output, const OracleResult& oracle,
                     const ProblemParams& p, const DenseMatrix* y_hat) {
  if (output.n != oracle.y.rows()) throw std::invalid_argument("output n differs from oracle");
  ErrorReport rep = evaluate_dense(output.to_dense(), oracle, p, y_hat);
  for (std::size_t c = 0; c < rep.columns.size(); ++c) rep.columns[c].nnz = output.columns[c].nnz();
  return rep;
}

double kernel_gap_bound(double b, std::size_t n, double bound, double v_col_max_abs) {
  return std::sqrt(static_cast<double>(n)) * 2.0 * bound * std::exp(b * b) * v_col_max_abs;
}

bool MemoryReport::same_footprint(const MemoryReport& other) const {
  if (objects.size() != other.objects.size() || total_numbers != other.total_numbers) return false;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& a = objects[i];
    const auto& b = other.objects[i];
    if (a.name != b.name || a.rows != b.rows || a.cols != b.cols || a.numbers != b.numbers)
      return false;
  }
  return true;
}

MemoryReport memory_audit(const StreamEngine& engine) {
  const EngineDims& dims = engine.dims();
  MemoryReport rep;
  rep.n = dims.n;
  rep.m1 = dims.recovery.m1;
  rep.m2 = dims.m2;
  rep.t = dims.t;
  rep.d = dims.d;

  auto add = [&](std::string name, std::size_t rows, std::size_t cols, std::size_t numbers,
                 bool core) {
    rep.objects.push_back({std::move(name), rows, cols, numbers, core});
  };
  add("sk_u2", dims.m2, dims.t, engine.sk_u2_accumulator().buffer_numbers(), true);
  add("sk_v", dims.m2, dims.d, engine.sk_v_accumulator().buffer_numbers(), true);
  add("sk_dinv_u1", dims.recovery.m1, dims.t, engine.sk_dinv_u1().size(), true);
  add("prod_u2", dims.t, 1, engine.prod_u2().size(), true);
  // Hash coefficients: AMS keeps four per row of Ψ, Gaussian a single seed.
  if (std::holds_alternative<AmsSketcher>(engine.psi())) {
    add("psi_hash_words", dims.m2, 4, sketch_state_words(engine.psi()), false);
  } else {
    add("psi_hash_words", 1, 1, sketch_state_words(engine.psi()), false);
  }
  add("phi_hash_words", dims.recovery.reps, 6, engine.phi().state_words(), false);
  constexpr std::size_t stage = SketchAccumulator::kStageRows;
  const SketchAccumulator& acc_u2 = engine.sk_u2_accumulator();
  const SketchAccumulator& acc_v = engine.sk_v_accumulator();
  add("sk_u2_stage_rows", stage, dims.t, acc_u2.staged_row_numbers(), false);
  add("sk_u2_stage_psi", dims.m2, stage, acc_u2.staged_psi_numbers(), false);
  add("sk_u2_psi_column", dims.m2, 1, acc_u2.column_scratch_numbers(), false);
  add("sk_v_stage_rows", stage, dims.d, acc_v.staged_row_numbers(), false);
  add("sk_v_stage_psi", dims.m2, stage, acc_v.staged_psi_numbers(), false);
  add("sk_v_psi_column", dims.m2, 1, acc_v.column_scratch_numbers(), false);
  add("feature_scratch", dims.t, 1, engine.feature_scratch_numbers(), false);
  add("cell_scratch", dims.recovery.reps, 2, engine.cell_scratch_numbers(), false);
  if (engine.weights()) {
    add("projection_scratch", dims.d, 2, engine.projection_scratch_numbers(), false);
    add("cross_weights", 3 * dims.d, dims.d, 3 * dims.d * dims.d, false);
  }

  for (const auto& o : rep.objects) {
    rep.total_numbers += o.numbers;
    if (o.core_state) rep.state_numbers += o.numbers;
  }
  rep.total_bytes = rep.total_numbers * sizeof(double);
  return rep;
}

void print_error_table(std::ostream& os, const ErrorReport& report) {
  os << std::left << std::setw(6) << "col" << std::setw(14) << "error" << std::setw(14)
     << "tail_k" << std::setw(14) << "bound" << std::setw(10) << "ratio" << std::setw(6)
     << "nnz" << std::setw(14) << "kernel_gap" << std::setw(14) << "sketch_gap"
     << "pass\n";
  os << std::scientific << std::setprecision(4);
  for (const auto& c : report.columns) {
    os << std::setw(6) << c.column << std::setw(14) << c.error << std::setw(14) << c.tail
       << std::setw(14) << c.bound << std::setw(10) << std::fixed << std::setprecision(3)
       << c.ratio << std::scientific << std::setprecision(4) << std::setw(6) << c.nnz;
    if (c.kernel_gap) os << std::setw(14) << *c.kernel_gap; else os << std::setw(14) << "-";
    if (c.sketch_gap) os << std::setw(14) << *c.sketch_gap; else os << std::setw(14) << "-";
    os << (c.pass ? "yes" : "NO") << '\n';
  }
  os << std::defaultfloat << "pass rate " << report.pass_rate << ", max ratio "
     << report.max_ratio << '\n';
}

void print_memory_table(std::ostream& os, const std::vector<MemoryReport>& reports) {
  os << std::left << std::setw(10) << "n" << std::setw(8) << "m1" << std::setw(8) << "m2"
     << std::setw(8) << "t" << std::setw(16) << "state_numbers" << std::setw(16)
     << "total_numbers" << "total_bytes\n";
  for (const auto& r : reports) {
    os << std::setw(10) << r.n << std::setw(8) << r.m1 << std::setw(8) << r.m2 << std::setw(8)
       << r.t << std::setw(16) << r.state_numbers << std::setw(16) << r.total_numbers
       << r.total_bytes << '\n';
  }
}

std::string error_report_json(const ErrorReport& report, int indent) {
  nlohmann::json j;
  j["pass_rate"] = report.pass_rate;
  j["max_ratio"] = report.max_ratio;
  j["all_pass"] = report.all_pass;
  j["columns"] = nlohmann::json::array();
  for (const auto& c : report.columns) {
    nlohmann::json col{{"column", c.column}, {"error", c.error},  {"tail_k", c.tail},
                       {"bound", c.bound},   {"ratio", c.ratio}, {"pass", c.pass},
                       {"nnz", c.nnz}};
    col["kernel_gap"] = c.kernel_gap ? nlohmann::json(*c.kernel_gap) : nlohmann::json();
    col["sketch_gap"] = c.sketch_gap ? nlohmann::json(*c.sketch_gap) : nlohmann::json();
    j["columns"].push_back(col);
  }
  return j.dump(indent);
}

std::string memory_report_json(const MemoryReport& report, int indent) {
  nlohmann::json j{{"n", report.n},
                   {"m1", report.m1},
                   {"m2", report.m2},
                   {"t", report.t},
                   {"d", report.d},
                   {"state_numbers", report.state_numbers},
                   {"total_numbers", report.total_numbers},
                   {"total_bytes", report.total_bytes}};
  j["objects"] = nlohmann::json::array();
  for (const auto& o : report.objects) {
    j["objects"].push_back({{"name", o.name},
                            {"rows", o.rows},
                            {"cols", o.cols},
                            {"numbers", o.numbers},
                            {"core_state", o.core_state}});
  }
  return j.dump(indent);
}

}  // namespace streamattn
