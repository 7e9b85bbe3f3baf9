#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "streamattn/engine.hpp"
#include "streamattn/oracle.hpp"

namespace streamattn {

struct ColumnError {
  std::size_t column = 0;
  double error = 0.0;   // ‖T_i − y_i‖₂
  double tail = 0.0;    // tail_k(y_i)
  double bound = 0.0;   // (1+ε1)·tail + ε2
  bool pass = false;
  double ratio = 0.0;   // error / bound
  std::size_t nnz = 0;
  std::optional<double> kernel_gap;  // ‖y_i − ỹ_i‖₂
  std::optional<double> sketch_gap;  // ‖ỹ_i − ŷ_i‖₂
};

struct ErrorReport {
  std::vector<ColumnError> columns;
  double pass_rate = 0.0;
  double max_ratio = 0.0;
  bool all_pass = false;
};

/// Per-column check of ‖T_i − y_i‖₂ ≤ (1+ε1)·tail_k(y_i) + ε2, plus the
/// kernel and sketch gaps when the oracle and ŷ provide them.
ErrorReport evaluate(const AttentionOutput& output, const OracleResult& oracle,
                     const ProblemParams& p, const DenseMatrix* y_hat = nullptr);

/// Same check for a dense candidate T (rows n, cols d).
ErrorReport evaluate_dense(const DenseMatrix& t, const OracleResult& oracle,
                           const ProblemParams& p, const DenseMatrix* y_hat = nullptr);

/// √n · 2·bound·e^{B²} · max_l |V_{l,c}|: the kernel gap allowed for column c
/// when every entry of A − Ã is within `bound` and A ≥ e^{−B²} entrywise.
double kernel_gap_bound(double b, std::size_t n, double bound, double v_col_max_abs);

struct MemoryObject {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t numbers = 0;
  /// Counted in the sketch-state formula m2·t + m2·d + m1·t + t.
  bool core_state = false;
};

struct MemoryReport {
  std::size_t n = 0;
  std::size_t m1 = 0;
  std::size_t m2 = 0;
  std::size_t t = 0;
  std::size_t d = 0;
  std::vector<MemoryObject> objects;
  std::size_t state_numbers = 0;  // core objects only
  std::size_t total_numbers = 0;  // everything held by the engine
  std::size_t total_bytes = 0;

  bool same_footprint(const MemoryReport& other) const;
};

MemoryReport memory_audit(const StreamEngine& engine);

void print_error_table(std::ostream& os, const ErrorReport& report);
void print_memory_table(std::ostream& os, const std::vector<MemoryReport>& reports);

std::string error_report_json(const ErrorReport& report, int indent = 2);
std::string memory_report_json(const MemoryReport& report, int indent = 2);

}  // namespace streamattn
