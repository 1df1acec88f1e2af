#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rmtcov/descent.hpp"
#include "rmtcov/spd.hpp"

namespace rmtcov {

/// Writes a dense matrix as plain CSV with 17 significant digits
/// (lossless double round-trip).
void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header = {});

/// Reads a rectangular numeric CSV. A first line containing any
/// non-numeric cell is treated as a header and skipped. Ragged rows
/// raise ParseError naming the offending line.
Matrix read_matrix_csv(const std::string& path);

/// One aggregated benchmark cell.
struct ResultRow {
  double ratio = 0.0;       // n/p (or (n1+n2)/p for classification)
  std::string estimator;
  double mean = 0.0;
  double stddev = 0.0;
  int trials = 0;
};

/// Long-format result table with a '#'-prefixed JSON metadata line.
/// Byte-identical output for identical content.
struct ResultTable {
  std::string metadata_json;  // single-line JSON without the leading '#'
  std::vector<ResultRow> rows;
};

void write_result_table(const std::string& path, const ResultTable& table);
ResultTable read_result_table(const std::string& path);

/// Imports a wide baseline CSV (header: ratio,name1,name2,...) as extra
/// rows with trials = 0, for side-by-side reporting.
void merge_baseline(ResultTable& table, const std::string& path);

/// Per-iteration descent trace (k, h, delta_hat, step, grad_norm and,
/// when recorded, true_delta and the gap true_delta - delta_hat).
void write_trace_csv(const std::string& path, const DescentTrace& trace,
                     const std::string& metadata_json);

/// 17-significant-digit formatting used across all writers.
std::string format_double(double v);

}  // namespace rmtcov
