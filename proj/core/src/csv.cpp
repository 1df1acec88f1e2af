#include "rmtcov/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace rmtcov {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_number(const std::string& tok, double* out) {
  const char* s = tok.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s, &end);
  if (end == s || errno == ERANGE) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  if (*end != '\0') return false;
  *out = v;
  return true;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open '" + path + "' for reading");
  return f;
}

}  // namespace

void write_matrix_csv(const std::string& path, const Matrix& m,
                      const std::vector<std::string>& header) {
  auto f = open_out(path);
  if (!header.empty()) {
    if (static_cast<Eigen::Index>(header.size()) != m.cols()) {
      throw DimensionError("write_matrix_csv: header size mismatch");
    }
    for (std::size_t j = 0; j < header.size(); ++j) {
      f << (j ? "," : "") << header[j];
    }
    f << "\n";
  }
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      f << (j ? "," : "") << format_double(m(i, j));
    }
    f << "\n";
  }
}

Matrix read_matrix_csv(const std::string& path) {
  auto f = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  bool first_content_line = true;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    std::vector<double> row;
    row.reserve(fields.size());
    bool numeric = true;
    for (const auto& tok : fields) {
      double v;
      if (!parse_number(tok, &v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first_content_line) {  // header row
        first_content_line = false;
        continue;
      }
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": non-numeric cell in data row");
    }
    first_content_line = false;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": ragged row (" +
                       std::to_string(row.size()) + " cells, expected " +
                       std::to_string(rows.front().size()) + ")");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no numeric rows");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.front().size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

void write_result_table(const std::string& path, const ResultTable& table) {
  auto f = open_out(path);
  if (!table.metadata_json.empty()) f << "#" << table.metadata_json << "\n";
  f << "ratio,estimator,mean,std,trials\n";
  for (const auto& r : table.rows) {
    f << format_double(r.ratio) << "," << r.estimator << ","
      << format_double(r.mean) << "," << format_double(r.stddev) << ","
      << r.trials << "\n";
  }
}

ResultTable read_result_table(const std::string& path) {
  auto f = open_in(path);
  ResultTable out;
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      out.metadata_json = line.substr(1);
      continue;
    }
    if (!saw_header) {
      saw_header = true;  // "ratio,estimator,..."
      continue;
    }
    const auto fields = split_fields(line);
    if (fields.size() != 5) {
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 5 cells");
    }
    ResultRow r;
    double trials = 0;
    if (!parse_number(fields[0], &r.ratio) || !parse_number(fields[2], &r.mean) ||
        !parse_number(fields[3], &r.stddev) || !parse_number(fields[4], &trials)) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": bad number");
    }
    r.estimator = fields[1];
    r.trials = static_cast<int>(trials);
    out.rows.push_back(std::move(r));
  }
  return out;
}

void merge_baseline(ResultTable& table, const std::string& path) {
  auto f = open_in(path);
  std::string line;
  std::vector<std::string> names;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_fields(line);
    if (names.empty()) {
      if (fields.size() < 2) {
        throw ParseError(path + ": baseline header needs ratio plus columns");
      }
      names.assign(fields.begin() + 1, fields.end());
      continue;
    }
    if (fields.size() != names.size() + 1) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": ragged row");
    }
    double ratio;
    if (!parse_number(fields[0], &ratio)) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": bad ratio");
    }
    for (std::size_t j = 0; j < names.size(); ++j) {
      double v;
      if (!parse_number(fields[j + 1], &v)) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": bad value");
      }
      table.rows.push_back({ratio, names[j], v, 0.0, 0});
    }
  }
  if (names.empty()) throw ParseError(path + ": empty baseline file");
}

void write_trace_csv(const std::string& path, const DescentTrace& trace,
                     const std::string& metadata_json) {
  auto f = open_out(path);
  if (!metadata_json.empty()) f << "#" << metadata_json << "\n";
  const bool with_truth =
      !trace.rows.empty() && trace.rows.front().true_delta.has_value();
  f << "k,h,delta_hat,step,grad_norm";
  if (with_truth) f << ",true_delta,gap";
  f << "\n";
  for (const auto& r : trace.rows) {
    f << r.k << "," << format_double(r.h) << "," << format_double(r.delta_hat)
      << "," << format_double(r.step) << "," << format_double(r.grad_norm);
    if (with_truth) {
      const double td = r.true_delta.value_or(0.0);
      f << "," << format_double(td) << "," << format_double(td - r.delta_hat);
    }
    f << "\n";
  }
}

}  // namespace rmtcov
