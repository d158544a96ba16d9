#ifndef MDLNMF_CSV_HPP
#define MDLNMF_CSV_HPP

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core.hpp"
#include "errors.hpp"

namespace mdlnmf {

struct LoadOptions {
  bool transpose = false;
  char delimiter = ',';
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string> split_line(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(trim(line.substr(start)));
      break;
    }
    fields.emplace_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

inline bool all_numeric(const std::vector<std::string>& fields) {
  for (const auto& f : fields)
    if (!parse_double(f)) return false;
  return true;
}

// 17 significant digits round-trips any finite double through text.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Reads a rectangular numeric grid. A single leading header row and/or label
// column is auto-detected by failing to parse as numbers.
inline DataMatrix load_matrix(const std::filesystem::path& path,
                              const LoadOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw MissingInputError("cannot open " + path.string());

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    rows.push_back(detail::split_line(line, options.delimiter));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw MissingInputError(path.string() + " has no data rows");

  std::vector<std::string> col_labels;
  std::size_t first_data_row = 0;
  if (!detail::all_numeric(rows[0])) {
    col_labels = rows[0];
    first_data_row = 1;
    if (rows.size() == 1) throw ParseError(line_numbers[0], "header row with no data rows");
  }

  // A non-numeric first field on the first data row means a label column.
  bool label_column = false;
  if (!rows[first_data_row].empty() && !detail::parse_double(rows[first_data_row][0]))
    label_column = true;
  if (label_column && !col_labels.empty() && col_labels.size() == rows[first_data_row].size() - 1)
    col_labels.insert(col_labels.begin(), "");  // header omitted the label corner

  const std::size_t width = rows[first_data_row].size();
  const std::size_t data_cols = width - (label_column ? 1 : 0);
  if (data_cols == 0) throw ParseError(line_numbers[first_data_row], "no numeric columns");
  const std::size_t data_rows = rows.size() - first_data_row;

  Matrix values(static_cast<Index>(data_rows), static_cast<Index>(data_cols));
  std::vector<std::string> row_labels;
  for (std::size_t r = first_data_row; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.size() != width) throw RaggedRowsError(line_numbers[r], width, fields.size());
    std::size_t c0 = 0;
    if (label_column) {
      row_labels.push_back(fields[0]);
      c0 = 1;
    }
    for (std::size_t c = c0; c < fields.size(); ++c) {
      const auto v = detail::parse_double(fields[c]);
      if (!v) throw ParseError(line_numbers[r], "cannot parse '" + fields[c] + "' as a number");
      values(static_cast<Index>(r - first_data_row), static_cast<Index>(c - c0)) = *v;
    }
  }

  if (!col_labels.empty() && label_column) col_labels.erase(col_labels.begin());
  if (!col_labels.empty() && col_labels.size() != data_cols)
    throw ParseError(line_numbers[0], "header width does not match data width");

  if (options.transpose) {
    values.transposeInPlace();
    std::swap(row_labels, col_labels);
  }
  DataMatrix dm = validate_nonneg(values);
  dm.row_labels = std::move(row_labels);
  dm.col_labels = std::move(col_labels);
  return dm;
}

inline void save_matrix(const std::filesystem::path& path, const Matrix& m,
                        const std::string& column_prefix = "c") {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << column_prefix << j;
  out << "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j)
      out << (j ? "," : "") << detail::format_double(m(i, j));
    out << "\n";
  }
}

inline void save_trace(const std::filesystem::path& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "iteration,objective,l_w,l_h,l_e,frobenius_error,learning_rate,accepted\n";
  for (const TraceEntry& t : trace) {
    out << t.iteration << ',' << detail::format_double(t.objective) << ','
        << detail::format_double(t.l_w) << ',' << detail::format_double(t.l_h) << ','
        << detail::format_double(t.l_e) << ',' << detail::format_double(t.frobenius_error)
        << ',' << detail::format_double(t.learning_rate) << ',' << (t.accepted ? 1 : 0)
        << "\n";
  }
}

inline void save_model(const std::filesystem::path& path, const CodeModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "alpha=" << detail::format_double(model.gamma_w.shape) << "\n"
      << "beta=" << detail::format_double(model.gamma_w.rate) << "\n"
      << "a=" << detail::format_double(model.gamma_h.shape) << "\n"
      << "b=" << detail::format_double(model.gamma_h.rate) << "\n"
      << "mu=" << detail::format_double(model.gauss_e.mu) << "\n"
      << "sigma=" << detail::format_double(model.gauss_e.sigma) << "\n"
      << "delta=" << detail::format_double(model.delta) << "\n";
}

}  // namespace mdlnmf

#endif  // MDLNMF_CSV_HPP
