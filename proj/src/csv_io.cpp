#include "hdcov/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

namespace hdcov {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  // from_chars rejects a leading '+', accept it here.
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    return std::nullopt;
  }
  return value;
}

[[noreturn]] void cell_error(ErrorCode code, const std::string& source,
                             std::size_t line, std::size_t column,
                             std::string_view cell, const char* what) {
  std::ostringstream msg;
  msg << source << ": " << what << " at line " << line << ", column " << column
      << " ('" << cell << "')";
  throw Error(code, msg.str());
}

}  // namespace

SampleBlock parse_csv(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);

    if (first_content) {
      first_content = false;
      // A header needs a non-empty, non-numeric cell; an empty cell alone
      // is a malformed data row.
      bool header = false;
      for (auto c : cells) {
        if (!c.empty() && !parse_number(c)) {
          header = true;
          break;
        }
      }
      if (header) {
        cols = cells.size();
        continue;  // header
      }
    }
    if (cols == 0) cols = cells.size();
    if (cells.size() != cols) {
      std::ostringstream msg;
      msg << source << ": line " << line_no << " has " << cells.size()
          << " columns, expected " << cols;
      throw Error(ErrorCode::Parse, msg.str());
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto v = parse_number(cells[j]);
      if (!v) {
        cell_error(ErrorCode::Parse, source, line_no, j + 1, cells[j],
                   "not a number");
      }
      if (!std::isfinite(*v)) {
        cell_error(ErrorCode::NonFiniteEntry, source, line_no, j + 1, cells[j],
                   "non-finite value");
      }
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) {
    throw Error(ErrorCode::Parse, source + ": no data rows");
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          values[i * cols + j];
    }
  }
  return SampleBlock(std::move(m));
}

SampleBlock read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return parse_csv(in, path);
}

void write_csv(const SampleBlock& block, std::ostream& out) {
  char buf[32];
  for (Eigen::Index i = 0; i < block.n(); ++i) {
    for (Eigen::Index j = 0; j < block.p(); ++j) {
      if (j > 0) out << ',';
      const auto res = std::to_chars(buf, buf + sizeof buf, block.data()(i, j),
                                     std::chars_format::general, 17);
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

void write_csv(const SampleBlock& block, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_csv(block, out);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

void write_column_csv(const std::vector<double>& values,
                      const std::string& header, std::ostream& out) {
  out << header << '\n';
  char buf[32];
  for (double v : values) {
    const auto res =
        std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.write(buf, res.ptr - buf);
    out << '\n';
  }
}

}  // namespace hdcov
