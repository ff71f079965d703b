#include "mmdglm/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mmdglm/errors.hpp"

namespace mmdglm {

namespace {

std::string location(std::string_view source, std::size_t line, std::size_t column) {
  std::ostringstream os;
  os << source << ":" << line;
  if (column > 0) os << ": column " << column;
  return os.str();
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

Dataset csv_parse(std::istream& in, Family family, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw InputError(location(source, 1, 0) + ": empty file, expected header \"y,x1,...,xp\"");
  }
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_commas(line);
  if (trim(header[0]) != "y") {
    throw InputError(location(source, 1, 1) + ": first header field must be \"y\", found \"" +
                     std::string(trim(header[0])) + "\"");
  }
  const std::size_t p = header.size() - 1;
  if (p == 0) throw InputError(location(source, 1, 0) + ": header has no predictor columns x1..xp");
  for (std::size_t j = 1; j < header.size(); ++j) {
    const std::string expected = "x" + std::to_string(j);
    if (trim(header[j]) != expected) {
      throw InputError(location(source, 1, j + 1) + ": expected header \"" + expected + "\", found \"" +
                       std::string(trim(header[j])) + "\"");
    }
  }

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != p + 1) {
      throw InputError(location(source, line_no, 0) + ": row " + std::to_string(rows + 1) + " has " +
                       std::to_string(cells.size()) + " fields, expected " + std::to_string(p + 1));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const std::string_view cell = trim(cells[j]);
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        throw InputError(location(source, line_no, j + 1) + ": row " + std::to_string(rows + 1) +
                         ": cannot parse \"" + std::string(cell) + "\" as a number");
      }
      if (!std::isfinite(v)) {
        throw InputError(location(source, line_no, j + 1) + ": row " + std::to_string(rows + 1) +
                         ": non-finite value \"" + std::string(cell) + "\"");
      }
      if (j == 0 && family == Family::binomial && v != 0.0 && v != 1.0) {
        throw InputError(location(source, line_no, 1) + ": row " + std::to_string(rows + 1) +
                         ": binomial response must be 0 or 1, found \"" + std::string(cell) + "\"");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0) throw InputError(location(source, line_no, 0) + ": no data rows");

  Dataset data;
  data.family = family;
  data.x.resize(static_cast<Index>(rows), static_cast<Index>(p));
  data.y.resize(static_cast<Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = values.data() + i * (p + 1);
    data.y[static_cast<Index>(i)] = row[0];
    for (std::size_t j = 0; j < p; ++j) data.x(static_cast<Index>(i), static_cast<Index>(j)) = row[j + 1];
  }
  return data;
}

Dataset csv_read(const std::string& path, Family family) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "' for reading");
  return csv_parse(in, family, path);
}

void csv_write(std::ostream& out, const Dataset& data) {
  if (data.x.rows() != data.y.size()) throw ContractViolation("dataset rows and response differ in length");
  out << "y";
  for (Index j = 0; j < data.p(); ++j) out << ",x" << (j + 1);
  out << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    out << format_double(data.y[i]);
    for (Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.x(i, j));
    out << '\n';
  }
}

void csv_write(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path + "' for writing");
  csv_write(out, data);
  if (!out) throw InputError("failed writing '" + path + "'");
}

}  // namespace mmdglm
