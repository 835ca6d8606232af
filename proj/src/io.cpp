#include "tailfit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "tailfit/error.hpp"

namespace tailfit {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  if (cell.empty()) fail(ErrorCode::Parse, where(row, col) + ": empty cell");
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size())
    fail(ErrorCode::Parse, where(row, col) + ": '" + std::string(cell) + "' is not a number");
  return value;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "' for reading");
  return in;
}

}  // namespace

Table read_csv(std::istream& in) {
  Table t;
  std::string line;
  std::size_t row = 0;
  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (t.header.empty()) {
      for (auto c : cells) t.header.emplace_back(c);
      continue;
    }
    if (cells.size() != t.header.size())
      fail(ErrorCode::Parse, "row " + std::to_string(row) + ": expected " + std::to_string(t.header.size()) +
                                 " cells, found " + std::to_string(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) values.push_back(parse_cell(cells[j], row, j + 1));
    ++rows;
  }
  if (t.header.empty()) fail(ErrorCode::Parse, "empty CSV input (a header row is required)");
  t.values = Matrix(rows, t.header.size(), std::move(values));
  return t;
}

Table read_csv_file(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return read_csv(in);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values) {
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (std::size_t i = 0; i < values.rows(); ++i) {
    for (std::size_t j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const Matrix& values) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot open '" + path + "' for writing");
  write_csv(out, header, values);
  if (!out) fail(ErrorCode::Io, "write to '" + path + "' failed");
}

Coordinates read_coords_csv(std::istream& in) {
  std::string line;
  std::size_t row = 0;
  Coordinates c;
  bool header = false;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (!header) {
      if (cells.size() != 3 || cells[0] != "id" || cells[1] != "x" || cells[2] != "y")
        fail(ErrorCode::Parse, "row 1: coordinates header must be id,x,y");
      header = true;
      continue;
    }
    if (cells.size() != 3)
      fail(ErrorCode::Parse, "row " + std::to_string(row) + ": expected 3 cells, found " + std::to_string(cells.size()));
    if (cells[0].empty()) fail(ErrorCode::Parse, where(row, 1) + ": empty id");
    c.x.push_back(parse_cell(cells[1], row, 2));
    c.y.push_back(parse_cell(cells[2], row, 3));
  }
  if (!header) fail(ErrorCode::Parse, "empty coordinates input");
  return c;
}

Coordinates read_coords_csv_file(const std::string& path) {
  std::ifstream in = open_in(path);
  try {
    return read_coords_csv(in);
  } catch (const Error& e) {
    fail(e.code(), path + ": " + e.what());
  }
}

void write_coords_csv(std::ostream& out, const Coordinates& coords) {
  out << "id,x,y\n";
  for (std::size_t i = 0; i < coords.size(); ++i)
    out << i + 1 << ',' << format_double(coords.x[i]) << ',' << format_double(coords.y[i]) << '\n';
}

}  // namespace tailfit
