#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tailfit/matrix.hpp"
#include "tailfit/simulate.hpp"

namespace tailfit {

struct Table {
  std::vector<std::string> header;
  Matrix values;
};

// Comma-separated numeric table with a header row. Ragged rows, empty cells
// and non-numeric cells throw Parse naming the 1-based row and column
// (row 1 is the header).
Table read_csv(std::istream& in);
Table read_csv_file(const std::string& path);

void write_csv(std::ostream& out, const std::vector<std::string>& header, const Matrix& values);
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const Matrix& values);

// Coordinates CSV with columns id,x,y.
Coordinates read_coords_csv(std::istream& in);
Coordinates read_coords_csv_file(const std::string& path);
void write_coords_csv(std::ostream& out, const Coordinates& coords);

// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

}  // namespace tailfit
