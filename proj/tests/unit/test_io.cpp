#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "tailfit/error.hpp"
#include "tailfit/io.hpp"

using namespace tailfit;

namespace {

std::string parse_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_csv(in);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
    return e.what();
  }
  FAIL("expected a parse error");
  return "";
}

}  // namespace

TEST_CASE("csv round trip is exact") {
  Matrix m(3, 2);
  m(0, 0) = 0.1;
  m(0, 1) = 1e-300;
  m(1, 0) = -2.5;
  m(1, 1) = 123456789.123456789;
  m(2, 0) = 1.0 / 3.0;
  m(2, 1) = 7.0;
  std::ostringstream out;
  write_csv(out, {"a", "b"}, m);
  std::istringstream in(out.str());
  const Table t = read_csv(in);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  CHECK(t.values == m);
}

TEST_CASE("csv accepts CRLF and surrounding blanks") {
  std::istringstream in("x, y\r\n1, 2\r\n 3 ,4\r\n");
  const Table t = read_csv(in);
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  CHECK(t.values.rows() == 2);
  CHECK(t.values(1, 0) == 3.0);
}

TEST_CASE("ragged rows name the row") {
  const std::string msg = parse_error("a,b\n1,2\n3\n");
  CHECK(msg.find("row 3") != std::string::npos);
  CHECK(msg.find("expected 2") != std::string::npos);
  CHECK(parse_error("a,b\n1,2,3\n").find("row 2") != std::string::npos);
}

TEST_CASE("non-numeric and empty cells name row and column") {
  const std::string msg = parse_error("a,b,c\n1,2,3\n4,five,6\n");
  CHECK(msg.find("row 3") != std::string::npos);
  CHECK(msg.find("column 2") != std::string::npos);
  CHECK(parse_error("a,b\n1,\n").find("column 2") != std::string::npos);
  CHECK(parse_error("a,b\n1.5x,2\n").find("column 1") != std::string::npos);
}

TEST_CASE("missing header is an error") {
  std::istringstream in("");
  CHECK_THROWS_AS(read_csv(in), Error);
}

TEST_CASE("coordinates round trip") {
  Coordinates c;
  c.x = {0.0, 1.25, 2.0 / 3.0};
  c.y = {-1.0, 0.5, 1e-9};
  std::ostringstream out;
  write_coords_csv(out, c);
  CHECK(out.str().rfind("id,x,y\n", 0) == 0);
  std::istringstream in(out.str());
  const Coordinates back = read_coords_csv(in);
  CHECK(back.x == c.x);
  CHECK(back.y == c.y);
}

TEST_CASE("coordinates need the id,x,y header") {
  std::istringstream in("site,x,y\n1,0,0\n");
  try {
    read_coords_csv(in);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parse);
  }
}

TEST_CASE("file errors are Io") {
  try {
    read_csv_file("/nonexistent/data.csv");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

TEST_CASE("format_double") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  const double x = 0.1 + 0.2;
  CHECK(std::stod(format_double(x)) == x);
}
