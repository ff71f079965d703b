#include <doctest.h>

#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "mmdglm/csv.hpp"
#include "mmdglm/errors.hpp"

using namespace mmdglm;

namespace {

Dataset parse(const std::string& text, Family family = Family::gaussian) {
  std::istringstream in(text);
  return csv_parse(in, family, "t.csv");
}

std::string error_of(const std::string& text, Family family = Family::gaussian) {
  try {
    parse(text, family);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("csv") {

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, (k % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("write then read is exact") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  Dataset d;
  d.x.resize(7, 4);
  d.y.resize(7);
  for (Index i = 0; i < 7; ++i) {
    d.y[i] = z(rng) * 1e-7;
    for (Index j = 0; j < 4; ++j) d.x(i, j) = z(rng) * 1e5;
  }
  std::ostringstream out;
  csv_write(out, d);
  CHECK(out.str().rfind("y,x1,x2,x3,x4\n", 0) == 0);
  const Dataset back = parse(out.str());
  CHECK(back.x == d.x);
  CHECK(back.y == d.y);

  const auto path = std::filesystem::temp_directory_path() / "mmdglm_csv_roundtrip.csv";
  csv_write(path.string(), d);
  const Dataset file = csv_read(path.string(), Family::gaussian);
  CHECK(file.x == d.x);
  std::filesystem::remove(path);
}

TEST_CASE("edge shapes") {
  const Dataset one = parse("y,x1,x2\n1.5,2,3\n");
  CHECK(one.n() == 1);
  CHECK(one.p() == 2);
  CHECK(one.x(0, 1) == 3.0);
  const Dataset bom = parse("\xEF\xBB\xBFy,x1\n1,2\n\n3,4\n");
  CHECK(bom.n() == 2);
  const Dataset crlf = parse("y,x1\r\n1,2\r\n");
  CHECK(crlf.n() == 1);
}

TEST_CASE("header is enforced") {
  CHECK(error_of("x1,x2\n1,2\n").find("y") != std::string::npos);
  CHECK_FALSE(error_of("y,x2\n1,2\n").empty());
  CHECK_FALSE(error_of("y,x1\n").empty());
}

TEST_CASE("bad cells name their position") {
  const std::string bad = error_of("y,x1,x2\n1,2,3\n4,abc,6\n");
  CHECK(bad.find("t.csv:3") != std::string::npos);
  CHECK(bad.find("column 2") != std::string::npos);

  CHECK(error_of("y,x1\n1,nan\n").find("t.csv:2") != std::string::npos);
  CHECK_FALSE(error_of("y,x1\n1,inf\n").empty());
  CHECK(error_of("y,x1,x2\n1,2\n").find("t.csv:2") != std::string::npos);
  CHECK_FALSE(error_of("y,x1,x2\n1,2,3,4\n").empty());

  const std::string label = error_of("y,x1\n0,1\n1,2\n0.5,3\n", Family::binomial);
  CHECK(label.find("t.csv:4") != std::string::npos);
  CHECK(label.find("row 3") != std::string::npos);
  CHECK_NOTHROW(parse("y,x1\n0,1\n1,2\n", Family::binomial));
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(csv_read("/nonexistent/dir/file.csv", Family::gaussian), InputError);
}

}  // TEST_SUITE
