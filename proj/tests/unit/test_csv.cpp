#include <cmath>

#include <doctest.h>

#include "hullas/csv.hpp"
#include "hullas/error.hpp"
#include "oracles.hpp"

using namespace hullas;

TEST_SUITE("csv") {

TEST_CASE("header detection and empty cells") {
  const auto t = csv::parse("a,b\n1,2\n3,\n");
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == 2.0);
  CHECK(std::isnan(t.rows[1][1]));
  const auto n = csv::parse("1,2\n3,4\n");
  CHECK(n.header.empty());
  CHECK(n.rows.size() == 2);
  CHECK_THROWS_AS(csv::parse("1,2\n3\n"), ParseError);
  CHECK_THROWS_AS(csv::parse("1,2\n3,x\n"), ParseError);
}

TEST_CASE("round trip keeps every bit") {
  const auto dir = oracle::scratch("csv");
  csv::Table t{{"x", "y"}, {{0.1, 1.0 / 3.0}, {-2.5e-300, std::nan("")}}};
  csv::write(dir / "t.csv", t);
  const auto back = csv::read(dir / "t.csv");
  CHECK(back.rows[0][0] == 0.1);
  CHECK(back.rows[0][1] == 1.0 / 3.0);
  CHECK(back.rows[1][0] == -2.5e-300);
  CHECK(std::isnan(back.rows[1][1]));
  CHECK(csv::format_double(0.5) == "0.5");
}

}  // TEST_SUITE
