#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "gaitsim/csv.hpp"
#include "test_util.hpp"

using namespace gaitsim;

TEST_CASE("format_double round-trips doubles exactly through strtod") {
  const double cases[] = {0.0,
                          -0.0,
                          1.0,
                          -1.0,
                          1.0 / 3.0,
                          6.02214076e23,
                          -2.2250738585072014e-308,
                          9.8100000000000005,
                          std::numeric_limits<double>::max(),
                          std::numeric_limits<double>::denorm_min(),
                          std::numeric_limits<double>::infinity(),
                          -std::numeric_limits<double>::infinity()};
  for (double v : cases) {
    const std::string s = format_double(v);
    char* end = nullptr;
    const double back = std::strtod(s.c_str(), &end);
    CHECK(*end == '\0');
    CHECK(back == v);
  }
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("writer and reader round-trip rows, header, and metadata") {
  const auto dir = testutil::scratch_dir("csv");
  const std::string path = (dir / "t.csv").string();
  {
    CsvWriter w(path);
    w.meta("alpha", "0.25");
    w.meta("label", "session 3");
    w.header({"a", "b", "c"});
    w.row({1.0, -0.5, 1e-17});
    w.row({std::numeric_limits<double>::infinity(), std::nan(""), 3.25});
    w.flush();
  }
  const CsvTable t = read_csv(path);
  CHECK(t.meta.at("alpha") == "0.25");
  CHECK(t.meta.at("label") == "session 3");
  REQUIRE(t.columns.size() == 3);
  CHECK(t.columns[1] == "b");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.at(0, 0) == 1.0);
  CHECK(t.at(0, 2) == 1e-17);
  CHECK(std::isinf(t.at(1, 0)));
  CHECK(std::isnan(t.at(1, 1)));
  CHECK(t.at(1, 2) == 3.25);
}

TEST_CASE("column lookup distinguishes missing from present") {
  CsvTable t;
  t.columns = {"x", "y"};
  CHECK(t.column_index("y") == 1);
  CHECK(t.column_index("z") == -1);
  CHECK(t.require_column("x") == 0);
  CHECK_THROWS_AS((void)t.require_column("z"), CsvError);
}

TEST_CASE("reader tolerates blank lines, comments, and whitespace") {
  const auto dir = testutil::scratch_dir("csv_loose");
  const std::string path = (dir / "loose.csv").string();
  testutil::write_file(path,
                       "# pure comment without equals\n"
                       "\n"
                       "#  spaced = 7 \n"
                       " a , b \n"
                       " 1 , 2 \n"
                       "\n"
                       "3,4\n");
  const CsvTable t = read_csv(path);
  CHECK(t.meta.at("spaced") == "7");
  CHECK(t.columns == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.at(1, 1) == 4.0);
}

TEST_CASE("reader reports malformed files with location context") {
  const auto dir = testutil::scratch_dir("csv_bad");

  const std::string missing = (dir / "absent.csv").string();
  CHECK_THROWS_WITH_AS((void)read_csv(missing),
                       doctest::Contains("cannot open"), CsvError);

  const std::string ragged = (dir / "ragged.csv").string();
  testutil::write_file(ragged, "a,b\n1,2\n1,2,3\n");
  CHECK_THROWS_WITH_AS((void)read_csv(ragged), doctest::Contains(":3"),
                       CsvError);

  const std::string alpha = (dir / "alpha.csv").string();
  testutil::write_file(alpha, "a,b\n1,fast\n");
  CHECK_THROWS_WITH_AS((void)read_csv(alpha), doctest::Contains("fast"),
                       CsvError);

  const std::string empty = (dir / "empty.csv").string();
  testutil::write_file(empty, "# only = meta\n");
  CHECK_THROWS_WITH_AS((void)read_csv(empty), doctest::Contains("empty"),
                       CsvError);
}

TEST_CASE("writer rejects rows that do not match the header") {
  const auto dir = testutil::scratch_dir("csv_writer");
  CsvWriter w((dir / "w.csv").string());
  CHECK_THROWS_AS(w.row({1.0}), CsvError);  // header not yet written
  w.header({"a", "b"});
  CHECK_THROWS_AS(w.row({1.0}), CsvError);
  CHECK_THROWS_AS(w.row({1.0, 2.0, 3.0}), CsvError);
  w.row({1.0, 2.0});
}
