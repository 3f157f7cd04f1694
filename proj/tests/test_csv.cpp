#include <doctest.h>

#include <fstream>

#include "nbweight/csv.hpp"
#include "nbweight/errors.hpp"
#include "nbweight/rng.hpp"
#include "temp_dir.hpp"

using namespace nbweight;

namespace {
void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}
}  // namespace

TEST_CASE("csv round trip preserves cells") {
    TempDir tmp;
    const auto path = tmp.file("t.csv");
    write_csv(path, {"a", "b"}, {{"1", "x"}, {"2", "y"}});
    const CsvTable table = read_csv(path);
    REQUIRE(table.header == std::vector<std::string>{"a", "b"});
    REQUIRE(table.rows.size() == 2);
    CHECK(table.rows[1][1] == "y");
}

TEST_CASE("read_csv strips carriage returns and skips blank lines") {
    TempDir tmp;
    const auto path = tmp.file("t.csv");
    write_text(path, "a,b\r\n1,2\r\n\r\n3,4\n");
    const CsvTable table = read_csv(path);
    CHECK(table.rows.size() == 2);
    CHECK(table.rows[0][1] == "2");
    CHECK(table.rows[1][0] == "3");
}

TEST_CASE("read_csv rejects ragged rows and missing files") {
    TempDir tmp;
    const auto path = tmp.file("t.csv");
    write_text(path, "a,b\n1\n");
    CHECK_THROWS_AS(read_csv(path), DataError);
    CHECK_THROWS_AS(read_csv(tmp.file("absent.csv")), DataError);
}

TEST_CASE("column lookup returns -1 for unknown names") {
    CsvTable table;
    table.header = {"id", "score"};
    CHECK(table.column("score") == 1);
    CHECK(table.column("weight") == -1);
}

TEST_CASE("format_double emits shortest exact round trip") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5) == "-2.5");
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        const double x = (rng.uniform() - 0.5) * std::pow(10.0, static_cast<int>(rng.below(12)));
        CHECK(parse_double(format_double(x)) == x);
    }
}

TEST_CASE("parse_double and parse_int reject malformed cells") {
    CHECK(parse_double("2.5e-3") == 2.5e-3);
    CHECK_THROWS_AS(parse_double("1x"), DataError);
    CHECK_THROWS_AS(parse_double(""), DataError);
    CHECK_THROWS_AS(parse_double("nan"), DataError);
    CHECK_THROWS_AS(parse_double("inf"), DataError);
    CHECK(parse_int("-42") == -42);
    CHECK_THROWS_AS(parse_int("3.5"), DataError);
}
