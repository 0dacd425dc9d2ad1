#include <doctest.h>

#include "agmmn/io.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>

using namespace agmmn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "agmmn_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("format_double round trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 4.9e-324}) {
        CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
    }
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("CSV values in the open unit interval pass through") {
    const fs::path p = scratch("unit.csv");
    write_text_file(p, "a,b\n0.25,0.5\n0.75,0.125\n");
    const IngestResult r = ingest_csv_detailed(p);
    CHECK_FALSE(r.rank_transformed);
    CHECK(r.columns == std::vector<std::string>{"a", "b"});
    REQUIRE(r.u.rows() == 2);
    CHECK(r.u(0, 0) == 0.25);
    CHECK(r.u(1, 1) == 0.125);
}

TEST_CASE("CSV outside the unit interval is rank transformed") {
    const fs::path p = scratch("raw.csv");
    write_text_file(p, "x,y\n3.1,-1\n0.2,5\n10,2\n");
    const IngestResult r = ingest_csv_detailed(p);
    CHECK(r.rank_transformed);
    CHECK(r.u(0, 0) == doctest::Approx(0.5));
    CHECK(r.u(1, 0) == doctest::Approx(0.25));
    CHECK(r.u(2, 0) == doctest::Approx(0.75));
    CHECK(r.u(0, 1) == doctest::Approx(0.25));
    CHECK(r.u(1, 1) == doctest::Approx(0.75));
}

TEST_CASE("CSV errors") {
    const fs::path empty = scratch("empty.csv");
    write_text_file(empty, "");
    CHECK_THROWS(ingest_csv(empty));
    const fs::path header_only = scratch("header.csv");
    write_text_file(header_only, "a,b\n");
    CHECK_THROWS(ingest_csv(header_only));
    const fs::path one_row = scratch("one.csv");
    write_text_file(one_row, "a,b\n0.1,0.2\n");
    CHECK_THROWS(ingest_csv(one_row));
    const fs::path ragged = scratch("ragged.csv");
    write_text_file(ragged, "a,b\n0.1,0.2\n0.3\n");
    CHECK_THROWS_AS(ingest_csv(ragged), std::invalid_argument);
    const fs::path text = scratch("text.csv");
    write_text_file(text, "a,b\n0.1,0.2\n0.3,abc\n");
    CHECK_THROWS_AS(ingest_csv(text), std::invalid_argument);
    CHECK_THROWS(ingest_csv(scratch("does_not_exist.csv")));
}

TEST_CASE("matrix CSV round trip is exact") {
    Matrix m(3, 2);
    m << 1.0 / 3.0, 0.1, 2.0 / 7.0, 1e-17, 0.999999999999, 0.5;
    const fs::path p = scratch("round.csv");
    write_matrix_csv(p, {"u1", "u2"}, m);
    const CsvTable t = read_numeric_csv(p);
    CHECK(t.header == std::vector<std::string>{"u1", "u2"});
    CHECK(t.data == m);
    CHECK_THROWS_AS(write_matrix_csv(p, {"u1"}, m), DimensionError);
}
