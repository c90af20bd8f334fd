#include "coxred/errors.hpp"
#include "coxred/io.hpp"
#include "coxred/simulation.hpp"

#include <doctest.h>

#include <filesystem>

using namespace coxred;
using namespace coxred::io;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("coxred_io_" + name)).string();
}

}  // namespace

TEST_CASE("toy table") {
    const auto t = parse_csv("y,a,b\n1,2,3\n4,5,6\n7,8,10\n");
    CHECK(t.header == std::vector<std::string>{"y", "a", "b"});
    CHECK(t.values.rows() == 3);
    const auto d = make_dataset(t);
    CHECK(d.n() == 3);
    CHECK(d.p() == 2);
    CHECK(d.response_name == "y");
    CHECK(d.covariate_names == std::vector<std::string>{"a", "b"});
    CHECK(d.y_mean == 4.0);
    CHECK(d.y(0) == -3.0);
    CHECK(d.x_means(1) == doctest::Approx(19.0 / 3.0));
    CHECK(covariate_index(d, "b") == 1);
    CHECK(covariate_index(d, "y") == -1);
}

TEST_CASE("named response") {
    const auto d = make_dataset(parse_csv("a,y,b\n1,2,3\n4,5,6\n7,8,10\n"), "y");
    CHECK(d.response_name == "y");
    CHECK(d.covariate_names == std::vector<std::string>{"a", "b"});
    CHECK(d.y(2) == 3.0);
    CHECK_THROWS_AS(make_dataset(parse_csv("a,b\n1,2\n3,4\n"), "zz"), ConfigError);
}

TEST_CASE("parse errors name the cell") {
    try {
        parse_csv("y,a\n1,2\n3,NA\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
        CHECK(e.column() == 2);
        CHECK(std::string(e.what()).find("NA") != std::string::npos);
    }
    try {
        parse_csv("y,a\n1,2\n3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
    }
    CHECK_THROWS_AS(parse_csv("y,a\n1,inf\n"), ParseError);
    CHECK_THROWS_AS(parse_csv("y,a\n1,2x\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(""), Error);
}

TEST_CASE("blank lines and signs") {
    const auto t = parse_csv("y,a\n\n+1,-2.5e1\n\n3,4\n\n");
    CHECK(t.values.rows() == 2);
    CHECK(t.values(0, 0) == 1.0);
    CHECK(t.values(0, 1) == -25.0);
}

TEST_CASE("constant columns are flagged and zeroed") {
    const auto d = make_dataset(parse_csv("y,a,c\n1,2,5\n2,3,5\n4,1,5\n"));
    CHECK(d.constant_columns == IndexSet{1});
    CHECK(d.x.col(1).isZero(0.0));
}

TEST_CASE("generated data round-trip bit-exactly") {
    const auto g = simulation::generate(simulation::GenSpec::sparse(30, 6, 2, 0.7, 1.0, simulation::CovariateLaw::iid(), 3));
    Matrix raw(30, 7);
    raw << g.y, g.x;
    raw *= 1.0 / 3.0;
    std::vector<std::string> header{"y", "x0", "x1", "x2", "x3", "x4", "x5"};
    const auto path = temp_path("roundtrip.csv");
    write_text(path, format_csv(header, raw));
    const auto back = read_csv(path);
    CHECK(back.header == header);
    CHECK(back.values == raw);
    std::filesystem::remove(path);
}

TEST_CASE("file errors") {
    CHECK_THROWS_AS(read_text(temp_path("does_not_exist.csv")), DataError);
    CHECK_THROWS_AS(ingest(temp_path("does_not_exist.csv")), DataError);
}
