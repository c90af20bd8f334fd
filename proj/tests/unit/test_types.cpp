#include "coxred/errors.hpp"
#include "coxred/types.hpp"

#include <doctest.h>

using namespace coxred;

TEST_CASE("index sets are sorted and duplicate-free") {
    CHECK(make_index_set({5, 1, 3, 1, 5}) == IndexSet{1, 3, 5});
    CHECK(make_index_set({}).empty());
}

TEST_CASE("set algebra") {
    const IndexSet a{1, 2, 4}, b{2, 3, 4, 7};
    CHECK(set_union(a, b) == IndexSet{1, 2, 3, 4, 7});
    CHECK(set_difference(a, b) == IndexSet{1});
    CHECK(set_difference(b, a) == IndexSet{3, 7});
    CHECK(set_intersection(a, b) == IndexSet{2, 4});
    CHECK(is_subset(IndexSet{2, 4}, a));
    CHECK_FALSE(is_subset(IndexSet{2, 3}, a));
    CHECK(is_subset(IndexSet{}, a));
    CHECK(contains(b, 7));
    CHECK_FALSE(contains(b, 5));
}

TEST_CASE("row and column selection keep the requested order") {
    Matrix x(3, 3);
    x << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    const std::vector<int> cols{2, 0};
    const Matrix c = select_columns(x, cols);
    CHECK(c.cols() == 2);
    CHECK(c(0, 0) == 3);
    CHECK(c(2, 1) == 7);
    const std::vector<int> rows{1};
    const Matrix r = select_rows(x, rows);
    CHECK(r.rows() == 1);
    CHECK(r(0, 2) == 6);
    Vector y(3);
    y << 10, 20, 30;
    const std::vector<int> picks{2, 2, 0};
    CHECK(select_rows(y, picks) == Vector{{30.0, 30.0, 10.0}});
}

TEST_CASE("sigma mode") {
    CHECK(SigmaMode::known_value(2.0).is_known());
    CHECK(*SigmaMode::known_value(2.0).known == 2.0);
    CHECK_FALSE(SigmaMode::estimate().is_known());
    CHECK(SigmaMode::estimate().describe() != SigmaMode::known_value(1.0).describe());
}

TEST_CASE("error kinds") {
    CHECK(ParseError("bad", 2, 3).kind() == ErrorKind::Data);
    CHECK(BudgetExceeded(10, 5).kind() == ErrorKind::Budget);
    CHECK(BudgetExceeded(10, 5).required() == 10);
    CHECK(RankDeficient(2, 3).kind() == ErrorKind::Numerical);
    CHECK(OverlappingSets().kind() == ErrorKind::Config);
    const std::string msg = ConvergenceError("lasso", 3.5e-4).what();
    CHECK(msg.find("3.500e-04") != std::string::npos);
}
