#include "coxred/errors.hpp"
#include "coxred/hypercube.hpp"
#include "coxred/simulation.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

using namespace coxred;
using namespace coxred::hypercube;

namespace {

IndexSet iota_set(int n) {
    IndexSet s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 0);
    return s;
}

}  // namespace

TEST_CASE("shape selection") {
    CHECK(choose_shape(1000, 3).side == 10);
    CHECK(choose_shape(2, 2).side == 2);
    CHECK(choose_shape(126, 3).side == 6);
    CHECK(choose_shape(125, 3).side == 5);
    CHECK(choose_shape(10, 2).side == 4);
}

TEST_CASE("randomised arrangements") {
    const auto a = randomise(iota_set(20), 3, 3, 99);
    const auto b = randomise(iota_set(20), 3, 3, 99);
    CHECK(a == b);
    CHECK(a.cells() == b.cells());
    CHECK_FALSE(a == randomise(iota_set(20), 3, 3, 100));
    CHECK(a.size() == 20);
    CHECK(std::count(a.cells().begin(), a.cells().end(), Arrangement::kEmpty) == 7);
    for (int i = 0; i < 20; ++i) CHECK(a.at(static_cast<std::size_t>(a.cell_of(i))) == i);
    CHECK(a.cell_of(20) == -1);

    const auto full = randomise(iota_set(27), 3, 3, 1);
    CHECK(std::count(full.cells().begin(), full.cells().end(), Arrangement::kEmpty) == 0);

    CHECK_THROWS_AS(randomise(iota_set(28), 3, 3, 1), Overflow);
}

TEST_CASE("each index lands in each cell uniformly") {
    const int seeds = 10000;
    std::vector<std::vector<int>> hits(27, std::vector<int>(27, 0));
    for (int s = 0; s < seeds; ++s) {
        const auto a = randomise(iota_set(27), 3, 3, derive_seed(5, static_cast<std::uint64_t>(s), "cells"));
        for (std::size_t c = 0; c < 27; ++c) ++hits[static_cast<std::size_t>(a.at(c))][c];
    }
    const double p = 1.0 / 27.0;
    const double se = std::sqrt(p * (1 - p) / seeds);
    int outside = 0;
    for (const auto& row : hits)
        for (int h : row)
            if (std::abs(h / static_cast<double>(seeds) - p) > 3.0 * se) ++outside;
    // 729 cells at a 3-SE band: a handful of exceedances is expected
    CHECK(outside <= 10);
}

TEST_CASE("fibres cover every index once per axis") {
    SUBCASE("full cube") {
        const auto a = randomise(iota_set(1000), 3, 10, 4);
        const auto f = fibres(a);
        CHECK(f.size() == 300);
        for (const auto& fb : f) CHECK(fb.members.size() == 10);
    }
    SUBCASE("sparse square") {
        const auto a = randomise(iota_set(5), 2, 4, 8);
        const auto f = fibres(a);
        // enumerate anchors by hand
        std::size_t expected = 0;
        for (int axis = 0; axis < 2; ++axis)
            for (int anchor = 0; anchor < 4; ++anchor) {
                bool any = false;
                for (int t = 0; t < 4; ++t) {
                    const int cell = axis == 0 ? t + 4 * anchor : anchor + 4 * t;
                    any = any || a.at(static_cast<std::size_t>(cell)) != Arrangement::kEmpty;
                }
                expected += any ? 1 : 0;
            }
        CHECK(f.size() == expected);
        for (const auto& fb : f) {
            CHECK(fb.members.size() >= 1);
            CHECK(fb.members.size() <= 4);
        }
    }
    SUBCASE("count per index equals dims") {
        for (int dims : {2, 3, 4}) {
            const auto a = randomise(iota_set(30), dims, choose_shape(30, dims).side, 17);
            std::map<int, int> count;
            for (const auto& fb : fibres(a))
                for (int idx : fb.members) ++count[idx];
            CHECK(count.size() == 30);
            for (const auto& [idx, c] : count) CHECK(c == dims);
        }
    }
}

TEST_CASE("arrangement records round-trip") {
    const auto a = randomise(IndexSet{3, 8, 11, 40}, 2, 3, 1234567890123ull);
    const auto b = arrangement_from_record(arrangement_record(a));
    CHECK(a == b);
    CHECK(b.seed() == 1234567890123ull);
}

TEST_CASE("pairing near-collinear columns") {
    Rng rng(2);
    SUBCASE("duplicate column") {
        Matrix x = testutil::centred_gaussian(50, 5, rng);
        x.col(3) = x.col(1);
        const auto g = pair_collinear(x, 0.97);
        CHECK(g.multi_member_groups() == 1);
        CHECK(g.representative[3] == 1);
        CHECK(g.representatives() == IndexSet{0, 1, 2, 4});
        CHECK(unpair(IndexSet{1, 4}, g) == IndexSet{1, 3, 4});
        CHECK(unpair(IndexSet{0, 4}, g) == IndexSet{0, 4});
    }
    SUBCASE("independent columns stay single") {
        const Matrix x = testutil::centred_gaussian(200, 6, rng);
        const auto g = pair_collinear(x, 0.97);
        CHECK(g.multi_member_groups() == 0);
        CHECK(unpair(IndexSet{0, 2, 5}, g) == IndexSet{0, 2, 5});
    }
    SUBCASE("chain closes transitively") {
        // x2 = x1 + a e, x3 = x2 + a f with e, f orthogonal to x1 and each other
        const Matrix base = linalg::orthonormal_basis(testutil::centred_gaussian(100, 3, rng));
        const double a = 0.18;
        Matrix x(100, 4);
        x.col(0) = base.col(0);
        x.col(1) = base.col(0) + a * base.col(1);
        x.col(2) = x.col(1) + a * base.col(2);
        x.col(3) = linalg::orthonormal_basis(testutil::centred_gaussian(100, 1, rng)).col(0);
        const double c01 = linalg::corr(x.col(0), x.col(1));
        const double c12 = linalg::corr(x.col(1), x.col(2));
        const double c02 = linalg::corr(x.col(0), x.col(2));
        REQUIRE(c01 >= 0.98);
        REQUIRE(c12 >= 0.98);
        REQUIRE(c02 < 0.97);
        const auto g = pair_collinear(x, 0.97);
        CHECK(g.representative[2] == 0);
        CHECK(g.representative[3] == 3);
        CHECK(unpair(IndexSet{0}, g) == IndexSet{0, 1, 2});
    }
    CHECK_THROWS_AS(pair_collinear(Matrix::Zero(5, 2), 1.0), DomainError);
}

TEST_CASE("companion counts match their expectation") {
    struct Case {
        int marked, side, dims;
        double closed;
    };
    for (const auto& c : {Case{1, 4, 2, 0.0}, Case{6, 4, 2, 2.0}, Case{8, 3, 3, 21.0 / 13.0}, Case{5, 5, 3, 0.0}}) {
        const double expected = simulation::expected_companions(c.marked, c.side, c.dims);
        if (c.closed > 0.0 || c.marked == 1) CHECK(expected == doctest::Approx(c.closed).epsilon(1e-12));
        if (c.dims == 2) CHECK(expected == doctest::Approx(2.0 * (c.marked - 1) / (c.side + 1.0)).epsilon(1e-12));
        if (c.dims == 3)
            CHECK(expected == doctest::Approx(3.0 * (c.marked - 1) / (c.side * c.side + c.side + 1.0)).epsilon(1e-12));

        const int draws = 100000;
        double sum = 0, sum2 = 0;
        const IndexSet marked = iota_set(c.marked);
        for (int s = 0; s < draws; ++s) {
            const auto a = randomise(marked, c.dims, c.side, derive_seed(11, static_cast<std::uint64_t>(s), "comp"));
            const double v = a.companions(0, marked);
            sum += v;
            sum2 += v * v;
        }
        const double mean = sum / draws;
        const double se = std::sqrt(std::max(sum2 / draws - mean * mean, 0.0) / draws);
        CHECK(std::abs(mean - expected) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("alone-in-two-fibres event for three marked indices, by exhaustive placement") {
    // every ordered placement of three marked indices in a k^3 cube
    for (int k : {2, 3}) {
        const int cells = k * k * k;
        long good = 0, total = 0;
        for (int c0 = 0; c0 < cells; ++c0)
            for (int c1 = 0; c1 < cells; ++c1)
                for (int c2 = 0; c2 < cells; ++c2) {
                    if (c0 == c1 || c0 == c2 || c1 == c2) continue;
                    std::vector<int> layout(static_cast<std::size_t>(cells), Arrangement::kEmpty);
                    layout[static_cast<std::size_t>(c0)] = 0;
                    layout[static_cast<std::size_t>(c1)] = 1;
                    layout[static_cast<std::size_t>(c2)] = 2;
                    const Arrangement a(3, k, 0, layout);
                    bool ok = true;
                    for (int i = 0; i < 3; ++i) ok = ok && a.accompanied_fibres(i, {0, 1, 2}) <= 1;
                    good += ok ? 1 : 0;
                    ++total;
                }
        const double exact = static_cast<double>(good) / static_cast<double>(total);
        // with three marked indices only the union bound over (centre, pair) is exact
        CHECK(exact == doctest::Approx(simulation::retention_union_bound(3, k)).epsilon(1e-12));
        CHECK(exact < simulation::retention_bound(3, k));
    }
    CHECK(simulation::retention_bound(2, 7) == 1.0);
    CHECK(simulation::retention_bound(10, 10) == doctest::Approx(1.0 - 58320.0 / 997002.0).epsilon(1e-12));
    CHECK(std::abs(simulation::retention_bound(10, 10) - 0.94150) < 5e-6);
}

TEST_CASE("two marked indices are never accompanied in two fibres") {
    const IndexSet marked{0, 1};
    for (int s = 0; s < 2000; ++s) {
        const auto a = randomise(marked, 3, 4, static_cast<std::uint64_t>(s));
        CHECK(a.accompanied_fibres(0, marked) <= 1);
    }
}
