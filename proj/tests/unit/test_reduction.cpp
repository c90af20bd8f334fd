#include "coxred/distributions.hpp"
#include "coxred/errors.hpp"
#include "coxred/reduction.hpp"
#include "coxred/simulation.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>

using namespace coxred;
using namespace coxred::reduction;
using hypercube::Arrangement;

namespace {

IndexSet iota_set(int n) {
    IndexSet s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 0);
    return s;
}

// Straight-line oracle: walk every line of the lattice, fit it by normal
// equations and apply the retention predicate as written.
IndexSet oracle_round(const Vector& y, const Matrix& x, const Arrangement& a, const ReductionConfig& cfg, bool first) {
    const int d = a.dims(), k = a.side();
    std::map<int, int> events;
    const int lines = static_cast<int>(a.cell_count()) / k;
    for (int axis = 0; axis < d; ++axis) {
        int stride = 1;
        for (int i = 0; i < axis; ++i) stride *= k;
        for (int cell = 0; cell < static_cast<int>(a.cell_count()); ++cell) {
            if ((cell / stride) % k != 0) continue;  // line start on this axis
            std::vector<int> members;
            for (int t = 0; t < k; ++t) {
                const int v = a.at(static_cast<std::size_t>(cell + t * stride));
                if (v != Arrangement::kEmpty) members.push_back(v);
            }
            if (members.empty()) continue;
            if (first && members.size() == 1) {
                ++events[members[0]];
                continue;
            }
            const Matrix xk = select_columns(x, members);
            const Matrix inv = (xk.transpose() * xk).inverse();
            const Vector theta = inv * (xk.transpose() * y);
            const double n = static_cast<double>(y.size());
            const double kk = static_cast<double>(members.size());
            const double sigma = cfg.sigma.is_known() || first
                                     ? (first ? 1.0 : *cfg.sigma.known)
                                     : (y - xk * theta).norm() / std::sqrt(n - kk);
            std::vector<double> t(members.size());
            for (std::size_t i = 0; i < members.size(); ++i)
                t[i] = theta(static_cast<Eigen::Index>(i)) / (sigma * std::sqrt(inv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i))));
            for (std::size_t i = 0; i < members.size(); ++i) {
                bool event;
                if (first) {
                    int larger = 0;
                    for (std::size_t j = 0; j < members.size(); ++j) larger += std::fabs(t[j]) > std::fabs(t[i]) ? 1 : 0;
                    event = larger < cfg.top_m;
                } else {
                    const double pv = cfg.sigma.is_known() ? std::erfc(std::fabs(t[i]) / std::sqrt(2.0))
                                                           : stats::student_t_tail_pvalue(t[i], n - kk);
                    event = pv <= cfg.alpha;
                }
                if (event) ++events[members[i]];
            }
        }
        (void)lines;
    }
    const int needed = first ? cfg.fibre_votes_round1 : (d + 1) / 2;
    IndexSet out;
    for (const auto& [idx, c] : events)
        if (c >= needed) out.push_back(idx);
    return out;
}

struct Instance {
    Vector y;
    Matrix x;
};

Instance planted(std::size_t n, std::size_t p, std::size_t s, double signal, std::uint64_t seed) {
    const auto d = simulation::generate(simulation::GenSpec::sparse(n, p, s, signal, 1.0, simulation::CovariateLaw::iid(), seed));
    return {d.y, d.x};
}

}  // namespace

TEST_CASE("configuration checks") {
    ReductionConfig c;
    CHECK_NOTHROW(c.validate());
    auto bad = c;
    bad.alpha = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.subsample_fraction = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.rerandomisations = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.top_m = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = c;
    bad.sigma = SigmaMode::known_value(-1.0);
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("sample split") {
    const auto s = split_sample(100, 0.35, 3);
    CHECK(s.first.size() == 35);
    CHECK(s.second.size() == 65);
    CHECK(set_intersection(s.first, s.second).empty());
    CHECK(set_union(s.first, s.second) == iota_set(100));
    const auto again = split_sample(100, 0.35, 3);
    CHECK(again.first == s.first);
    CHECK(split_sample(100, 0.35, 4).first != s.first);
    CHECK_THROWS_AS(split_sample(5, 0.1, 1), TooSmall);
    CHECK_THROWS_AS(split_sample(5, 0.9, 1), TooSmall);
}

TEST_CASE("round 1 keeps a planted signal") {
    Rng rng(1);
    const Matrix x = linalg::orthonormal_basis(testutil::centred_gaussian(60, 27, rng)) * std::sqrt(60.0);
    const Vector y = x.col(5) + 1e-3 * testutil::centred_gaussian(60, rng);
    ReductionConfig cfg;
    const auto a = hypercube::randomise(iota_set(27), 3, 3, 77);
    const auto r = round1(y, x, a, cfg);
    CHECK(contains(r.retained, 5));
    CHECK(r.retained == oracle_round(y, x, a, cfg, true));
    CHECK(r.fibres == 27);
}

TEST_CASE("round 1 needs two fibre events") {
    // x0 dominates fibres through it; variables sharing exactly one fibre with
    // a strong companion lose that fibre only
    Rng rng(2);
    const Matrix x = testutil::centred_gaussian(80, 9, rng);
    const Vector y = 5.0 * x.col(0) + 5.0 * x.col(1) + 0.1 * testutil::centred_gaussian(80, rng);
    std::vector<int> cells{0, 1, 2, 3, 4, 5, 6, 7, 8};  // rows {0,1,2} {3,4,5} {6,7,8}
    const Arrangement a(2, 3, 0, cells);
    ReductionConfig cfg;
    cfg.dims_round1 = 2;
    const auto r = round1(y, x, a, cfg);
    // index 2 is top-2 in its column only if it beats 5 and 8 there, and never in its row
    CHECK(r.retained == oracle_round(y, x, a, cfg, true));
    CHECK(contains(r.retained, 0));
    CHECK(contains(r.retained, 1));
    CHECK_FALSE(contains(r.retained, 2));
}

TEST_CASE("two-member fibres keep everyone") {
    Rng rng(3);
    const Matrix x = testutil::centred_gaussian(40, 8, rng);
    const Vector y = testutil::centred_gaussian(40, rng);
    ReductionConfig cfg;
    const auto a = hypercube::randomise(iota_set(8), 3, 2, 5);
    CHECK(round1(y, x, a, cfg).retained == iota_set(8));
}

TEST_CASE("rounds agree with the straight-line oracle") {
    Rng rng(4);
    for (int rep = 0; rep < 50; ++rep) {
        const int p = 20 + static_cast<int>(rng.below(40));
        const Matrix x = testutil::centred_gaussian(70, p, rng);
        Vector y = testutil::centred_gaussian(70, rng);
        y += 0.8 * x.col(0) - 0.6 * x.col(1);
        ReductionConfig cfg;
        cfg.alpha = 0.05;
        cfg.sigma = rep % 2 ? SigmaMode::estimate() : SigmaMode::known_value(1.3);
        const int k1 = hypercube::choose_shape(static_cast<std::size_t>(p), 3).side;
        const auto a1 = hypercube::randomise(iota_set(p), 3, k1, static_cast<std::uint64_t>(rep));
        CHECK(round1(y, x, a1, cfg).retained == oracle_round(y, x, a1, cfg, true));
        const int k2 = hypercube::choose_shape(static_cast<std::size_t>(p), 2).side;
        const auto a2 = hypercube::randomise(iota_set(p), 2, k2, static_cast<std::uint64_t>(rep) + 1000);
        CHECK(round2(y, x, a2, cfg).retained == oracle_round(y, x, a2, cfg, false));
    }
}

TEST_CASE("round 2 significance") {
    Rng rng(5);
    const Matrix x = testutil::centred_gaussian(100, 9, rng);
    const Vector y = x.col(4) + 0.1 * testutil::centred_gaussian(100, rng);
    ReductionConfig cfg;
    cfg.alpha = 1e-4;
    const auto a = hypercube::randomise(iota_set(9), 2, 3, 2);
    const auto r = round2(y, x, a, cfg);
    CHECK(r.retained == IndexSet{4});
}

TEST_CASE("round 2 is monotone in alpha") {
    Rng rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix x = testutil::centred_gaussian(60, 25, rng);
        const Vector y = 0.3 * x.col(3) + testutil::centred_gaussian(60, rng);
        const auto a = hypercube::randomise(iota_set(25), 2, 5, static_cast<std::uint64_t>(rep));
        ReductionConfig lo, hi;
        lo.alpha = 0.01;
        hi.alpha = 0.2;
        CHECK(is_subset(round2(y, x, a, lo).retained, round2(y, x, a, hi).retained));
    }
}

TEST_CASE("rank-deficient fibres are skipped, not fatal") {
    Rng rng(7);
    Matrix x = testutil::centred_gaussian(30, 4, rng);
    x.col(1) = 2.0 * x.col(0);
    const Vector y = testutil::centred_gaussian(30, rng);
    const Arrangement a(2, 2, 0, {0, 1, 2, 3});  // row {0,1} is singular
    ReductionConfig cfg;
    cfg.dims_round1 = 2;
    cfg.fibre_votes_round1 = 2;
    const auto r = round1(y, x, a, cfg);
    CHECK(r.skipped_fibres == 1);
    CHECK_FALSE(contains(r.retained, 0));
    CHECK_FALSE(contains(r.retained, 1));
    CHECK(contains(r.retained, 2));
}

TEST_CASE("single run equals its unpaired round output") {
    const auto d = planted(200, 125, 4, 1.0, 11);
    ReductionConfig cfg;
    cfg.seed = 5;
    const auto out = cox_reduce(d.y, d.x, cfg);
    REQUIRE(out.runs.size() == 1);
    CHECK(out.vote_threshold == 1);
    CHECK(out.comprehensive == hypercube::unpair(out.runs[0].rounds.back().retained, out.pairing));
    CHECK(out.comprehensive == out.runs[0].retained);
    CHECK_FALSE(out.stability.applicable);
    CHECK(out.runs[0].rounds[0].subsample == "I");
    CHECK(out.runs[0].rounds[1].subsample == "Ic");

    // the trace regenerates the round-2 arrangement and its result
    const auto& r2 = out.runs[0].rounds[1];
    const Vector y2 = linalg::centre(select_rows(d.y, out.split.second)).values;
    const Matrix x2 = linalg::centre(select_rows(d.x, out.split.second)).values;
    const auto a2 = hypercube::randomise(r2.input, r2.dims, r2.side, r2.seed);
    CHECK(oracle_round(y2, x2, a2, cfg, false) == r2.retained);
}

TEST_CASE("majority vote over five runs") {
    const auto d = planted(200, 125, 4, 0.6, 12);
    ReductionConfig cfg;
    cfg.seed = 9;
    cfg.rerandomisations = 5;
    const auto out = cox_reduce(d.y, d.x, cfg);
    CHECK(out.vote_threshold == 3);
    std::map<int, int> votes;
    for (const auto& run : out.runs)
        for (int i : run.retained) ++votes[i];
    IndexSet expected;
    for (const auto& [i, c] : votes)
        if (c >= 3) expected.push_back(i);
    CHECK(out.comprehensive == expected);
    CHECK(out.stability.applicable);
}

TEST_CASE("reduction is deterministic across thread counts") {
    const auto d = planted(200, 125, 4, 1.0, 13);
    ReductionConfig cfg;
    cfg.seed = 21;
    cfg.rerandomisations = 4;
    cfg.keep_wald = true;
    cfg.threads = 1;
    const auto a = cox_reduce(d.y, d.x, cfg);
    cfg.threads = 6;
    const auto b = cox_reduce(d.y, d.x, cfg);
    CHECK(a.comprehensive == b.comprehensive);
    REQUIRE(a.runs.size() == b.runs.size());
    for (std::size_t r = 0; r < a.runs.size(); ++r) {
        REQUIRE(a.runs[r].rounds.size() == b.runs[r].rounds.size());
        for (std::size_t k = 0; k < a.runs[r].rounds.size(); ++k) {
            CHECK(a.runs[r].rounds[k].retained == b.runs[r].rounds[k].retained);
            const auto& da = a.runs[r].rounds[k].diagnostics;
            const auto& db = b.runs[r].rounds[k].diagnostics;
            REQUIRE(da.size() == db.size());
            for (std::size_t f = 0; f < da.size(); ++f) CHECK(da[f].wald == db[f].wald);
        }
    }
}

TEST_CASE("strong signals survive the reduction") {
    int covered = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        const auto d = simulation::generate(
            simulation::GenSpec::sparse(200, 125, 4, 1.0, 1.0, simulation::CovariateLaw::iid(), derive_seed(31, r, "data")));
        ReductionConfig cfg;
        cfg.rerandomisations = 5;
        cfg.seed = derive_seed(31, r, "reduce");
        covered += is_subset(d.support, cox_reduce(d.y, d.x, cfg).comprehensive) ? 1 : 0;
    }
    CHECK(covered >= 95);
}

TEST_CASE("duplicated columns come back together") {
    auto d = planted(200, 60, 3, 1.0, 14);
    d.x.col(40) = d.x.col(1);
    ReductionConfig cfg;
    cfg.seed = 3;
    const auto out = cox_reduce(d.y, d.x, cfg);
    CHECK(out.pairing.representative[40] == 1);
    REQUIRE(contains(out.comprehensive, 1));
    CHECK(contains(out.comprehensive, 40));
}

TEST_CASE("constant columns are kept out of the arrangement") {
    auto d = planted(120, 40, 2, 1.0, 15);
    d.x.col(7).setZero();
    ReductionConfig cfg;
    const auto out = cox_reduce(d.y, d.x, cfg);
    CHECK(out.excluded == IndexSet{7});
    CHECK_FALSE(contains(out.runs[0].rounds[0].input, 7));
}

TEST_CASE("stability report") {
    ReductionOutcome same;
    same.runs.resize(3);
    for (auto& r : same.runs) r.retained = {1, 2, 3};
    const auto s = stability_report(same);
    CHECK(s.applicable);
    CHECK(s.mean_jaccard == 1.0);
    CHECK_FALSE(s.fragile);
    CHECK(s.jaccard(0, 2) == 1.0);

    ReductionOutcome apart;
    apart.runs.resize(2);
    apart.runs[0].retained = {1, 2};
    apart.runs[1].retained = {3, 4};
    const auto t = stability_report(apart);
    CHECK(t.mean_jaccard == 0.0);
    CHECK(t.fragile);

    ReductionOutcome single;
    single.runs.resize(1);
    CHECK_FALSE(stability_report(single).applicable);
}

TEST_CASE("under the null no variable is retained most of the time") {
    const auto d = simulation::generate(simulation::GenSpec::sparse(200, 125, 0, 0.0, 1.0, simulation::CovariateLaw::iid(), 16));
    ReductionConfig cfg;
    cfg.rerandomisations = 10;
    cfg.seed = 17;
    const auto out = cox_reduce(d.y, d.x, cfg);
    double worst = 0.0;
    for (const auto& [idx, f] : out.stability.retention_frequency) worst = std::max(worst, f);
    CHECK(worst < 0.5);
    CHECK(out.comprehensive.empty());
}

TEST_CASE("rule names") {
    ReductionConfig cfg;
    CHECK(round1_rule_name(cfg).find("top-2") != std::string::npos);
    CHECK(round2_rule_name(cfg).find(">=1-of-2") != std::string::npos);
}
