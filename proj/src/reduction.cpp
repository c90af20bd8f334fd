#include "coxred/reduction.hpp"

#include "coxred/errors.hpp"
#include "coxred/linalg.hpp"
#include "coxred/parallel.hpp"
#include "coxred/regression_stats.hpp"
#include "coxred/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

namespace coxred::reduction {

using hypercube::Arrangement;
using hypercube::Fibre;

void ReductionConfig::validate() const {
    if (dims_round1 < 1 || dims_round2 < 1) throw ConfigError("arrangement dimensions must be at least 1");
    if (side_round1 < 0 || side_round1 == 1 || side_round2 < 0 || side_round2 == 1)
        throw ConfigError("arrangement side must be 0 (automatic) or at least 2");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (sigma.is_known() && !(*sigma.known > 0.0)) throw ConfigError("known sigma must be positive");
    if (!(pair_threshold > 0.0 && pair_threshold <= 1.0)) throw ConfigError("pair threshold must lie in (0, 1]");
    if (!(subsample_fraction > 0.0 && subsample_fraction < 1.0))
        throw ConfigError("subsample fraction must lie in (0, 1)");
    if (rerandomisations < 1) throw ConfigError("rerandomisations must be at least 1");
    if (!(vote_fraction > 0.0 && vote_fraction <= 1.0)) throw ConfigError("vote fraction must lie in (0, 1]");
    if (top_m < 1) throw ConfigError("top-m must be at least 1");
    if (fibre_votes_round1 < 1 || fibre_votes_round1 > dims_round1)
        throw ConfigError("round-1 fibre votes must lie in [1, dims_round1]");
    if (max_rounds < 2) throw ConfigError("at least two reduction rounds are required");
}

std::string round1_rule_name(const ReductionConfig& config) {
    return "round1: top-" + std::to_string(config.top_m) + "-in->=" + std::to_string(config.fibre_votes_round1) +
           "-of-" + std::to_string(config.dims_round1);
}

std::string round2_rule_name(const ReductionConfig& config) {
    const int need = (config.dims_round2 + 1) / 2;
    return "round2: significant-at-alpha-in->=" + std::to_string(need) + "-of-" + std::to_string(config.dims_round2);
}

namespace {

enum class Rule { TopM, Significance };

RoundResult run_round(const Vector& y, const Matrix& x, const Arrangement& arrangement, const ReductionConfig& config,
                      Rule rule, unsigned threads) {
    const std::vector<Fibre> blocks = hypercube::fibres(arrangement);
    const int needed = rule == Rule::TopM ? config.fibre_votes_round1 : (arrangement.dims() + 1) / 2;
    // Ranking inside a fibre does not depend on sigma, so round 1 uses a unit sigma.
    const SigmaMode mode = rule == Rule::TopM ? SigmaMode::known_value(1.0) : config.sigma;

    // events[f] lists the members of fibre f that scored an event.
    std::vector<std::vector<int>> events(blocks.size());
    std::vector<FibreDiagnostic> diags(blocks.size());
    std::vector<char> skipped(blocks.size(), 0);

    parallel_for(blocks.size(), threads, [&](std::size_t f) {
        const Fibre& fibre = blocks[f];
        auto& diag = diags[f];
        diag.axis = fibre.axis;
        diag.members = fibre.members;
        if (rule == Rule::TopM && fibre.members.size() == 1) {
            events[f] = fibre.members;
            return;
        }
        stats::WaldVector t;
        try {
            t = stats::wald(y, select_columns(x, fibre.members), mode, fibre.members);
        } catch (const RankDeficient&) {
            skipped[f] = 1;
            diag.skipped = true;
            return;
        } catch (const DegenerateResidual&) {
            skipped[f] = 1;
            diag.skipped = true;
            return;
        }
        diag.wald.assign(t.values.data(), t.values.data() + t.values.size());
        if (rule == Rule::TopM) {
            std::vector<double> mags(diag.wald.size());
            std::transform(diag.wald.begin(), diag.wald.end(), mags.begin(), [](double v) { return std::fabs(v); });
            const auto m = static_cast<std::size_t>(config.top_m);
            double cut = 0.0;
            if (mags.size() > m) {
                std::vector<double> sorted = mags;
                std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m - 1), sorted.end(),
                                 std::greater<>());
                cut = sorted[m - 1];
            }
            for (std::size_t i = 0; i < mags.size(); ++i)
                if (mags.size() <= m || mags[i] >= cut) events[f].push_back(fibre.members[i]);
        } else {
            for (Eigen::Index i = 0; i < t.values.size(); ++i)
                if (t.pvalue(i) <= config.alpha) events[f].push_back(fibre.members[static_cast<std::size_t>(i)]);
        }
    });

    std::map<int, int> counts;
    for (const auto& ev : events)
        for (int idx : ev) ++counts[idx];
    RoundResult out;
    out.fibres = blocks.size();
    out.skipped_fibres = static_cast<std::size_t>(std::count(skipped.begin(), skipped.end(), 1));
    for (const auto& [idx, c] : counts)
        if (c >= needed) out.retained.push_back(idx);
    if (config.keep_wald) out.diagnostics = std::move(diags);
    return out;
}

void check_fibre_fit(std::size_t n, int side, const char* what) {
    if (static_cast<std::size_t>(side) >= n)
        throw ConfigError(std::string(what) + ": fibre size " + std::to_string(side) +
                          " needs more observations than the " + std::to_string(n) + " available");
}

}  // namespace

RoundResult round1(const Vector& y, const Matrix& x, const Arrangement& arrangement, const ReductionConfig& config) {
    config.validate();
    return run_round(y, x, arrangement, config, Rule::TopM, config.threads);
}

RoundResult round2(const Vector& y, const Matrix& x, const Arrangement& arrangement, const ReductionConfig& config) {
    config.validate();
    return run_round(y, x, arrangement, config, Rule::Significance, config.threads);
}

SampleSplit split_sample(std::size_t n, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("subsample fraction must lie in (0, 1)");
    const auto m = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (m < 2 || n < m + 2)
        throw TooSmall("sample split of " + std::to_string(n) + " observations leaves a part below 2");
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    rng.shuffle(order);
    SampleSplit out;
    out.first = make_index_set(std::vector<int>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m)));
    out.second = make_index_set(std::vector<int>(order.begin() + static_cast<std::ptrdiff_t>(m), order.end()));
    return out;
}

std::vector<IndexSet> ReductionOutcome::per_run_sets() const {
    std::vector<IndexSet> out;
    out.reserve(runs.size());
    for (const auto& r : runs) out.push_back(r.retained);
    return out;
}

StabilityReport stability_report(const ReductionOutcome& outcome) {
    StabilityReport rep;
    const auto sets = outcome.per_run_sets();
    const auto b = sets.size();
    std::map<int, int> counts;
    for (const auto& s : sets)
        for (int idx : s) ++counts[idx];
    for (const auto& [idx, c] : counts)
        rep.retention_frequency.emplace_back(idx, static_cast<double>(c) / static_cast<double>(b));
    rep.applicable = b >= 2;
    if (!rep.applicable) return rep;

    rep.jaccard = Matrix::Identity(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(b));
    double total = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
        for (std::size_t j = i + 1; j < b; ++j) {
            const auto inter = set_intersection(sets[i], sets[j]).size();
            const auto uni = set_union(sets[i], sets[j]).size();
            const double jac = uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
            rep.jaccard(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = jac;
            rep.jaccard(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = jac;
            total += jac;
        }
    }
    rep.mean_jaccard = total / static_cast<double>(b * (b - 1) / 2);
    rep.fragile = rep.mean_jaccard < 0.5;
    return rep;
}

ReductionOutcome cox_reduce(const Vector& y, const Matrix& x, const ReductionConfig& config) {
    config.validate();
    const auto n = static_cast<std::size_t>(x.rows());
    const auto p = static_cast<std::size_t>(x.cols());
    if (static_cast<std::size_t>(y.size()) != n) throw DataError("response length does not match design rows");

    ReductionOutcome out;
    out.split_seed = derive_seed(config.seed, 0, "split");
    out.split = split_sample(n, config.subsample_fraction, out.split_seed);

    std::vector<int> zero_cols;
    for (std::size_t j = 0; j < p; ++j)
        if (x.col(static_cast<Eigen::Index>(j)).norm() < 1e-300) zero_cols.push_back(static_cast<int>(j));
    out.excluded = make_index_set(zero_cols);
    out.pairing = config.pair_threshold < 1.0 ? hypercube::pair_collinear(x, config.pair_threshold)
                                              : hypercube::pair_collinear(x, std::nextafter(1.0, 0.0));
    const IndexSet arranged = set_difference(out.pairing.representatives(), out.excluded);

    // each half is re-centred so its fibre regressions carry an implicit intercept
    const Vector y_first = linalg::centre(select_rows(y, out.split.first)).values;
    const Matrix x_first = linalg::centre(select_rows(x, out.split.first)).values;
    const Vector y_second = linalg::centre(select_rows(y, out.split.second)).values;
    const Matrix x_second = linalg::centre(select_rows(x, out.split.second)).values;
    const std::size_t n_first = out.split.first.size();
    const std::size_t n_second = out.split.second.size();

    hypercube::Shape shape1 = hypercube::choose_shape(std::max<std::size_t>(arranged.size(), 2), config.dims_round1);
    if (config.side_round1 > 0) {
        const auto fixed = hypercube::choose_shape(arranged.size(), config.dims_round1);
        if (config.side_round1 < fixed.side)
            throw ConfigError("round-1 side " + std::to_string(config.side_round1) + " cannot hold " +
                              std::to_string(arranged.size()) + " variables");
        shape1.side = config.side_round1;
    }
    check_fibre_fit(n_first, shape1.side, "round 1");

    const bool parallel_runs = config.rerandomisations > 1;
    const unsigned inner_threads = parallel_runs ? 1u : config.threads;
    out.runs.resize(static_cast<std::size_t>(config.rerandomisations));

    parallel_for(out.runs.size(), parallel_runs ? config.threads : 1u, [&](std::size_t b) {
        RunTrace& run = out.runs[b];
        run.run = static_cast<int>(b);

        RoundTrace r1;
        r1.round = 1;
        r1.rule = round1_rule_name(config);
        r1.subsample = "I";
        r1.dims = shape1.dims;
        r1.side = shape1.side;
        r1.seed = derive_seed(config.seed, b, "round1");
        r1.input = arranged;
        const Arrangement a1 = hypercube::randomise(arranged, shape1.dims, shape1.side, r1.seed);
        RoundResult res1 = run_round(y_first, x_first, a1, config, Rule::TopM, inner_threads);
        r1.retained = res1.retained;
        r1.fibres = res1.fibres;
        r1.skipped_fibres = res1.skipped_fibres;
        r1.diagnostics = std::move(res1.diagnostics);
        run.round1_survivors = r1.retained;
        run.rounds.push_back(std::move(r1));

        IndexSet current = run.round1_survivors;
        for (int round = 2;; ++round) {
            const bool on_second = round % 2 == 0;
            const Vector& yr = on_second ? y_second : y_first;
            const Matrix& xr = on_second ? x_second : x_first;
            const std::size_t nr = on_second ? n_second : n_first;

            RoundTrace tr;
            tr.round = round;
            tr.rule = round2_rule_name(config);
            tr.subsample = on_second ? "Ic" : "I";
            tr.seed = derive_seed(config.seed, b, "round" + std::to_string(round));
            tr.input = current;
            tr.dims = config.dims_round2;
            if (!current.empty()) {
                auto shape = hypercube::choose_shape(std::max<std::size_t>(current.size(), 2), config.dims_round2);
                shape.side = std::max(shape.side, config.side_round2);
                tr.side = shape.side;
                check_fibre_fit(nr, shape.side, ("round " + std::to_string(round)).c_str());
                const Arrangement a = hypercube::randomise(current, shape.dims, shape.side, tr.seed);
                RoundResult res = run_round(yr, xr, a, config, Rule::Significance, inner_threads);
                tr.retained = res.retained;
                tr.fibres = res.fibres;
                tr.skipped_fibres = res.skipped_fibres;
                tr.diagnostics = std::move(res.diagnostics);
            }
            current = tr.retained;
            run.rounds.push_back(std::move(tr));
            // Survivors must fit in the assessment subsample before we stop.
            const std::size_t next_n = on_second ? n_first : n_second;
            if (current.size() < std::min(nr, next_n)) break;
            if (round >= config.max_rounds)
                throw Error(ErrorKind::Numerical, "reduction still retains " + std::to_string(current.size()) +
                                                      " variables after " + std::to_string(round) + " rounds");
        }
        run.retained = hypercube::unpair(current, out.pairing);
    });

    std::map<int, int> votes;
    for (const auto& run : out.runs)
        for (int idx : run.rounds.back().retained) ++votes[idx];
    out.vote_threshold =
        std::max(1, static_cast<int>(std::ceil(config.vote_fraction * config.rerandomisations - 1e-12)));
    IndexSet kept;
    for (const auto& [idx, c] : votes)
        if (c >= out.vote_threshold) kept.push_back(idx);
    out.comprehensive = hypercube::unpair(kept, out.pairing);
    out.stability = stability_report(out);
    return out;
}

}  // namespace coxred::reduction
