#include "coxred/simulation.hpp"

#include "coxred/comparators.hpp"
#include "coxred/confset.hpp"
#include "coxred/errors.hpp"
#include "coxred/linalg.hpp"
#include "coxred/parallel.hpp"
#include "coxred/regression_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace coxred::simulation {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    std::size_t count = 0;
};

// Sample mean and sd / sqrt(count), skipping NaN entries.
MeanSe mean_se(const std::vector<double>& values) {
    MeanSe out;
    double sum = 0.0;
    for (double v : values)
        if (!std::isnan(v)) {
            sum += v;
            ++out.count;
        }
    if (out.count == 0) return out;
    out.mean = sum / static_cast<double>(out.count);
    if (out.count < 2) return out;
    double ss = 0.0;
    for (double v : values)
        if (!std::isnan(v)) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(out.count - 1)) / std::sqrt(static_cast<double>(out.count));
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

Estimate within_band(std::string name, const MeanSe& m, double target) {
    Estimate e;
    e.name = std::move(name);
    e.value = m.mean;
    e.se = m.se;
    e.target = target;
    e.rule = "|estimate - target| <= 3*SE";
    e.pass = std::fabs(m.mean - target) <= 3.0 * m.se;
    return e;
}

Estimate at_least(std::string name, const MeanSe& m, double bound) {
    Estimate e;
    e.name = std::move(name);
    e.value = m.mean;
    e.se = m.se;
    e.target = bound;
    e.rule = "estimate >= target - 3*SE";
    e.pass = m.mean >= bound - 3.0 * m.se;
    return e;
}

Estimate recorded(std::string name, const MeanSe& m) {
    Estimate e;
    e.name = std::move(name);
    e.value = m.mean;
    e.se = m.se;
    e.target = kNaN;
    e.rule = "recorded";
    return e;
}

// Weight b solving p b^2 + 2 b = rho / (1 - rho), so that z_j + b sum(z) has
// common correlation rho; the result is rescaled to unit variance.
void add_common_factor(Matrix& x, Eigen::Index first, Eigen::Index count, double rho) {
    if (count < 2 || rho == 0.0) return;
    const double pc = static_cast<double>(count);
    const double t = rho / (1.0 - rho);
    const double b = (-1.0 + std::sqrt(1.0 + pc * t)) / pc;
    const double scale = 1.0 / std::sqrt(1.0 + t);
    auto block = x.middleCols(first, count);
    const Vector total = block.rowwise().sum();
    block = (block.colwise() + b * total) * scale;
}

void gate_on_generator(ExperimentReport& report, const CovariateLaw& law, std::size_t p, std::uint64_t seed) {
    const auto check = generator_self_test(law, p, derive_seed(seed, 0, "self-test"));
    for (auto e : check.estimates) {
        e.name = "self-test " + e.name;
        report.add(std::move(e));
    }
    if (!check.pass) report.notes.push_back("generator self-test failed; experiment skipped");
}

std::pair<Vector, Matrix> centred_rows(const Vector& y, const Matrix& x, const IndexSet& rows) {
    return {linalg::centre(select_rows(y, rows)).values, linalg::centre(select_rows(x, rows)).values};
}

}  // namespace

std::string CovariateLaw::describe() const {
    switch (kind) {
        case Kind::IidGaussian: return "iid-gaussian";
        case Kind::Equicorrelated: return "equicorrelated(" + fmt(rho) + ")";
        case Kind::Block: return "block(" + fmt(rho) + ", " + std::to_string(block_size) + ")";
        case Kind::Duplicated: {
            std::string s = "duplicated(";
            for (std::size_t g = 0; g < duplicate_groups.size(); ++g) {
                s += g ? ";" : "";
                for (std::size_t i = 0; i < duplicate_groups[g].size(); ++i)
                    s += (i ? "," : "") + std::to_string(duplicate_groups[g][i]);
            }
            return s + ")";
        }
    }
    return "unknown";
}

void ExperimentReport::add(Estimate e) {
    pass = pass && e.pass;
    estimates.push_back(std::move(e));
}

IndexSet GenSpec::support() const {
    IndexSet s;
    for (Eigen::Index j = 0; j < theta0.size(); ++j)
        if (theta0(j) != 0.0) s.push_back(static_cast<int>(j));
    return s;
}

void GenSpec::validate() const {
    if (n < 2) throw ConfigError("generator needs at least 2 observations");
    if (p < 1) throw ConfigError("generator needs at least 1 covariate");
    if (static_cast<std::size_t>(theta0.size()) != p) throw ConfigError("theta0 length differs from p");
    if (!(sigma >= 0.0)) throw ConfigError("noise sigma must be nonnegative");
    switch (law.kind) {
        case CovariateLaw::Kind::IidGaussian: break;
        case CovariateLaw::Kind::Equicorrelated:
            if (p > 1 && !(law.rho > -1.0 / static_cast<double>(p - 1) && law.rho < 1.0))
                throw DomainError("equicorrelation " + fmt(law.rho) + " outside (-1/(p-1), 1)");
            break;
        case CovariateLaw::Kind::Block:
            if (law.block_size < 1) throw ConfigError("block size must be positive");
            if (law.block_size > 1 &&
                !(law.rho > -1.0 / static_cast<double>(law.block_size - 1) && law.rho < 1.0))
                throw DomainError("block correlation " + fmt(law.rho) + " outside (-1/(size-1), 1)");
            break;
        case CovariateLaw::Kind::Duplicated:
            for (const auto& g : law.duplicate_groups) {
                if (g.size() < 2) throw ConfigError("duplicate group needs at least 2 columns");
                for (int j : g)
                    if (j < 0 || static_cast<std::size_t>(j) >= p)
                        throw ConfigError("duplicate column " + std::to_string(j) + " out of range");
            }
            break;
    }
}

GenSpec GenSpec::sparse(std::size_t n, std::size_t p, std::size_t s, double value, double sigma, CovariateLaw law,
                        std::uint64_t seed) {
    if (s > p) throw ConfigError("support larger than p");
    GenSpec g;
    g.n = n;
    g.p = p;
    g.theta0 = Vector::Zero(static_cast<Eigen::Index>(p));
    g.theta0.head(static_cast<Eigen::Index>(s)).setConstant(value);
    g.sigma = sigma;
    g.law = std::move(law);
    g.seed = seed;
    return g;
}

Matrix draw_covariates(std::size_t n, std::size_t p, const CovariateLaw& law, Rng& rng) {
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(p);
    Matrix x(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) x(i, j) = rng.normal();
    switch (law.kind) {
        case CovariateLaw::Kind::IidGaussian: break;
        case CovariateLaw::Kind::Equicorrelated: add_common_factor(x, 0, cols, law.rho); break;
        case CovariateLaw::Kind::Block: {
            const auto size = static_cast<Eigen::Index>(law.block_size);
            for (Eigen::Index first = 0; first < cols; first += size)
                add_common_factor(x, first, std::min(size, cols - first), law.rho);
            break;
        }
        case CovariateLaw::Kind::Duplicated:
            for (const auto& g : law.duplicate_groups)
                for (std::size_t i = 1; i < g.size(); ++i) x.col(g[i]) = x.col(g[0]);
            break;
    }
    return x;
}

SimData generate(const GenSpec& spec) {
    spec.validate();
    Rng cov_rng(derive_seed(spec.seed, 0, "covariates"));
    Rng noise_rng(derive_seed(spec.seed, 0, "noise"));
    SimData d;
    d.x = linalg::centre(draw_covariates(spec.n, spec.p, spec.law, cov_rng)).values;
    Vector eps(static_cast<Eigen::Index>(spec.n));
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = noise_rng.normal();
    eps.array() -= eps.mean();
    d.y = d.x * spec.theta0 + spec.sigma * eps;
    d.theta0 = spec.theta0;
    d.support = spec.support();
    return d;
}

ExperimentReport generator_self_test(const CovariateLaw& law, std::size_t p, std::uint64_t seed) {
    constexpr std::size_t kRows = 10'000;
    constexpr std::size_t kBatches = 20;
    std::size_t cols = std::min<std::size_t>(p, std::max<std::size_t>(40, 2 * law.block_size));
    if (law.kind == CovariateLaw::Kind::Duplicated) cols = p;

    ExperimentReport rep;
    rep.name = "generator self-test " + law.describe();
    rep.replicates = kBatches;
    rep.seed = seed;
    rep.parameters = {{"rows", static_cast<double>(kRows)}, {"columns", static_cast<double>(cols)}};

    GenSpec check;
    check.n = kRows;
    check.p = cols;
    check.theta0 = Vector::Zero(static_cast<Eigen::Index>(cols));
    check.law = law;
    check.validate();

    Rng rng(seed);
    const Matrix x = draw_covariates(kRows, cols, law, rng);

    // pairs grouped by target correlation
    std::vector<int> group(cols, 0);
    if (law.kind == CovariateLaw::Kind::Block)
        for (std::size_t j = 0; j < cols; ++j) group[j] = static_cast<int>(j / law.block_size);
    std::vector<int> dup_of(cols, -1);
    if (law.kind == CovariateLaw::Kind::Duplicated)
        for (std::size_t g = 0; g < law.duplicate_groups.size(); ++g)
            for (int j : law.duplicate_groups[g]) dup_of[static_cast<std::size_t>(j)] = static_cast<int>(g);
    const double within_target = law.kind == CovariateLaw::Kind::Equicorrelated || law.kind == CovariateLaw::Kind::Block
                                     ? law.rho
                                     : 0.0;

    std::vector<double> means, variances, within, duplicate_gap;
    const auto batch_rows = static_cast<Eigen::Index>(kRows / kBatches);
    for (std::size_t b = 0; b < kBatches; ++b) {
        const Matrix block = x.middleRows(static_cast<Eigen::Index>(b) * batch_rows, batch_rows);
        const Vector mu = block.colwise().mean().transpose();
        const Matrix c = block.rowwise() - mu.transpose();
        const Matrix cov = c.transpose() * c / static_cast<double>(batch_rows - 1);
        means.push_back(mu.mean());
        variances.push_back(cov.diagonal().mean());
        double sum = 0.0, gap = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < cols; ++i)
            for (std::size_t j = i + 1; j < cols; ++j) {
                const double r = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
                                 std::sqrt(cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) *
                                           cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
                if (dup_of[i] >= 0 && dup_of[i] == dup_of[j]) {
                    gap = std::max(gap, std::fabs(r - 1.0));
                } else if (group[i] == group[j]) {
                    sum += r;
                    ++count;
                }
            }
        within.push_back(count ? sum / static_cast<double>(count) : 0.0);
        duplicate_gap.push_back(gap);
    }
    rep.add(within_band("column mean", mean_se(means), 0.0));
    rep.add(within_band("column variance", mean_se(variances), 1.0));
    rep.add(within_band("mean within-group correlation", mean_se(within), within_target));
    if (law.kind == CovariateLaw::Kind::Duplicated) {
        Estimate e;
        e.name = "duplicate correlation gap";
        e.value = *std::max_element(duplicate_gap.begin(), duplicate_gap.end());
        e.rule = "estimate <= 1e-12";
        e.pass = e.value <= 1e-12;
        rep.add(std::move(e));
    }
    return rep;
}

double expected_companions(int marked, int side, int dims) {
    if (marked < 1 || side < 2 || dims < 1) throw ConfigError("companion count needs marked >= 1, side >= 2, dims >= 1");
    const double cells = std::pow(static_cast<double>(side), dims);
    return dims * static_cast<double>(marked - 1) * static_cast<double>(side - 1) / (cells - 1.0);
}

ExperimentReport companion_experiment(const CompanionConfig& cfg) {
    const double target = expected_companions(cfg.marked, cfg.side, cfg.dims);
    ExperimentReport rep;
    rep.name = "companion mean";
    rep.replicates = cfg.arrangements;
    rep.seed = cfg.seed;
    rep.parameters = {{"marked", cfg.marked},
                      {"side", cfg.side},
                      {"dims", cfg.dims},
                      {"arrangements", static_cast<double>(cfg.arrangements)}};
    IndexSet marked(static_cast<std::size_t>(cfg.marked));
    std::iota(marked.begin(), marked.end(), 0);
    std::vector<double> counts(cfg.arrangements);
    for (std::size_t r = 0; r < cfg.arrangements; ++r) {
        const auto a = hypercube::randomise(marked, cfg.dims, cfg.side, derive_seed(cfg.seed, r, "arrangement"));
        counts[r] = a.companions(0, marked);
    }
    rep.add(within_band("mean companions of index 0", mean_se(counts), target));
    return rep;
}

double retention_bound(int marked, int side) {
    if (marked < 1 || side < 2) throw ConfigError("retention bound needs marked >= 1 and side >= 2");
    const double a = marked;
    const double k = side;
    const double cells = k * k * k;
    return 1.0 - a * (a - 1.0) * (a - 2.0) * (k - 1.0) * (k - 1.0) / ((cells - 1.0) * (cells - 2.0));
}

double retention_union_bound(int marked, int side) { return 1.0 - 3.0 * (1.0 - retention_bound(marked, side)); }

ExperimentReport retention_probability_experiment(const RetentionConfig& cfg) {
    const double bound = retention_bound(cfg.marked, cfg.side);
    const auto cells = static_cast<std::size_t>(cfg.side) * static_cast<std::size_t>(cfg.side) *
                       static_cast<std::size_t>(cfg.side);
    if (static_cast<std::size_t>(cfg.marked) > cells) throw ConfigError("more marked indices than cells");
    ExperimentReport rep;
    rep.name = "first-round retention";
    rep.replicates = cfg.arrangements;
    rep.seed = cfg.seed;
    rep.parameters = {{"marked", cfg.marked},
                      {"side", cfg.side},
                      {"bound", bound},
                      {"union_bound", retention_union_bound(cfg.marked, cfg.side)},
                      {"arrangements", static_cast<double>(cfg.arrangements)},
                      {"full_replicates", static_cast<double>(cfg.full_replicates)}};

    IndexSet marked(static_cast<std::size_t>(cfg.marked));
    std::iota(marked.begin(), marked.end(), 0);
    std::vector<double> event(cfg.arrangements);
    for (std::size_t r = 0; r < cfg.arrangements; ++r) {
        const auto a = hypercube::randomise(marked, 3, cfg.side, derive_seed(cfg.seed, r, "combinatorial"));
        bool all_alone = true;
        for (int m : marked)
            if (a.accompanied_fibres(m, marked) > 1) {
                all_alone = false;
                break;
            }
        event[r] = all_alone ? 1.0 : 0.0;
    }
    const auto g = mean_se(event);
    rep.add(at_least("P(every marked index alone in >= 2 fibres)", g, bound));
    auto corrected = at_least("P(every marked index alone in >= 2 fibres), union bound", g,
                              retention_union_bound(cfg.marked, cfg.side));
    corrected.rule += " (informational)";
    rep.estimates.push_back(std::move(corrected));

    if (cfg.full_replicates == 0) return rep;

    // One fixed data set; only the arrangement is redrawn.
    Rng rng(derive_seed(cfg.seed, 0, "data"));
    const auto n = cfg.n;
    const auto p = cells;
    const auto na = static_cast<Eigen::Index>(cfg.marked);
    Matrix raw(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    raw.leftCols(na) = draw_covariates(n, static_cast<std::size_t>(cfg.marked),
                                       CovariateLaw::equicorrelated(cfg.rho_marked), rng);
    raw.rightCols(static_cast<Eigen::Index>(p) - na) =
        draw_covariates(n, p - static_cast<std::size_t>(cfg.marked), CovariateLaw::iid(), rng);
    Vector eps(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps(i) = rng.normal();
    const Matrix x = linalg::centre(raw).values;
    const Vector y = linalg::centre(Vector(x.leftCols(na).rowwise().sum() + cfg.sigma * eps)).values;

    double min_r = std::numeric_limits<double>::infinity();
    for (Eigen::Index a = 0; a < na; ++a) min_r = std::min(min_r, std::fabs(linalg::corr(y, x.col(a))));
    rep.parameters.emplace_back("min |R(Y, x_a)|", min_r);
    rep.parameters.emplace_back("n", static_cast<double>(n));

    reduction::ReductionConfig rc;
    rc.sigma = SigmaMode::known_value(1.0);
    IndexSet all(p);
    std::iota(all.begin(), all.end(), 0);
    std::vector<double> retained(cfg.full_replicates);
    parallel_for(cfg.full_replicates, cfg.threads, [&](std::size_t r) {
        const auto a = hypercube::randomise(all, 3, cfg.side, derive_seed(cfg.seed, r, "arrangement"));
        const auto result = reduction::round1(y, x, a, rc);
        retained[r] = is_subset(marked, result.retained) ? 1.0 : 0.0;
    });
    rep.add(at_least("P(all marked retained after round 1)", mean_se(retained), bound));
    return rep;
}

double sweep_spurious_correlation(const Vector& y, const Matrix& x, const IndexSet& pseudo_signal,
                                  const hypercube::Arrangement& arrangement) {
    double best = 0.0;
    for (const auto& f : hypercube::fibres(arrangement)) {
        const IndexSet members = make_index_set(f.members);
        const IndexSet in_a = set_intersection(members, pseudo_signal);
        const IndexSet in_b = set_difference(members, pseudo_signal);
        if (in_b.empty()) continue;
        const Matrix xb = select_columns(x, in_b);
        const double ry = linalg::multiple_corr(y, xb);
        best = std::max(best, ry * ry);
        for (int a : in_a) {
            const double ra = linalg::multiple_corr(x.col(a), xb);
            best = std::max(best, ra * ra);
        }
    }
    return best;
}

ExperimentReport spurious_correlation_experiment(const SpuriousConfig& cfg) {
    if (cfg.n_grid.empty()) throw ConfigError("spurious-correlation grid is empty");
    if (cfg.replicates < 2) throw ConfigError("at least 2 replicates are needed");
    const std::size_t p = cfg.pseudo_signals + cfg.p_noise;
    if (cfg.p_noise < 1) throw ConfigError("at least one noise column is needed");
    const int side = cfg.side > 0 ? cfg.side : hypercube::choose_shape(p, 3).side;
    if (side > 10) throw ConfigError("cube side " + std::to_string(side) + " exceeds 10");
    const double ratio_bound = cfg.ratio_bound > 0.0 ? cfg.ratio_bound : 2.0 * side;

    ExperimentReport rep;
    rep.name = "spurious correlation";
    rep.replicates = cfg.replicates;
    rep.seed = cfg.seed;
    rep.parameters = {{"p_noise", static_cast<double>(cfg.p_noise)},
                      {"pseudo_signals", static_cast<double>(cfg.pseudo_signals)},
                      {"side", side},
                      {"ratio_bound", ratio_bound}};
    rep.notes.push_back("estimate is the maximum over fibres met in one randomised cube sweep, a lower bound on the "
                        "maximum over all fibre-sized subsets");
    rep.table_header = {"n", "replicate", "delta1"};

    IndexSet pseudo(cfg.pseudo_signals);
    std::iota(pseudo.begin(), pseudo.end(), 0);
    IndexSet all(p);
    std::iota(all.begin(), all.end(), 0);

    const std::size_t total = cfg.n_grid.size() * cfg.replicates;
    std::vector<double> delta(total);
    parallel_for(total, cfg.threads, [&](std::size_t job) {
        const std::size_t n = cfg.n_grid[job / cfg.replicates];
        Rng rng(derive_seed(cfg.seed, job, "spurious"));
        Vector y(static_cast<Eigen::Index>(n));
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = rng.normal();
        Matrix x = draw_covariates(n, p, CovariateLaw::iid(), rng);
        for (std::size_t a = 0; a < cfg.pseudo_signals; ++a) x.col(static_cast<Eigen::Index>(a)) += y;
        const Vector yc = linalg::centre(y).values;
        const Matrix xc = linalg::centre(x).values;
        const auto arr = hypercube::randomise(all, 3, side, derive_seed(cfg.seed, job, "arrangement"));
        delta[job] = sweep_spurious_correlation(yc, xc, pseudo, arr);
    });

    std::vector<double> means;
    bool ratio_ok = true;
    double worst_ratio = 0.0;
    const double log_b = std::log(static_cast<double>(cfg.p_noise));
    for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
        const std::size_t n = cfg.n_grid[g];
        std::vector<double> slice(delta.begin() + static_cast<std::ptrdiff_t>(g * cfg.replicates),
                                  delta.begin() + static_cast<std::ptrdiff_t>((g + 1) * cfg.replicates));
        for (std::size_t r = 0; r < slice.size(); ++r)
            rep.table.push_back({static_cast<double>(n), static_cast<double>(r), slice[r]});
        const auto m = mean_se(slice);
        means.push_back(m.mean);
        rep.add(recorded("mean delta1 at n=" + std::to_string(n), m));
        if (cfg.p_noise >= 2) {
            const double ratio = static_cast<double>(n) * m.mean / log_b;
            worst_ratio = std::max(worst_ratio, ratio);
            ratio_ok = ratio_ok && ratio <= ratio_bound;
        }
    }
    Estimate mono;
    mono.name = "mean delta1 decreasing in n";
    mono.value = 1.0;
    for (std::size_t g = 1; g < means.size(); ++g)
        if (!(means[g] < means[g - 1])) mono.value = 0.0;
    mono.target = 1.0;
    mono.rule = "each grid mean below the previous one";
    mono.pass = mono.value == 1.0;
    rep.add(std::move(mono));
    if (cfg.p_noise >= 2) {
        Estimate ratio;
        ratio.name = "max n*delta1/log|B|";
        ratio.value = worst_ratio;
        ratio.target = ratio_bound;
        ratio.rule = "estimate <= target at every grid point";
        ratio.pass = ratio_ok;
        rep.add(std::move(ratio));
    }
    return rep;
}

ExperimentReport coverage_experiment(const CoverageConfig& cfg) {
    if (cfg.s > static_cast<std::size_t>(std::max(cfg.s_max, 0))) throw ConfigError("support larger than the size cap");
    if (!(cfg.theta > 0.0 && cfg.theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
    ExperimentReport rep;
    rep.name = "confidence-set coverage";
    rep.replicates = cfg.replicates;
    rep.seed = cfg.seed;
    rep.parameters = {{"n", static_cast<double>(cfg.n)},
                      {"p", static_cast<double>(cfg.p)},
                      {"s", static_cast<double>(cfg.s)},
                      {"signal", cfg.signal},
                      {"sigma", cfg.sigma},
                      {"theta", cfg.theta},
                      {"s_max", cfg.s_max},
                      {"alpha", cfg.reduction.alpha},
                      {"rerandomisations", cfg.reduction.rerandomisations},
                      {"null_replicates", static_cast<double>(cfg.null_replicates)},
                      {"null_model_size", static_cast<double>(cfg.null_model_size)}};
    gate_on_generator(rep, CovariateLaw::iid(), cfg.p, cfg.seed);
    if (!rep.pass) return rep;

    // w(S) does not depend on sigma when the data are noise-free, so any
    // positive value serves as the model sigma there.
    const SigmaMode model_sigma = SigmaMode::known_value(cfg.sigma > 0.0 ? cfg.sigma : 1.0);
    rep.table_header = {"replicate", "S_in_Shat", "S_in_M", "M_size", "Shat_size"};
    std::vector<std::vector<double>> rows(cfg.replicates);
    std::vector<std::string> failures(cfg.replicates);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
        const auto spec = GenSpec::sparse(cfg.n, cfg.p, cfg.s, cfg.signal, cfg.sigma, CovariateLaw::iid(),
                                          derive_seed(cfg.seed, r, "data"));
        const SimData d = generate(spec);
        reduction::ReductionConfig rc = cfg.reduction;
        rc.seed = derive_seed(cfg.seed, r, "reduce");
        rc.threads = 1;
        const auto out = reduction::cox_reduce(d.y, d.x, rc);
        const bool covered = is_subset(d.support, out.comprehensive);
        double in_m = kNaN, m_size = kNaN;
        if (covered) {
            const auto [yi, xi] = centred_rows(d.y, d.x, out.split.first);
            try {
                const auto mcs = confset::build_confidence_set(yi, xi, out.comprehensive, cfg.theta, cfg.s_max,
                                                               model_sigma);
                in_m = mcs.contains_model(d.support) ? 1.0 : 0.0;
                m_size = static_cast<double>(mcs.accepted_count);
            } catch (const BudgetExceeded& e) {
                failures[r] = "replicate " + std::to_string(r) + ": " + e.what();
            }
        }
        rows[r] = {static_cast<double>(r), covered ? 1.0 : 0.0, in_m, m_size,
                   static_cast<double>(out.comprehensive.size())};
    });
    for (const auto& f : failures)
        if (!f.empty()) rep.notes.push_back(f);
    rep.table = rows;

    std::vector<double> covered, in_m, m_size, shat_size;
    for (const auto& row : rows) {
        covered.push_back(row[1]);
        in_m.push_back(row[2]);
        m_size.push_back(row[3]);
        shat_size.push_back(row[4]);
    }
    const auto coverage = mean_se(in_m);
    Estimate cov;
    cov.name = "P(S in M | S in Shat)";
    cov.value = coverage.mean;
    cov.se = coverage.se;
    cov.target = 1.0 - cfg.theta - 0.03;
    cov.rule = "estimate >= target";
    cov.pass = coverage.mean >= cov.target;
    rep.add(std::move(cov));
    rep.add(recorded("P(S in Shat)", mean_se(covered)));
    rep.add(recorded("mean |M| given S in Shat", mean_se(m_size)));
    rep.add(recorded("mean |Shat|", mean_se(shat_size)));

    if (cfg.null_replicates > 0) {
        if (cfg.null_model_size < 1 || cfg.null_model_size > cfg.p)
            throw ConfigError("null model size must lie in [1, p]");
        IndexSet fixed(cfg.null_model_size);
        std::iota(fixed.begin(), fixed.end(), 0);
        std::vector<double> accept(cfg.null_replicates);
        parallel_for(cfg.null_replicates, cfg.threads, [&](std::size_t r) {
            const auto spec = GenSpec::sparse(cfg.n, cfg.null_model_size, 0, 0.0, cfg.sigma > 0.0 ? cfg.sigma : 1.0,
                                              CovariateLaw::iid(), derive_seed(cfg.seed, r, "null"));
            const SimData d = generate(spec);
            const auto mcs = confset::build_confidence_set(d.y, d.x, fixed, cfg.theta, 0, model_sigma);
            accept[r] = mcs.contains_model({}) ? 1.0 : 0.0;
        });
        rep.add(within_band("null acceptance of the empty model", mean_se(accept), 1.0 - cfg.theta));
    }
    return rep;
}

ExperimentReport noncentral_moment_experiment(const NoncentralConfig& cfg) {
    const auto q = cfg.gamma0.size();
    if (q < 1) throw ConfigError("gamma0 must be nonempty");
    if (!(cfg.sigma > 0.0)) throw ConfigError("sigma must be positive");
    for (int j : cfg.sub)
        if (j < 0 || j >= q) throw ConfigError("submodel position out of range");
    if (static_cast<Eigen::Index>(cfg.n) <= q) throw ConfigError("need more observations than columns");

    Rng rng(derive_seed(cfg.seed, 0, "design"));
    Matrix x = linalg::centre(draw_covariates(cfg.n, static_cast<std::size_t>(q), CovariateLaw::iid(), rng)).values;
    const IndexSet sub = make_index_set(cfg.sub);
    if (cfg.orthogonal_omitted && !sub.empty()) {
        const Matrix basis = linalg::orthonormal_basis(select_columns(x, sub));
        for (Eigen::Index j = 0; j < q; ++j)
            if (!contains(sub, static_cast<int>(j))) x.col(j) -= basis * (basis.transpose() * x.col(j));
    }
    const Matrix x_sub = select_columns(x, sub);
    const double lambda = confset::noncentrality(x, x_sub, cfg.gamma0, cfg.sigma);
    const int df = static_cast<int>(linalg::numerical_rank(x)) - static_cast<int>(linalg::numerical_rank(x_sub));

    ExperimentReport rep;
    rep.name = "noncentral LRT moment";
    rep.replicates = cfg.replicates;
    rep.seed = cfg.seed;
    rep.parameters = {{"n", static_cast<double>(cfg.n)},
                      {"columns", static_cast<double>(q)},
                      {"submodel size", static_cast<double>(sub.size())},
                      {"sigma", cfg.sigma},
                      {"df", df},
                      {"lambda", lambda}};

    const Vector signal = x * cfg.gamma0;
    std::vector<double> w(cfg.replicates);
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
        Rng noise(derive_seed(cfg.seed, r, "noise"));
        Vector y = signal;
        for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += cfg.sigma * noise.normal();
        w[r] = stats::lrt_statistic(y, x, x_sub, cfg.sigma).w;
    }
    rep.add(within_band("mean w(S_m)", mean_se(w), df + lambda));
    return rep;
}

ExperimentReport comparator_contrast_experiment(const ContrastConfig& cfg) {
    if (cfg.block_size < 1) throw ConfigError("block size must be positive");
    if (cfg.signal_stride < 1 || (cfg.s > 0 && (cfg.s - 1) * cfg.signal_stride >= cfg.p))
        throw ConfigError("signal columns must fit inside p");
    ExperimentReport rep;
    rep.name = "comparator contrast";
    rep.replicates = cfg.replicates;
    rep.seed = cfg.seed;
    rep.parameters = {{"n", static_cast<double>(cfg.n)},
                      {"p", static_cast<double>(cfg.p)},
                      {"s", static_cast<double>(cfg.s)},
                      {"rho", cfg.rho},
                      {"block_size", static_cast<double>(cfg.block_size)},
                      {"signal_stride", static_cast<double>(cfg.signal_stride)},
                      {"signal", cfg.signal},
                      {"sigma", cfg.sigma},
                      {"theta", cfg.theta},
                      {"s_max", cfg.s_max},
                      {"alpha", cfg.reduction.alpha},
                      {"rerandomisations", cfg.reduction.rerandomisations}};
    const auto law = CovariateLaw::block(cfg.rho, cfg.block_size);
    gate_on_generator(rep, law, cfg.p, cfg.seed);
    if (!rep.pass) return rep;

    const SigmaMode model_sigma = SigmaMode::known_value(cfg.sigma);
    rep.table_header = {"replicate", "Shat_size", "lasso_miss", "cox_miss", "M_marginal", "M_cox", "lasso_exhausted"};
    std::vector<std::vector<double>> rows(cfg.replicates);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
        GenSpec spec;
        spec.n = cfg.n;
        spec.p = cfg.p;
        spec.theta0 = Vector::Zero(static_cast<Eigen::Index>(cfg.p));
        for (std::size_t j = 0; j < cfg.s; ++j) spec.theta0(static_cast<Eigen::Index>(j * cfg.signal_stride)) = cfg.signal;
        spec.sigma = cfg.sigma;
        spec.law = law;
        spec.seed = derive_seed(cfg.seed, r, "data");
        const SimData d = generate(spec);

        reduction::ReductionConfig rc = cfg.reduction;
        rc.seed = derive_seed(cfg.seed, r, "reduce");
        rc.threads = 1;
        const auto out = reduction::cox_reduce(d.y, d.x, rc);
        const IndexSet& cox = out.comprehensive;
        const std::size_t size = std::max<std::size_t>(cox.size(), 1);

        const auto lasso = comparators::lasso_undertuned_support(d.y, d.x, size);
        const IndexSet marginal = cox.empty() ? IndexSet{} : comparators::marginal_screen(d.y, d.x, size).kept;

        const auto [yi, xi] = centred_rows(d.y, d.x, out.split.first);
        const auto m_cox = confset::build_confidence_set(yi, xi, cox, cfg.theta, cfg.s_max, model_sigma);
        const auto m_marg = confset::build_confidence_set(yi, xi, marginal, cfg.theta, cfg.s_max, model_sigma);
        rows[r] = {static_cast<double>(r),
                   static_cast<double>(cox.size()),
                   is_subset(d.support, lasso.support) ? 0.0 : 1.0,
                   is_subset(d.support, cox) ? 0.0 : 1.0,
                   static_cast<double>(m_marg.accepted_count),
                   static_cast<double>(m_cox.accepted_count),
                   lasso.grid_exhausted ? 1.0 : 0.0};
    });
    rep.table = rows;

    std::vector<double> lasso_miss, cox_miss, m_marg, m_cox, marg_at_least;
    for (const auto& row : rows) {
        lasso_miss.push_back(row[2]);
        cox_miss.push_back(row[3]);
        m_marg.push_back(row[4]);
        m_cox.push_back(row[5]);
        marg_at_least.push_back(row[4] >= row[5] ? 1.0 : 0.0);
    }
    const auto lm = mean_se(lasso_miss);
    const auto cm = mean_se(cox_miss);
    Estimate miss;
    miss.name = "LASSO miss rate minus Cox miss rate";
    miss.value = lm.mean - cm.mean;
    miss.target = 0.0;
    miss.rule = "estimate > 0";
    miss.pass = miss.value > 0.0;
    rep.add(recorded("undertuned LASSO miss rate", lm));
    rep.add(recorded("Cox reduction miss rate", cm));
    rep.add(std::move(miss));

    rep.add(recorded("mean |M| from marginal screening", mean_se(m_marg)));
    rep.add(recorded("mean |M| from Cox reduction", mean_se(m_cox)));
    auto share = mean_se(marg_at_least);
    Estimate majority;
    majority.name = "share of replicates with |M_marginal| >= |M_cox|";
    majority.value = share.mean;
    majority.se = share.se;
    majority.target = 0.5;
    majority.rule = "estimate >= 0.5";
    majority.pass = share.mean >= 0.5;
    rep.add(std::move(majority));
    return rep;
}

}  // namespace coxred::simulation
