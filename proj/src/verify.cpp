#include "coxred/verify.hpp"

#include "coxred/comparators.hpp"
#include "coxred/confset.hpp"
#include "coxred/distributions.hpp"
#include "coxred/io.hpp"
#include "coxred/linalg.hpp"
#include "coxred/pipeline.hpp"
#include "coxred/regression_stats.hpp"
#include "coxred/report.hpp"
#include "coxred/simulation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>

namespace coxred::verify {

namespace {

using simulation::CovariateLaw;

Matrix gaussian(std::size_t n, std::size_t p, Rng& rng) {
    return simulation::draw_covariates(n, p, CovariateLaw::iid(), rng);
}

Vector gaussian_vector(std::size_t n, Rng& rng) {
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
    return v;
}

// Normal-equation coefficients, independent of the QR/SVD paths under test.
Vector ne_coef(const Matrix& x, const Vector& v) { return (x.transpose() * x).ldlt().solve(x.transpose() * v); }

Matrix ne_coef(const Matrix& x, const Matrix& v) { return (x.transpose() * x).ldlt().solve(x.transpose() * v); }

Matrix drop_column(const Matrix& x, Eigen::Index e) {
    Matrix out(x.rows(), x.cols() - 1);
    for (Eigen::Index j = 0, c = 0; j < x.cols(); ++j)
        if (j != e) out.col(c++) = x.col(j);
    return out;
}

double scaled_gap(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::fabs(b)); }

double scaled_gap(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    if (a.size() == 0) return 0.0;
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string estimates_text(const simulation::ExperimentReport& rep) {
    std::string s;
    for (const auto& e : rep.estimates) {
        if (e.rule == "recorded" || e.name.rfind("self-test", 0) == 0) continue;
        if (!s.empty()) s += "; ";
        s += e.name + "=" + report::num(e.value, 5);
        if (e.se > 0) s += " (se " + report::num(e.se, 3) + ")";
        if (!std::isnan(e.target)) s += " vs " + report::num(e.target, 5);
        if (!e.pass) s += " FAIL";
    }
    for (const auto& n : rep.notes) s += "; " + n;
    return s;
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

Outcome wald_identity(const VerifyOptions& o) {
    double worst = 0.0;
    for (std::size_t i = 0; i < 300; ++i) {
        Rng rng(derive_seed(o.seed, i, "wald-identity"));
        const std::size_t k = 1 + rng.below(8);
        const std::size_t n = k + 3 + rng.below(40);
        const Matrix x = gaussian(n, k, rng);
        const Vector y = x * gaussian_vector(k, rng) + gaussian_vector(n, rng);
        const bool known = i % 2 == 0;
        const double sigma_known = 0.5 + rng.uniform();
        const auto t = stats::wald(y, x, known ? SigmaMode::known_value(sigma_known) : SigmaMode::estimate());
        const double sigma =
            known ? sigma_known : (y - x * ne_coef(x, y)).norm() / std::sqrt(static_cast<double>(n - k));
        for (Eigen::Index e = 0; e < static_cast<Eigen::Index>(k); ++e) {
            Vector r = x.col(e);
            if (k > 1) {
                const Matrix rest = drop_column(x, e);
                r -= rest * ne_coef(rest, Vector(x.col(e)));
            }
            const double r_corr = y.dot(r) / (y.norm() * r.norm());
            const double target = y.norm() * r_corr / sigma;
            worst = std::max(worst, scaled_gap(t.values(e), target));
        }
    }
    return {worst <= 1e-8, "300 instances, worst scaled gap " + sci(worst) + " (tol 1e-8)"};
}

Outcome cochran_identity(const VerifyOptions& o) {
    double worst = 0.0, worst_vanish = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
        Rng rng(derive_seed(o.seed, i, "cochran"));
        const std::size_t ne = 1 + rng.below(4);
        const std::size_t nf = 1 + rng.below(4);
        const std::size_t p = ne + nf + rng.below(3);
        const std::size_t n = p + 5 + rng.below(30);
        Matrix x = gaussian(n, p, rng);
        x.rightCols(static_cast<Eigen::Index>(p - 1)) += 0.4 * x.leftCols(1).replicate(1, static_cast<Eigen::Index>(p - 1));
        const Vector y = x * gaussian_vector(p, rng) + gaussian_vector(n, rng);
        std::vector<int> perm(p);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        const IndexSet e = make_index_set({perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(ne)});
        const IndexSet f = make_index_set(
            {perm.begin() + static_cast<std::ptrdiff_t>(ne), perm.begin() + static_cast<std::ptrdiff_t>(ne + nf)});

        const auto sides = linalg::cochran_decompose(y, e, f, x);
        const Matrix xe = select_columns(x, e), xf = select_columns(x, f);
        Matrix xef(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ne + nf));
        xef << xe, xf;
        const Vector joint = ne_coef(xef, y);
        const Vector lhs = ne_coef(xe, y);
        const Vector rhs = joint.head(static_cast<Eigen::Index>(ne)) +
                           ne_coef(xe, xf) * joint.tail(static_cast<Eigen::Index>(nf));
        worst = std::max({worst, scaled_gap(sides.lhs, lhs), scaled_gap(sides.rhs, rhs), scaled_gap(sides.lhs, sides.rhs)});

        // F empty: no indirect part.
        const auto empty = linalg::cochran_decompose(y, e, {}, x);
        worst_vanish = std::max({worst_vanish, scaled_gap(empty.direct, empty.lhs),
                                 empty.indirect.size() ? empty.indirect.cwiseAbs().maxCoeff() : 0.0});
        // X_E^T X_F = 0: indirect part vanishes.
        Matrix xo = x;
        const Eigen::HouseholderQR<Matrix> qr(xe);
        const Matrix q = qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ne));
        for (int j : f) xo.col(j) -= q * (q.transpose() * xo.col(j));
        const auto orth = linalg::cochran_decompose(y, e, f, xo);
        worst_vanish = std::max({worst_vanish, orth.indirect.cwiseAbs().maxCoeff(), scaled_gap(orth.direct, orth.lhs)});
    }
    return {worst <= 1e-8 && worst_vanish <= 1e-10,
            "200 instances, identity gap " + sci(worst) + " (tol 1e-8), vanishing clauses " + sci(worst_vanish) +
                " (tol 1e-10)"};
}

Outcome block_correlation(const VerifyOptions& o) {
    double worst = 0.0, largest = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
        Rng rng(derive_seed(o.seed, i, "block-corr"));
        const std::size_t na = 1 + rng.below(4);
        const std::size_t nb = 1 + rng.below(5);
        const std::size_t n = na + nb + 3 + rng.below(40);
        const Matrix xa = gaussian(n, na, rng);
        const Matrix xb = gaussian(n, nb, rng) + 0.7 * xa * gaussian(na, nb, rng);
        const double r = linalg::block_corr(xa, xb);

        const Eigen::SelfAdjointEigenSolver<Matrix> ga(xa.transpose() * xa);
        const Matrix inv_sqrt = ga.eigenvectors() * ga.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                                ga.eigenvectors().transpose();
        const Matrix ra = inv_sqrt * xa.transpose();
        const Matrix rab = ra * xb;
        const Matrix m = rab * (xb.transpose() * xb).ldlt().solve(rab.transpose());
        const Eigen::SelfAdjointEigenSolver<Matrix> em(m);
        const double oracle = std::sqrt(std::max(0.0, em.eigenvalues().maxCoeff()));
        worst = std::max(worst, std::fabs(r - oracle));
        largest = std::max(largest, r);
    }
    return {worst <= 1e-8 && largest < 1.0,
            "200 instances, eigen-oracle gap " + sci(worst) + " (tol 1e-8), max R " + report::num(largest, 8)};
}

Outcome signal_noise(const VerifyOptions& o) {
    double worst = 0.0;
    bool noise_zero = true;
    for (std::size_t i = 0; i < 200; ++i) {
        Rng rng(derive_seed(o.seed, i, "signal-noise"));
        const std::size_t k = 2 + rng.below(6);
        const std::size_t n = k + 5 + rng.below(40);
        const Matrix x = gaussian(n, k, rng);
        Vector theta0 = Vector::Zero(static_cast<Eigen::Index>(k));
        for (Eigen::Index j = 1; j < theta0.size(); ++j)
            if (rng.uniform() < 0.6) theta0(j) = rng.normal();
        const double sigma = 0.5 + rng.uniform();
        const Vector omitted = gaussian(n, 1, rng).col(0) * 0.3;
        const Vector y = x * theta0 + omitted + sigma * gaussian_vector(n, rng);
        const auto t = stats::wald(y, x, SigmaMode::known_value(sigma));
        for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(k); ++a) {
            const auto s = stats::wald_signal_noise_split(y, x, theta0, a);
            worst = std::max(worst, scaled_gap(s.delta1 + s.delta2, sigma * t.values(a)));
            if (theta0(a) == 0.0 && s.delta1 != 0.0) noise_zero = false;
        }
    }
    return {worst <= 1e-8 && noise_zero, "200 instances, split gap " + sci(worst) + " (tol 1e-8), delta1 " +
                                             (noise_zero ? "exactly 0" : "NONZERO") + " on noise indices"};
}

Outcome companion_means(const VerifyOptions& o) {
    Outcome out;
    int failures = 0, cells = 0;
    double closed_gap = 0.0;
    for (int dims : {2, 3})
        for (int marked : {3, 6, 9})
            for (int side : {4, 5, 6}) {
                simulation::CompanionConfig cfg;
                cfg.marked = marked;
                cfg.side = side;
                cfg.dims = dims;
                cfg.arrangements = 100'000;
                cfg.seed = derive_seed(o.seed, static_cast<std::uint64_t>(cells), "companions");
                const auto rep = simulation::companion_experiment(cfg);
                const double closed = dims == 2 ? 2.0 * (marked - 1) / (side + 1.0)
                                                : 3.0 * (marked - 1) / (side * side + side + 1.0);
                closed_gap = std::max(closed_gap, std::fabs(rep.estimates[0].target - closed));
                if (!rep.pass) {
                    ++failures;
                    out.detail += (out.detail.empty() ? "" : "; ") + std::string(dims == 2 ? "square" : "cube") +
                                  " |A|=" + std::to_string(marked) + " k=" + std::to_string(side) + ": " +
                                  estimates_text(rep);
                }
                ++cells;
            }
    out.pass = failures == 0 && closed_gap <= 1e-12;
    out.detail = std::to_string(cells - failures) + "/" + std::to_string(cells) +
                 " grid points within 3 SE at 1e5 arrangements, closed-form gap " + sci(closed_gap) +
                 (out.detail.empty() ? "" : "; " + out.detail);
    return out;
}

Outcome retention_bound(const VerifyOptions& o) {
    Outcome out;
    const double b = simulation::retention_bound(10, 10);
    const bool value_ok = std::fabs(b - 0.94150) <= 5e-6;
    out.pass = value_ok;
    out.detail = "bound(10,10)=" + report::num(b, 7) + (value_ok ? "" : " MISMATCH");
    int i = 0;
    for (auto [m, k] : {std::pair{5, 8}, std::pair{10, 10}, std::pair{15, 12}}) {
        simulation::RetentionConfig cfg;
        cfg.marked = m;
        cfg.side = k;
        cfg.arrangements = 100'000;
        cfg.full_replicates = m == 10 ? 500 : 0;
        cfg.seed = derive_seed(o.seed, static_cast<std::uint64_t>(i++), "retention");
        cfg.threads = o.threads;
        const auto rep = simulation::retention_probability_experiment(cfg);
        out.pass = out.pass && rep.pass;
        out.detail += "; (" + std::to_string(m) + "," + std::to_string(k) + ") " + estimates_text(rep);
    }
    return out;
}

Outcome noncentral_moments(const VerifyOptions& o) {
    Outcome out;
    std::vector<simulation::NoncentralConfig> configs(3);
    configs[0].gamma0 = (Vector(6) << 1.0, -0.5, 0.8, 0.0, 0.0, 0.0).finished();
    configs[0].sub = {0, 1, 2};
    configs[1].gamma0 = (Vector(6) << 0.3, 0.0, 0.0, 0.25, -0.2, 0.0).finished();
    configs[1].sub = {0, 1, 2};
    configs[1].orthogonal_omitted = true;
    configs[2].gamma0 = (Vector(8) << 0.4, 0.1, -0.2, 0.15, 0.0, 0.3, -0.1, 0.05).finished();
    configs[2].sub = {1, 4, 6};
    for (std::size_t i = 0; i < configs.size(); ++i) {
        configs[i].replicates = 2000;
        configs[i].seed = derive_seed(o.seed, i, "noncentral");
        const auto rep = simulation::noncentral_moment_experiment(configs[i]);
        double lambda = 0.0;
        for (const auto& [k, v] : rep.parameters)
            if (k == "lambda") lambda = v;
        const bool zero_ok = i != 0 || lambda <= 1e-20;
        out.pass = out.pass && rep.pass && zero_ok;
        out.detail += (i ? "; " : "") + std::string("lambda=") + report::num(lambda, 4) + ": " + estimates_text(rep);
    }
    return out;
}

Outcome coverage(const VerifyOptions& o) {
    simulation::CoverageConfig cfg;
    cfg.seed = derive_seed(o.seed, 0, "coverage");
    cfg.threads = o.threads;
    const auto rep = simulation::coverage_experiment(cfg);
    std::string info;
    for (const auto& e : rep.estimates)
        if (e.name == "P(S in Shat)" || e.name == "mean |M| given S in Shat")
            info += "; " + e.name + "=" + report::num(e.value, 4);
    return {rep.pass, "seed " + std::to_string(cfg.seed) + ": " + estimates_text(rep) + info};
}

Outcome contrasts(const VerifyOptions& o) {
    simulation::ContrastConfig cfg;
    cfg.seed = derive_seed(o.seed, 0, "contrast");
    cfg.threads = o.threads;
    const auto rep = simulation::comparator_contrast_experiment(cfg);
    std::string info;
    for (const auto& e : rep.estimates)
        if (e.rule == "recorded") info += "; " + e.name + "=" + report::num(e.value, 4);
    return {rep.pass, "seed " + std::to_string(cfg.seed) + ", 100 replicates: " + estimates_text(rep) + info};
}

Outcome determinism(const VerifyOptions& o) {
    const auto spec = simulation::GenSpec::sparse(150, 80, 4, 1.0, 1.0, CovariateLaw::iid(), derive_seed(o.seed, 0, "det"));
    const auto d = simulation::generate(spec);
    std::vector<std::string> header{"y"};
    for (std::size_t j = 0; j < spec.p; ++j) header.push_back("x" + std::to_string(j + 1));
    Matrix table(d.x.rows(), d.x.cols() + 1);
    table << d.y, d.x;
    const auto data = io::make_dataset(io::parse_csv(io::format_csv(header, table)));
    const Matrix predict = table.topRows(3).rightCols(d.x.cols());

    pipeline::RunConfig cfg;
    cfg.reduction.rerandomisations = 3;
    cfg.reduction.seed = 7;
    auto run = [&](unsigned threads) {
        cfg.threads = threads;
        const auto rep = pipeline::run_pipeline(data, cfg, predict);
        return rep.text + "\n--\n" + rep.sidecar.dump(2) + "\n--\n" + rep.table_csv;
    };
    const std::string one = run(1);
    const std::string eight = run(8);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016llx vs %016llx", static_cast<unsigned long long>(fnv1a(one)),
                  static_cast<unsigned long long>(fnv1a(eight)));
    return {one == eight, std::string("report hash 1 thread vs 8 threads: ") + buf + ", " +
                              std::to_string(one.size()) + " bytes"};
}

Outcome chisq_quantiles(const VerifyOptions&) {
    double worst = 0.0, worst_closed = 0.0;
    for (int df = 1; df <= 30; ++df)
        for (int i = 1; i <= 99; ++i) {
            const double p = i / 100.0;
            const double q = stats::chisq_quantile(df, p);
            worst = std::max(worst, std::fabs(stats::chisq_cdf(df, q) - p));
            if (df == 2) worst_closed = std::max(worst_closed, scaled_gap(q, -2.0 * std::log1p(-p)));
        }
    return {worst <= 1e-8 && worst_closed <= 1e-10,
            "30 df x 99 points, round-trip " + sci(worst) + " (tol 1e-8), df=2 closed form " + sci(worst_closed) +
                " (tol 1e-10)"};
}

Outcome lasso_certificates(const VerifyOptions& o) {
    double worst_gap = 0.0;
    std::size_t points = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        Rng rng(derive_seed(o.seed, i, "lasso"));
        const std::size_t n = 50;
        const std::size_t p = std::array<std::size_t, 3>{20, 50, 100}[i % 3];
        const Matrix x = gaussian(n, p, rng);
        Vector beta = Vector::Zero(static_cast<Eigen::Index>(p));
        for (Eigen::Index j = 0; j < 3; ++j) beta(j) = 1.0 + rng.uniform();
        const Vector y = x * beta + gaussian_vector(n, rng);
        const auto path =
            comparators::lasso_path(y, x, comparators::lambda_grid(comparators::lambda_max(y, x)), {100'000, 1e-7});

        Matrix z = x;
        for (Eigen::Index j = 0; j < z.cols(); ++j) z.col(j) *= std::sqrt(static_cast<double>(n)) / x.col(j).norm();
        for (std::size_t s = 0; s < path.lambdas.size(); ++s) {
            const Vector& b = path.coefficients[s];
            const double lambda = path.lambdas[s];
            const Vector g = z.transpose() * (y - z * b) / static_cast<double>(n);
            for (Eigen::Index j = 0; j < g.size(); ++j) {
                const double v = b(j) > 0   ? std::fabs(g(j) - lambda)
                                 : b(j) < 0 ? std::fabs(g(j) + lambda)
                                            : std::max(0.0, std::fabs(g(j)) - lambda);
                worst_gap = std::max(worst_gap, v);
            }
            ++points;
        }
    }
    double worst_soft = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
        Rng rng(derive_seed(o.seed, i, "lasso-orthonormal"));
        const std::size_t n = 40, p = 8;
        const Eigen::HouseholderQR<Matrix> qr(gaussian(n, p, rng));
        const Matrix q = qr.householderQ() * Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
        const Vector y = 2.0 * gaussian_vector(n, rng);
        const double root_n = std::sqrt(static_cast<double>(n));
        for (double lambda : {0.01, 0.05, 0.1, 0.3}) {
            const auto fit = comparators::lasso_fit(y, q, lambda, {10'000, 1e-13});
            for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(p); ++j) {
                const double u = q.col(j).dot(y) / root_n;
                const double soft = u > lambda ? u - lambda : (u < -lambda ? u + lambda : 0.0);
                worst_soft = std::max(worst_soft, std::fabs(fit.coefficients(j) - root_n * soft));
            }
        }
    }
    return {worst_gap <= 1e-6 && worst_soft <= 1e-8,
            "50 paths, " + std::to_string(points) + " points, worst KKT gap " + sci(worst_gap) +
                " (tol 1e-6); orthonormal soft-threshold gap " + sci(worst_soft) + " (tol 1e-8)"};
}

struct Entry {
    const char* name;
    double limit;
    Outcome (*run)(const VerifyOptions&);
};

const Entry kEntries[kCriteria] = {
    {"Wald projection identity", 5.0, wald_identity},
    {"Cochran decomposition", 5.0, cochran_identity},
    {"block correlation", 5.0, block_correlation},
    {"signal-noise split", 5.0, signal_noise},
    {"companion means", 30.0, companion_means},
    {"first-round retention bound", 60.0, retention_bound},
    {"noncentral LRT moments", 30.0, noncentral_moments},
    {"confidence-set coverage", 600.0, coverage},
    {"comparator contrasts", 0.0, contrasts},
    {"thread-count determinism", 60.0, determinism},
    {"chi-squared quantiles", 1.0, chisq_quantiles},
    {"LASSO KKT certificates", 10.0, lasso_certificates},
};

}  // namespace

CriterionResult run_criterion(int id, const VerifyOptions& options) {
    if (id < 1 || id > kCriteria) throw std::out_of_range("criterion id out of range");
    const Entry& e = kEntries[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = e.name;
    r.limit_seconds = e.limit;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Outcome out = e.run(options);
        r.pass = out.pass;
        r.detail = out.detail;
    } catch (const std::exception& ex) {
        r.pass = false;
        r.detail = std::string("exception: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (r.limit_seconds > 0.0 && r.seconds > r.limit_seconds) {
        r.pass = false;
        r.detail += "; runtime over limit";
    }
    return r;
}

std::vector<CriterionResult> run_suite(const VerifyOptions& options, const std::vector<int>& only) {
    std::vector<int> ids = only;
    if (ids.empty()) {
        ids.resize(kCriteria);
        std::iota(ids.begin(), ids.end(), 1);
    }
    std::vector<CriterionResult> out;
    for (int id : ids) out.push_back(run_criterion(id, options));
    return out;
}

std::string format_line(const CriterionResult& r) {
    char head[128];
    std::snprintf(head, sizeof head, "%s [%2d] %-28s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
    char tail[96];
    if (r.limit_seconds > 0.0)
        std::snprintf(tail, sizeof tail, " (%.2f s, limit %.0f s)", r.seconds, r.limit_seconds);
    else
        std::snprintf(tail, sizeof tail, " (%.2f s)", r.seconds);
    return std::string(head) + " " + r.detail + tail;
}

}  // namespace coxred::verify
