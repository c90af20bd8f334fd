#include "coxred/comparators.hpp"

#include "coxred/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coxred::comparators {

ScreeningResult marginal_screen(const Vector& y, const Matrix& x, std::size_t s_hat) {
    if (s_hat < 1) throw ConfigError("screening size must be at least 1");
    const auto p = static_cast<std::size_t>(x.cols());
    ScreeningResult out;
    out.abs_corr.resize(p, 0.0);
    const double ny = y.norm();
    for (std::size_t j = 0; j < p; ++j) {
        const double nx = x.col(static_cast<Eigen::Index>(j)).norm();
        if (ny > 1e-300 && nx > 1e-300)
            out.abs_corr[j] = std::fabs(y.dot(x.col(static_cast<Eigen::Index>(j))) / (ny * nx));
    }
    out.ranked.resize(p);
    std::iota(out.ranked.begin(), out.ranked.end(), 0);
    std::stable_sort(out.ranked.begin(), out.ranked.end(), [&](int a, int b) {
        return out.abs_corr[static_cast<std::size_t>(a)] > out.abs_corr[static_cast<std::size_t>(b)];
    });
    const auto keep = std::min(s_hat, p);
    out.kept = make_index_set(std::vector<int>(out.ranked.begin(), out.ranked.begin() + static_cast<std::ptrdiff_t>(keep)));
    return out;
}

namespace {

struct Standardized {
    Matrix z;
    Vector scale;  // ||x_j|| / sqrt(n); 0 for zero columns
};

Standardized standardize(const Matrix& x) {
    Standardized s;
    const double root_n = std::sqrt(static_cast<double>(x.rows()));
    s.scale = x.colwise().norm().transpose() / root_n;
    s.z = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (s.scale(j) > 1e-300)
            s.z.col(j) /= s.scale(j);
        else
            s.z.col(j).setZero();
    }
    return s;
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

double gap_standardized(const Matrix& z, const Vector& resid, const Vector& b, double lambda) {
    const double n = static_cast<double>(z.rows());
    const Vector g = z.transpose() * resid / n;
    double gap = 0.0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        double v;
        if (b(j) > 0.0)
            v = std::fabs(g(j) - lambda);
        else if (b(j) < 0.0)
            v = std::fabs(g(j) + lambda);
        else
            v = std::max(0.0, std::fabs(g(j)) - lambda);
        gap = std::max(gap, v);
    }
    return gap;
}

double objective(const Vector& resid, const Vector& b, double lambda) {
    return 0.5 * resid.squaredNorm() / static_cast<double>(resid.size()) + lambda * b.lpNorm<1>();
}

// Active-set step: minimise the smooth objective on the current support and
// sign pattern, then move toward that point until the first sign change.
void polish(const Vector& y, const Matrix& z, double lambda, Vector& b, Vector& resid, double& gap) {
    std::vector<int> active;
    for (Eigen::Index j = 0; j < b.size(); ++j)
        if (b(j) != 0.0) active.push_back(static_cast<int>(j));
    if (active.empty() || static_cast<Eigen::Index>(active.size()) > z.rows()) return;
    const Matrix za = select_columns(z, active);
    const auto k = static_cast<Eigen::Index>(active.size());
    Vector sign(k), current(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        current(i) = b(active[static_cast<std::size_t>(i)]);
        sign(i) = current(i) > 0.0 ? 1.0 : -1.0;
    }
    const double n = static_cast<double>(z.rows());
    const Eigen::LDLT<Matrix> ldlt(za.transpose() * za);
    if (ldlt.info() != Eigen::Success) return;
    const Vector target = ldlt.solve(za.transpose() * y - n * lambda * sign);
    if (!target.allFinite()) return;
    double t = 1.0;
    Eigen::Index hits = -1;
    for (Eigen::Index i = 0; i < k; ++i)
        if (target(i) * sign(i) <= 0.0) {
            const double ti = current(i) / (current(i) - target(i));
            if (ti < t) {
                t = ti;
                hits = i;
            }
        }
    Vector candidate = b;
    for (Eigen::Index i = 0; i < k; ++i)
        candidate(active[static_cast<std::size_t>(i)]) = current(i) + t * (target(i) - current(i));
    if (hits >= 0) candidate(active[static_cast<std::size_t>(hits)]) = 0.0;
    const Vector r = y - z * candidate;
    if (objective(r, candidate, lambda) >= objective(resid, b, lambda)) return;
    b = candidate;
    resid = r;
    gap = gap_standardized(z, r, candidate, lambda);
}

LassoFit fit_standardized(const Vector& y, const Standardized& s, double lambda, const LassoOptions& options,
                          const Vector* warm_start) {
    if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
    const Eigen::Index p = s.z.cols();
    const double n = static_cast<double>(s.z.rows());
    Vector b = warm_start ? *warm_start : Vector::Zero(p);
    if (b.size() != p) throw DomainError("warm start has the wrong length");
    Vector resid = y - s.z * b;

    LassoFit fit;
    fit.kkt_gap = gap_standardized(s.z, resid, b, lambda);
    while (fit.kkt_gap > options.tolerance) {
        if (fit.sweeps >= options.max_sweeps)
            throw ConvergenceError("coordinate descent did not converge in " + std::to_string(options.max_sweeps) +
                                       " sweeps",
                                   fit.kkt_gap);
        for (Eigen::Index j = 0; j < p; ++j) {
            if (s.scale(j) <= 1e-300) continue;
            const double old = b(j);
            const double updated = soft_threshold(s.z.col(j).dot(resid) / n + old, lambda);
            if (updated != old) {
                resid -= s.z.col(j) * (updated - old);
                b(j) = updated;
            }
        }
        ++fit.sweeps;
        resid = y - s.z * b;
        fit.kkt_gap = gap_standardized(s.z, resid, b, lambda);
        if (fit.kkt_gap > options.tolerance && fit.sweeps % 25 == 0) polish(y, s.z, lambda, b, resid, fit.kkt_gap);
    }
    fit.standardized = b;
    fit.coefficients = Vector::Zero(p);
    for (Eigen::Index j = 0; j < p; ++j)
        if (s.scale(j) > 1e-300) fit.coefficients(j) = b(j) / s.scale(j);
    return fit;
}

IndexSet support_of(const Vector& b) {
    IndexSet out;
    for (Eigen::Index j = 0; j < b.size(); ++j)
        if (b(j) != 0.0) out.push_back(static_cast<int>(j));
    return out;
}

}  // namespace

LassoFit lasso_fit(const Vector& y, const Matrix& x, double lambda, const LassoOptions& options,
                   const Vector* warm_start) {
    if (y.size() != x.rows()) throw DataError("response length does not match design rows");
    return fit_standardized(y, standardize(x), lambda, options, warm_start);
}

double lambda_max(const Vector& y, const Matrix& x) {
    const auto s = standardize(x);
    return (s.z.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

double kkt_gap(const Vector& y, const Matrix& x, const Vector& standardized, double lambda) {
    const auto s = standardize(x);
    return gap_standardized(s.z, y - s.z * standardized, standardized, lambda);
}

std::vector<double> lambda_grid(double lambda_max, std::size_t points, double ratio) {
    std::vector<double> grid(points);
    if (points == 1) {
        grid[0] = lambda_max;
        return grid;
    }
    const double step = std::log(ratio) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = lambda_max * std::exp(step * static_cast<double>(i));
    return grid;
}

LassoPath lasso_path(const Vector& y, const Matrix& x, const std::vector<double>& lambdas,
                     const LassoOptions& options) {
    const auto s = standardize(x);
    LassoPath path;
    Vector warm = Vector::Zero(x.cols());
    for (double lambda : lambdas) {
        const LassoFit fit = fit_standardized(y, s, lambda, options, &warm);
        warm = fit.standardized;
        path.lambdas.push_back(lambda);
        path.coefficients.push_back(fit.standardized);
        path.supports.push_back(support_of(fit.standardized));
        path.kkt_gaps.push_back(fit.kkt_gap);
    }
    return path;
}

UndertunedSupport lasso_undertuned_support(const Vector& y, const Matrix& x, std::size_t target_size,
                                           const LassoOptions& options) {
    if (target_size < 1) throw ConfigError("target size must be at least 1");
    const auto s = standardize(x);
    const double top = (s.z.transpose() * y).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
    UndertunedSupport out;
    Vector warm = Vector::Zero(x.cols());
    for (double lambda : lambda_grid(top)) {
        const LassoFit fit = fit_standardized(y, s, lambda, options, &warm);
        warm = fit.standardized;
        out.support = support_of(fit.standardized);
        out.lambda = lambda;
        if (out.support.size() >= target_size) return out;
    }
    out.grid_exhausted = true;
    return out;
}

}  // namespace coxred::comparators
