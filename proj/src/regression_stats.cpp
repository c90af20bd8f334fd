#include "coxred/regression_stats.hpp"

#include "coxred/distributions.hpp"
#include "coxred/errors.hpp"
#include "coxred/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coxred::stats {

double WaldVector::pvalue(Eigen::Index i) const {
    if (mode.is_known()) return normal_tail_pvalue(values(i));
    return student_t_tail_pvalue(values(i), static_cast<double>(residual_df));
}

WaldVector wald(const Vector& y, const Matrix& xk, const SigmaMode& mode, std::vector<int> index_map) {
    const auto k = static_cast<std::size_t>(xk.cols());
    const auto n = static_cast<std::size_t>(xk.rows());
    if (index_map.empty()) {
        index_map.resize(k);
        std::iota(index_map.begin(), index_map.end(), 0);
    }
    if (index_map.size() != k) throw DomainError("index map length differs from column count");
    {
        auto sorted = index_map;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw DomainError("index map has duplicates");
    }
    if (mode.is_known() && !(*mode.known > 0.0)) throw DomainError("known sigma must be positive");
    if (n <= k) throw DomainError("Wald statistics need n > |K|");

    const linalg::LstsqFit fit = linalg::least_squares(y, xk);
    WaldVector out;
    out.mode = mode;
    out.residual_df = n - k;
    out.index_map = std::move(index_map);
    if (mode.is_known()) {
        out.sigma_used = *mode.known;
    } else {
        out.sigma_used = fit.residuals.norm() / std::sqrt(static_cast<double>(n - k));
        if (out.sigma_used < 1e-12) throw DegenerateResidual();
    }
    out.values = fit.coefficients.array() / (fit.xtx_inv_diag.array().sqrt() * out.sigma_used);
    return out;
}

SignalNoiseSplit wald_signal_noise_split(const Vector& y, const Matrix& xa, const Vector& theta0, Eigen::Index a) {
    if (theta0.size() != xa.cols()) throw DomainError("theta0 length differs from column count");
    if (a < 0 || a >= xa.cols()) throw DomainError("variable position out of range");
    if (linalg::numerical_rank(xa) < static_cast<std::size_t>(xa.cols()))
        throw RankDeficient(linalg::numerical_rank(xa), static_cast<std::size_t>(xa.cols()));

    std::vector<int> others;
    for (Eigen::Index j = 0; j < xa.cols(); ++j)
        if (j != a) others.push_back(static_cast<int>(j));
    const Matrix x_rest = select_columns(xa, others);
    const Vector xa_col = xa.col(a);

    const double r2 = others.empty() ? 0.0 : std::pow(linalg::multiple_corr(xa_col, x_rest), 2);
    SignalNoiseSplit out;
    out.delta1 = std::sqrt(std::max(0.0, 1.0 - r2)) * theta0(a) * xa_col.norm();

    const Vector omitted = y - xa * theta0;
    const Vector partial = xa_col - linalg::project(xa_col, x_rest);
    const double on = omitted.norm();
    if (on > 1e-300) out.delta2 = on * linalg::corr(omitted, partial);
    return out;
}

namespace {

void check_nested(const Matrix& x_comp, const Matrix& x_sub) {
    if (x_sub.rows() != x_comp.rows()) throw NotNested();
    for (Eigen::Index j = 0; j < x_sub.cols(); ++j) {
        bool found = false;
        for (Eigen::Index c = 0; c < x_comp.cols() && !found; ++c) found = (x_comp.col(c) == x_sub.col(j));
        if (!found) throw NotNested();
    }
}

}  // namespace

LrtResult lrt_statistic(const Vector& y, const Matrix& x_comp, const Matrix& x_sub, const SigmaMode& mode) {
    check_nested(x_comp, x_sub);
    const Matrix q_comp = linalg::orthonormal_basis(x_comp);
    const Matrix q_sub = linalg::orthonormal_basis(x_sub);
    LrtResult out;
    out.df = static_cast<int>(q_comp.cols() - q_sub.cols());
    const Vector fit_comp = q_comp * (q_comp.transpose() * y);
    const Vector fit_sub = q_sub.cols() > 0 ? Vector(q_sub * (q_sub.transpose() * y)) : Vector::Zero(y.size());
    if (mode.is_known()) {
        const double sigma = *mode.known;
        if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
        out.w = (fit_comp - fit_sub).squaredNorm() / (sigma * sigma);
    } else {
        const double rss_comp = (y - fit_comp).squaredNorm();
        const double rss_sub = (y - fit_sub).squaredNorm();
        if (rss_comp < 1e-300) throw DegenerateResidual();
        out.w = static_cast<double>(y.size()) * std::log(rss_sub / rss_comp);
    }
    out.w = std::max(0.0, out.w);
    return out;
}

LrtResult lrt_statistic(const Vector& y, const Matrix& x_comp, const Matrix& x_sub, double sigma) {
    return lrt_statistic(y, x_comp, x_sub, SigmaMode::known_value(sigma));
}

}  // namespace coxred::stats
