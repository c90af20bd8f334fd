#include "coxred/confset.hpp"

#include "coxred/distributions.hpp"
#include "coxred/errors.hpp"
#include "coxred/linalg.hpp"
#include "coxred/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coxred::confset {

std::vector<ModelRecord> ModelConfidenceSet::accepted() const {
    std::vector<ModelRecord> out;
    for (const auto& r : records)
        if (r.accepted) out.push_back(r);
    return out;
}

bool ModelConfidenceSet::contains_model(const IndexSet& model) const {
    return std::any_of(records.begin(), records.end(),
                       [&](const ModelRecord& r) { return r.accepted && r.members == model; });
}

std::size_t enumeration_count(std::size_t n_items, int s_max) {
    constexpr auto kMax = std::numeric_limits<std::size_t>::max();
    const auto top = std::min<std::size_t>(n_items, static_cast<std::size_t>(std::max(0, s_max)));
    std::size_t total = 0;
    std::size_t binom = 1;  // C(n, j)
    for (std::size_t j = 0; j <= top; ++j) {
        if (j > 0) {
            // C(n, j) = C(n, j-1) * (n - j + 1) / j, exact in this order
            const std::size_t factor = n_items - j + 1;
            if (binom > kMax / factor) return kMax;
            binom = binom * factor / j;
        }
        if (total > kMax - binom) return kMax;
        total += binom;
    }
    return total;
}

namespace {

// All subsets of `items` with at most s_max members, by size then lexicographically.
std::vector<IndexSet> enumerate_subsets(const IndexSet& items, int s_max) {
    std::vector<IndexSet> out;
    const auto n = items.size();
    const auto top = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(0, s_max)));
    for (std::size_t size = 0; size <= top; ++size) {
        std::vector<std::size_t> pos(size);
        for (std::size_t i = 0; i < size; ++i) pos[i] = i;
        for (;;) {
            IndexSet s(size);
            for (std::size_t i = 0; i < size; ++i) s[i] = items[pos[i]];
            out.push_back(std::move(s));
            // advance the combination
            std::size_t i = size;
            while (i > 0 && pos[i - 1] == n - size + i - 1) --i;
            if (i == 0) break;
            ++pos[i - 1];
            for (std::size_t j = i; j < size; ++j) pos[j] = pos[j - 1] + 1;
        }
    }
    return out;
}

Vector fitted(const Matrix& basis, const Vector& y) {
    if (basis.cols() == 0) return Vector::Zero(y.size());
    return basis * (basis.transpose() * y);
}

}  // namespace

ModelConfidenceSet build_confidence_set(const Vector& y, const Matrix& x, const IndexSet& comprehensive, double theta,
                                        int s_max, const SigmaMode& sigma, const ConfsetOptions& options) {
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0, 1)");
    if (s_max < 0) throw ConfigError("size cap must be nonnegative");
    if (sigma.is_known() && !(*sigma.known > 0.0)) throw ConfigError("known sigma must be positive");
    if (y.size() != x.rows()) throw DataError("response length does not match design rows");
    for (int idx : comprehensive)
        if (idx < 0 || idx >= x.cols()) throw ConfigError("comprehensive model index out of range");

    const std::size_t required = enumeration_count(comprehensive.size(), s_max);
    if (required > options.budget) throw BudgetExceeded(required, options.budget);

    ModelConfidenceSet mcs;
    mcs.comprehensive = comprehensive;
    mcs.theta = theta;
    mcs.size_cap = s_max;
    mcs.sigma = sigma;

    const Matrix q_comp = linalg::orthonormal_basis(select_columns(x, comprehensive));
    mcs.comprehensive_rank = static_cast<int>(q_comp.cols());
    const Vector fit_comp = fitted(q_comp, y);
    const double n = static_cast<double>(y.size());
    const double rss_comp = (y - fit_comp).squaredNorm();
    if (!sigma.is_known() && rss_comp < 1e-300) throw DegenerateResidual();

    std::vector<double> thresholds(static_cast<std::size_t>(mcs.comprehensive_rank) + 1, 0.0);
    for (int df = 1; df <= mcs.comprehensive_rank; ++df)
        thresholds[static_cast<std::size_t>(df)] = stats::chisq_quantile(df, 1.0 - theta);

    const auto models = enumerate_subsets(comprehensive, s_max);
    mcs.records.resize(models.size());
    parallel_for(models.size(), options.threads, [&](std::size_t i) {
        ModelRecord& rec = mcs.records[i];
        rec.members = models[i];
        const Matrix q_sub = linalg::orthonormal_basis(select_columns(x, rec.members));
        const Vector fit_sub = fitted(q_sub, y);
        rec.df = mcs.comprehensive_rank - static_cast<int>(q_sub.cols());
        if (rec.df <= 0) {
            rec.df = 0;
            rec.w = 0.0;
            rec.accepted = true;
            return;
        }
        if (sigma.is_known()) {
            rec.w = (fit_comp - fit_sub).squaredNorm() / (*sigma.known * *sigma.known);
        } else {
            rec.w = n * std::log((y - fit_sub).squaredNorm() / rss_comp);
        }
        rec.w = std::max(0.0, rec.w);
        rec.threshold = thresholds[static_cast<std::size_t>(rec.df)];
        rec.accepted = rec.w <= rec.threshold;
    });
    mcs.tested = mcs.records.size();
    mcs.accepted_count = static_cast<std::size_t>(
        std::count_if(mcs.records.begin(), mcs.records.end(), [](const ModelRecord& r) { return r.accepted; }));
    return mcs;
}

std::vector<PredictionInterval> prediction_intervals(const Vector& y, const Matrix& x, const ModelConfidenceSet& mcs,
                                                     const Vector& x_new, double level, const SigmaMode& sigma) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("interval level must lie in (0, 1)");
    if (x_new.size() != x.cols()) throw DataError("new covariate vector has the wrong length");
    const Eigen::Index n = x.rows();
    std::vector<PredictionInterval> out;
    for (const auto& rec : mcs.records) {
        if (!rec.accepted) continue;
        PredictionInterval pi;
        pi.members = rec.members;
        const auto m = static_cast<Eigen::Index>(rec.members.size());
        if (n - m < 1) {
            pi.reason = "no residual degrees of freedom";
            out.push_back(std::move(pi));
            continue;
        }
        const Matrix xm = select_columns(x, rec.members);
        Vector xnew_m(m);
        for (Eigen::Index j = 0; j < m; ++j) xnew_m(j) = x_new(rec.members[static_cast<std::size_t>(j)]);

        double leverage = 0.0;
        Vector resid = y;
        if (m > 0) {
            linalg::LstsqFit fit;
            try {
                fit = linalg::least_squares(y, xm);
            } catch (const RankDeficient& e) {
                pi.reason = e.what();
                out.push_back(std::move(pi));
                continue;
            }
            pi.centre = xnew_m.dot(fit.coefficients);
            resid = fit.residuals;
            const Eigen::HouseholderQR<Matrix> qr(xm);
            const Matrix r = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
            const Vector z = r.transpose().triangularView<Eigen::Lower>().solve(xnew_m);
            leverage = z.squaredNorm();
        }
        double sd, q;
        const double dof = static_cast<double>(n - m);
        if (sigma.is_known()) {
            sd = *sigma.known;
            q = stats::normal_quantile(0.5 * (1.0 + level));
        } else {
            sd = std::sqrt(resid.squaredNorm() / dof);
            q = stats::student_t_quantile(0.5 * (1.0 + level), dof);
        }
        pi.half_width = q * sd * std::sqrt(1.0 + leverage);
        pi.available = true;
        out.push_back(std::move(pi));
    }
    return out;
}

double noncentrality(const Matrix& x_comp, const Matrix& x_sub, const Vector& gamma0, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("sigma must be positive");
    if (gamma0.size() != x_comp.cols()) throw DomainError("gamma0 length differs from column count");
    const Vector signal = x_comp * gamma0;
    const Matrix q_sub = linalg::orthonormal_basis(x_sub);
    const Vector resid = signal - fitted(q_sub, signal);
    return resid.squaredNorm() / (sigma * sigma);
}

}  // namespace coxred::confset
