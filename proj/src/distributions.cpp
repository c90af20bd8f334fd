#include "coxred/distributions.hpp"

#include "coxred/errors.hpp"

#include <cmath>
#include <limits>

namespace coxred::stats {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxIter = 100000;

double gamma_series(double a, double x) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double beta_continued_fraction(double a, double b, double x) {
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

// Bisection for an increasing cdf on [lo, hi] until the bracket is below tol.
template <typename Cdf>
double bisect(Cdf cdf, double prob, double lo, double hi, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (cdf(mid) < prob)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void check_prob(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) throw DomainError("probability must lie strictly between 0 and 1");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DomainError("incomplete gamma needs a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_series(a, x);
    return 1.0 - gamma_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DomainError("incomplete gamma needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_series(a, x);
    return gamma_continued_fraction(a, x);
}

double regularized_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0 || x < 0.0 || x > 1.0) throw DomainError("incomplete beta argument out of range");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double chisq_cdf(int df, double q) {
    if (df < 1) throw DomainError("chi-squared needs df >= 1");
    if (q <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * df, 0.5 * q);
}

double chisq_quantile(int df, double prob) {
    if (df < 1) throw DomainError("chi-squared quantile needs df >= 1");
    check_prob(prob);
    double hi = std::max(1.0, static_cast<double>(df));
    while (chisq_cdf(df, hi) < prob) hi *= 2.0;
    return bisect([df](double q) { return chisq_cdf(df, q); }, prob, 0.0, hi, 1e-12);
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double normal_quantile(double prob) {
    check_prob(prob);
    double lo = -1.0, hi = 1.0;
    while (normal_cdf(lo) > prob) lo *= 2.0;
    while (normal_cdf(hi) < prob) hi *= 2.0;
    return bisect(normal_cdf, prob, lo, hi, 1e-13);
}

double normal_tail_pvalue(double t) {
    if (!std::isfinite(t)) return std::isnan(t) ? 1.0 : 0.0;
    return std::erfc(std::fabs(t) / std::sqrt(2.0));
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw DomainError("Student t needs df > 0");
    const double tail = 0.5 * regularized_beta(0.5 * df, 0.5, df / (df + t * t));
    return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double prob, double df) {
    check_prob(prob);
    if (!(df > 0.0)) throw DomainError("Student t needs df > 0");
    double lo = -1.0, hi = 1.0;
    while (student_t_cdf(lo, df) > prob) lo *= 2.0;
    while (student_t_cdf(hi, df) < prob) hi *= 2.0;
    return bisect([df](double t) { return student_t_cdf(t, df); }, prob, lo, hi, 1e-12);
}

double student_t_tail_pvalue(double t, double df) {
    if (!(df > 0.0)) throw DomainError("Student t needs df > 0");
    if (!std::isfinite(t)) return std::isnan(t) ? 1.0 : 0.0;
    return regularized_beta(0.5 * df, 0.5, df / (df + t * t));
}

double ChiSqQuantileTable::quantile(int df, double prob) {
    const auto key = std::make_pair(df, prob);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    }
    const double q = chisq_quantile(df, prob);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(key, q);
    return q;
}

}  // namespace coxred::stats
