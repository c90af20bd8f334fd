#pragma once

#include <map>
#include <mutex>
#include <utility>

namespace coxred::stats {

/// Regularised lower incomplete gamma P(a, x); series below a+1, Lentz
/// continued fraction above.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Regularised incomplete beta I_x(a, b).
double regularized_beta(double a, double b, double x);

double chisq_cdf(int df, double q);

/// q with P(df/2, q/2) = prob, by bisection to a 1e-12 bracket.
/// Requires df >= 1 and 0 < prob < 1.
double chisq_quantile(int df, double prob);

double normal_cdf(double z);
double normal_quantile(double prob);

/// Two-sided standard normal p-value 2(1 - Phi(|t|)).
double normal_tail_pvalue(double t);

double student_t_cdf(double t, double df);
double student_t_quantile(double prob, double df);
double student_t_tail_pvalue(double t, double df);

/// Memoised chi-squared quantiles; safe for concurrent use.
class ChiSqQuantileTable {
public:
    double quantile(int df, double prob);

private:
    std::mutex mutex_;
    std::map<std::pair<int, double>, double> cache_;
};

}  // namespace coxred::stats
