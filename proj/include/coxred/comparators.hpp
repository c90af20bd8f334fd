#pragma once

#include "coxred/types.hpp"

#include <cstddef>
#include <vector>

namespace coxred::comparators {

struct ScreeningResult {
    std::vector<int> ranked;  ///< all columns by |R(Y, x_j)| descending, ties by index
    std::vector<double> abs_corr;  ///< |R(Y, x_j)| in column order
    IndexSet kept;
};

/// Marginal screening: keep the s_hat columns most correlated with y.
/// Zero-norm columns score 0.
ScreeningResult marginal_screen(const Vector& y, const Matrix& x, std::size_t s_hat);

struct LassoOptions {
    int max_sweeps = 10'000;
    double tolerance = 1e-9;  ///< stop once the KKT gap falls below this
};

struct LassoFit {
    Vector coefficients;  ///< on the scale of the supplied columns
    Vector standardized;  ///< on unit-variance columns (||x_j||^2 / n = 1)
    double kkt_gap = 0.0;
    int sweeps = 0;
};

/// Coordinate descent for (1/2n)||y - Xb||^2 + lambda ||b||_1 over columns
/// rescaled to ||x_j||^2 / n = 1. Throws ConvergenceError after max_sweeps.
LassoFit lasso_fit(const Vector& y, const Matrix& x, double lambda, const LassoOptions& options = {},
                   const Vector* warm_start = nullptr);

/// max_j |x_j^T y| / n on standardised columns.
double lambda_max(const Vector& y, const Matrix& x);

/// Largest KKT violation of a standardised-scale solution.
double kkt_gap(const Vector& y, const Matrix& x, const Vector& standardized, double lambda);

struct LassoPath {
    std::vector<double> lambdas;  ///< descending
    std::vector<Vector> coefficients;  ///< standardised scale
    std::vector<IndexSet> supports;
    std::vector<double> kkt_gaps;
};

/// 100 log-spaced values from lambda_max down to 1e-4 lambda_max by default.
std::vector<double> lambda_grid(double lambda_max, std::size_t points = 100, double ratio = 1e-4);

/// Warm-started path over a descending grid.
LassoPath lasso_path(const Vector& y, const Matrix& x, const std::vector<double>& lambdas,
                     const LassoOptions& options = {});

struct UndertunedSupport {
    IndexSet support;
    double lambda = 0.0;
    bool grid_exhausted = false;
};

/// Walks the default grid down and returns the first support with at least
/// target_size members; flags grid_exhausted when none reaches it.
UndertunedSupport lasso_undertuned_support(const Vector& y, const Matrix& x, std::size_t target_size,
                                           const LassoOptions& options = {});

}  // namespace coxred::comparators
