#pragma once

#include "coxred/types.hpp"

#include <cstddef>
#include <vector>

namespace coxred::stats {

/// Per-variable Wald statistics from one regression,
/// T = sigma^{-1} D_K^{-1/2} theta_{Y:K}.
struct WaldVector {
    Vector values;
    SigmaMode mode;
    /// sigma for known mode, the residual estimate sigma_K otherwise.
    double sigma_used = 0.0;
    /// Residual degrees of freedom n - |K|.
    std::size_t residual_df = 0;
    std::vector<int> index_map;

    /// Two-sided p-value of entry i: standard normal reference for a known
    /// sigma, Student t with n - |K| df for an estimated one.
    double pvalue(Eigen::Index i) const;
};

/// `index_map` labels the columns of `xk` and must be duplicate-free (or
/// empty, meaning 0..|K|-1).
WaldVector wald(const Vector& y, const Matrix& xk, const SigmaMode& mode, std::vector<int> index_map = {});

struct SignalNoiseSplit {
    double delta1 = 0.0;  ///< recovered true signal of variable a
    double delta2 = 0.0;  ///< contribution of the omitted signal and noise
};

/// Splits sigma * T_a (known sigma) into signal and noise parts given the
/// generating coefficients theta0 restricted to the columns of xa.
SignalNoiseSplit wald_signal_noise_split(const Vector& y, const Matrix& xa, const Vector& theta0, Eigen::Index a);

struct LrtResult {
    double w = 0.0;
    int df = 0;
};

/// w = sigma^{-2} ||(P_comp - P_sub) y||^2 and df = rank(comp) - rank(sub).
/// Every column of x_sub must be a column of x_comp, otherwise NotNested.
LrtResult lrt_statistic(const Vector& y, const Matrix& x_comp, const Matrix& x_sub, double sigma);

/// Known sigma as above; estimated sigma uses the profile Gaussian
/// likelihood ratio n log(RSS_sub / RSS_comp).
LrtResult lrt_statistic(const Vector& y, const Matrix& x_comp, const Matrix& x_sub, const SigmaMode& mode);

}  // namespace coxred::stats
