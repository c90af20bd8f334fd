#pragma once

#include "coxred/types.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace coxred::confset {

struct ModelRecord {
    IndexSet members;
    double w = 0.0;
    int df = 0;
    double threshold = 0.0;  ///< chi^2_df(1 - theta); 0 when df = 0
    bool accepted = false;
};

struct ModelConfidenceSet {
    IndexSet comprehensive;
    double theta = 0.05;
    int size_cap = 0;
    SigmaMode sigma;
    int comprehensive_rank = 0;
    /// Every tested submodel, by size then lexicographically.
    std::vector<ModelRecord> records;
    std::size_t tested = 0;
    std::size_t accepted_count = 0;

    std::vector<ModelRecord> accepted() const;
    bool contains_model(const IndexSet& model) const;
};

struct ConfsetOptions {
    std::size_t budget = 1'000'000;
    unsigned threads = 1;
};

/// sum_{j=0}^{s_max} C(n_items, j), saturating at SIZE_MAX.
std::size_t enumeration_count(std::size_t n_items, int s_max);

/// Tests every subset of `comprehensive` with at most `s_max` members against
/// the comprehensive model with the likelihood-ratio statistic, accepting when
/// w <= chi^2_df(1 - theta). Degrees of freedom come from numerical ranks.
/// Throws BudgetExceeded before fitting when the enumeration is too large.
ModelConfidenceSet build_confidence_set(const Vector& y, const Matrix& x, const IndexSet& comprehensive, double theta,
                                        int s_max, const SigmaMode& sigma, const ConfsetOptions& options = {});

struct PredictionInterval {
    IndexSet members;
    bool available = false;
    std::string reason;  ///< why the interval was omitted
    double centre = 0.0;
    double half_width = 0.0;
};

/// Normal-theory interval x_new^T gamma_m +- q sigma sqrt(1 + x_m^T (X_m^T X_m)^{-1} x_m)
/// for each accepted model, with q from the normal (known sigma) or Student t
/// with n - |S_m| df (estimated sigma). `x_new` must be centred like `x`.
std::vector<PredictionInterval> prediction_intervals(const Vector& y, const Matrix& x, const ModelConfidenceSet& mcs,
                                                     const Vector& x_new, double level, const SigmaMode& sigma);

/// lambda = sigma^{-2} ||(I - P_sub) X_comp gamma0||^2.
double noncentrality(const Matrix& x_comp, const Matrix& x_sub, const Vector& gamma0, double sigma);

}  // namespace coxred::confset
