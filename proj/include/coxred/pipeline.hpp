#pragma once

#include "coxred/io.hpp"
#include "coxred/reduction.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace coxred::pipeline {

/// Every tunable of a run. resolved() omits `threads`.
struct RunConfig {
    reduction::ReductionConfig reduction;
    double theta = 0.05;
    int s_max = 4;
    std::size_t budget = 1'000'000;
    double interval_level = 0.95;
    std::vector<std::string> model;  ///< fixed comprehensive model for `confset`
    std::string method = "cox";      ///< compare: marginal | lasso | cox
    std::size_t s_hat = 0;           ///< compare: target size; 0 uses the Cox model size
    unsigned threads = 1;

    void validate() const;
    nlohmann::json resolved() const;
};

struct Report {
    std::string text;
    nlohmann::json sidecar;
    std::string table_csv;  ///< optional delimiter-separated table
};

/// Cox reduction on the full data set.
Report run_reduce(const io::DataSet& data, const RunConfig& config);

/// Confidence set for the fixed comprehensive model `config.model` on all rows.
Report run_confset(const io::DataSet& data, const RunConfig& config);

/// Reduce, then the confidence set on subsample I, then prediction intervals
/// for each row of `predict` (raw covariates in data column order) when given.
Report run_pipeline(const io::DataSet& data, const RunConfig& config, const std::optional<Matrix>& predict = {});

/// One comparator's comprehensive model plus the confidence set it induces on I.
Report run_compare(const io::DataSet& data, const RunConfig& config);

/// Writes text to `path`, the sidecar to `path`.json and a nonempty table to `path`.csv.
void write_outputs(const Report& report, const std::string& path);

}  // namespace coxred::pipeline
