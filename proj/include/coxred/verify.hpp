#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace coxred::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0;  ///< 0 means no runtime limit
};

struct VerifyOptions {
    unsigned threads = 1;
    std::uint64_t seed = 20'240'501;
};

constexpr int kCriteria = 12;

/// Runs one acceptance criterion (1..12) against its independent oracle.
/// A criterion with a runtime limit fails when it overruns.
CriterionResult run_criterion(int id, const VerifyOptions& options);

/// All criteria, or the listed ones, in order.
std::vector<CriterionResult> run_suite(const VerifyOptions& options, const std::vector<int>& only = {});

/// "PASS [ 3] block correlation ... (0.41 s)" style line.
std::string format_line(const CriterionResult& r);

}  // namespace coxred::verify
