#pragma once

#include "coxred/hypercube.hpp"
#include "coxred/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace coxred::reduction {

struct ReductionConfig {
    int dims_round1 = 3;
    int dims_round2 = 2;
    int side_round1 = 0;  ///< 0 selects the smallest side that fits
    int side_round2 = 0;  ///< 0 selects the smallest side that fits
    double alpha = 0.01;  ///< second-round significance level
    SigmaMode sigma = SigmaMode::estimate();
    double pair_threshold = 0.97;
    double subsample_fraction = 0.35;
    int rerandomisations = 1;
    double vote_fraction = 0.5;
    std::uint64_t seed = 0;
    int top_m = 2;
    int fibre_votes_round1 = 2;
    int max_rounds = 3;
    unsigned threads = 1;
    bool keep_wald = false;  ///< keep per-fibre Wald vectors in the trace

    /// Throws ConfigError describing the first invalid field.
    void validate() const;
};

/// Wald vector of one fibre regression, kept when diagnostics are requested.
struct FibreDiagnostic {
    int axis = 0;
    std::vector<int> members;
    std::vector<double> wald;
    bool skipped = false;
};

struct RoundResult {
    IndexSet retained;
    std::size_t fibres = 0;
    std::size_t skipped_fibres = 0;
    std::vector<FibreDiagnostic> diagnostics;
};

/// Retains e when |T_e| is among the top_m absolute values of its fibre in at
/// least fibre_votes_round1 of the fibres through e. Ties at the boundary are
/// retained; single-member fibres count as an event; a rank-deficient fibre
/// is skipped and counts as a non-event for all its members.
RoundResult round1(const Vector& y, const Matrix& x, const hypercube::Arrangement& arrangement,
                   const ReductionConfig& config);

/// Retains e when its Wald entry is significant at level alpha in at least
/// ceil(d/2) of its d fibres.
RoundResult round2(const Vector& y, const Matrix& x, const hypercube::Arrangement& arrangement,
                   const ReductionConfig& config);

struct SampleSplit {
    IndexSet first;   ///< I: first reduction and model assessment
    IndexSet second;  ///< complement: second reduction
};

/// |I| = round(fraction * n), both parts at least 2; deterministic per seed.
SampleSplit split_sample(std::size_t n, double fraction, std::uint64_t seed);

struct RoundTrace {
    int round = 0;
    std::string rule;
    std::string subsample;  ///< "I" or "Ic"
    int dims = 0;
    int side = 0;
    std::uint64_t seed = 0;
    IndexSet input;
    IndexSet retained;
    std::size_t fibres = 0;
    std::size_t skipped_fibres = 0;
    std::vector<FibreDiagnostic> diagnostics;
};

struct RunTrace {
    int run = 0;
    std::vector<RoundTrace> rounds;
    IndexSet round1_survivors;
    IndexSet retained;  ///< after unpairing
};

struct StabilityReport {
    bool applicable = false;
    Matrix jaccard;
    double mean_jaccard = 1.0;
    std::vector<std::pair<int, double>> retention_frequency;  ///< (index, share of runs)
    bool fragile = false;
};

struct ReductionOutcome {
    IndexSet comprehensive;
    std::vector<RunTrace> runs;
    hypercube::PairingGroups pairing;
    IndexSet excluded;  ///< zero-variance columns kept out of the arrangement
    SampleSplit split;
    std::uint64_t split_seed = 0;
    int vote_threshold = 1;
    StabilityReport stability;

    std::vector<IndexSet> per_run_sets() const;
};

/// Full reduction: pair, split, then B runs of {cube round on I, square round
/// on the complement, extra alternating rounds while the survivors outnumber
/// the observations}, majority vote, unpair.
///
/// Run b draws its arrangements from derive_seed(seed, b, "roundR") and the
/// sample split from derive_seed(seed, 0, "split"). An empty comprehensive
/// model is a valid outcome.
ReductionOutcome cox_reduce(const Vector& y, const Matrix& x, const ReductionConfig& config);

/// Pairwise Jaccard similarity of the per-run sets and per-variable retention
/// frequencies; flags fragility when the mean similarity is below 0.5.
StabilityReport stability_report(const ReductionOutcome& outcome);

std::string round1_rule_name(const ReductionConfig& config);
std::string round2_rule_name(const ReductionConfig& config);

}  // namespace coxred::reduction
