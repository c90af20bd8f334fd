#pragma once

#include "coxred/reduction.hpp"
#include "coxred/rng.hpp"
#include "coxred/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coxred::simulation {

struct CovariateLaw {
    enum class Kind { IidGaussian, Equicorrelated, Block, Duplicated };
    Kind kind = Kind::IidGaussian;
    double rho = 0.0;
    std::size_t block_size = 0;
    /// For Duplicated: each group's later members are exact copies of its first.
    std::vector<std::vector<int>> duplicate_groups;

    static CovariateLaw iid() { return {}; }
    static CovariateLaw equicorrelated(double rho) { return {Kind::Equicorrelated, rho, 0, {}}; }
    static CovariateLaw block(double rho, std::size_t size) { return {Kind::Block, rho, size, {}}; }
    static CovariateLaw duplicated(std::vector<std::vector<int>> groups) {
        return {Kind::Duplicated, 0.0, 0, std::move(groups)};
    }
    std::string describe() const;
};

/// Linear model Y = X theta0 + sigma * eps with Gaussian rows drawn from `law`.
struct GenSpec {
    std::size_t n = 0;
    std::size_t p = 0;
    Vector theta0;  ///< length p; the support is its nonzero pattern
    double sigma = 1.0;
    CovariateLaw law;
    std::uint64_t seed = 0;

    IndexSet support() const;
    void validate() const;

    /// theta0 equal to `value` on the first `s` columns.
    static GenSpec sparse(std::size_t n, std::size_t p, std::size_t s, double value, double sigma,
                          CovariateLaw law, std::uint64_t seed);
};

struct SimData {
    Vector y;  ///< centred
    Matrix x;  ///< column-centred
    Vector theta0;
    IndexSet support;
};

/// Deterministic per seed; returns centred data so that sigma = 0 gives
/// y = x theta0 exactly.
SimData generate(const GenSpec& spec);

/// Covariates only, uncentred.
Matrix draw_covariates(std::size_t n, std::size_t p, const CovariateLaw& law, Rng& rng);

struct Estimate {
    std::string name;
    double value = 0.0;
    double se = 0.0;
    double target = 0.0;
    std::string rule;  ///< pass/fail rule, verbatim
    bool pass = true;
};

struct ExperimentReport {
    std::string name;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<Estimate> estimates;
    std::vector<std::string> notes;
    std::vector<std::string> table_header;
    std::vector<std::vector<double>> table;  ///< one row per replicate
    bool pass = true;

    void add(Estimate e);
};

/// Generator moment check at n = 10^4 with batch-means standard errors.
ExperimentReport generator_self_test(const CovariateLaw& law, std::size_t p, std::uint64_t seed);

/// Mean marked companions of a marked index in a randomised k^d arrangement
/// against d(|A|-1)(k-1)/(k^d-1).
struct CompanionConfig {
    int marked = 2;
    int side = 3;
    int dims = 3;
    std::size_t arrangements = 100'000;
    std::uint64_t seed = 0;
};
double expected_companions(int marked, int side, int dims);
ExperimentReport companion_experiment(const CompanionConfig& cfg);

/// Lower bound 1 - |A|(|A|-1)(|A|-2)(k-1)^2 / ((k^3-1)(k^3-2)) on the chance
/// that every marked index is alone in at least two of its three fibres.
double retention_bound(int marked, int side);

/// Union bound over (centre, unordered pair) choices:
/// 1 - 3|A|(|A|-1)(|A|-2)(k-1)^2 / ((k^3-1)(k^3-2)). Exact when |A| = 3.
double retention_union_bound(int marked, int side);

struct RetentionConfig {
    int marked = 10;
    int side = 10;
    std::size_t arrangements = 100'000;  ///< combinatorial part
    std::size_t full_replicates = 0;     ///< round-1 part; 0 skips it
    std::size_t n = 300;
    double rho_marked = 0.5;
    double sigma = 1.0;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};
ExperimentReport retention_probability_experiment(const RetentionConfig& cfg);

struct SpuriousConfig {
    std::vector<std::size_t> n_grid{50, 100, 200, 400};
    std::size_t p_noise = 500;
    std::size_t pseudo_signals = 1;
    int side = 0;  ///< 0 picks the smallest cube side
    std::size_t replicates = 50;
    double ratio_bound = 0.0;  ///< 0 means 2k
    std::uint64_t seed = 0;
    unsigned threads = 1;
};
/// Largest spurious squared correlation met in a randomised cube sweep, a
/// lower bound on the combinatorial maximum over all fibre-sized subsets.
double sweep_spurious_correlation(const Vector& y, const Matrix& x, const IndexSet& pseudo_signal,
                                  const hypercube::Arrangement& arrangement);
ExperimentReport spurious_correlation_experiment(const SpuriousConfig& cfg);

struct CoverageConfig {
    std::size_t n = 200;
    std::size_t p = 125;
    std::size_t s = 4;
    double signal = 1.0;
    double sigma = 1.0;
    double theta = 0.05;
    int s_max = 4;
    std::size_t replicates = 500;
    std::size_t null_replicates = 2000;
    std::size_t null_model_size = 6;
    reduction::ReductionConfig reduction;  ///< seed is overridden per replicate; sigma applies to the fibre regressions only
    std::uint64_t seed = 0;
    unsigned threads = 1;
    CoverageConfig() {
        reduction.rerandomisations = 5;
        reduction.alpha = 0.01;
    }
};
ExperimentReport coverage_experiment(const CoverageConfig& cfg);

struct NoncentralConfig {
    std::size_t n = 100;
    Vector gamma0;   ///< coefficients on the comprehensive columns
    IndexSet sub;    ///< submodel positions within the comprehensive columns
    double sigma = 1.0;
    bool orthogonal_omitted = false;  ///< make omitted columns orthogonal to the submodel span
    std::size_t replicates = 2000;
    std::uint64_t seed = 0;
};
ExperimentReport noncentral_moment_experiment(const NoncentralConfig& cfg);

struct ContrastConfig {
    std::size_t n = 200;
    std::size_t p = 125;
    std::size_t s = 4;
    double rho = 0.9;
    std::size_t block_size = 5;
    std::size_t signal_stride = 1;  ///< gap between signal columns; 1 packs them into the first block
    double signal = 0.25;
    double sigma = 1.0;
    double theta = 0.05;
    int s_max = 4;
    std::size_t replicates = 100;
    reduction::ReductionConfig reduction;  ///< seed is overridden per replicate
    std::uint64_t seed = 0;
    unsigned threads = 1;
    ContrastConfig() {
        reduction.rerandomisations = 5;
        reduction.alpha = 0.01;
    }
};
/// Head-to-head: undertuned LASSO vs Cox reduction signal misses, and
/// confidence-set sizes from marginal screening vs Cox reduction at equal
/// comprehensive-model size.
ExperimentReport comparator_contrast_experiment(const ContrastConfig& cfg);

}  // namespace coxred::simulation
