#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace coxred {

/// splitmix64 finaliser; used for seed derivation only.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent stream: seed XOR hash(stream, tag).
/// Adding streams never perturbs the seeds of earlier ones.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::string_view tag);

/// Seeded generator with platform-stable output.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The standard library distributions are not, so uniform and
/// normal variates are produced here from raw engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound) by rejection; bound > 0.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// Standard normal variate (Marsaglia polar method).
    double normal();

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace coxred
