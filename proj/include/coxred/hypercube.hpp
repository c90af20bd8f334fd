#pragma once

#include "coxred/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace coxred::hypercube {

struct Shape {
    int dims = 0;
    int side = 0;
};

/// Smallest side k >= 2 with k^dims >= p_effective; surplus cells stay empty.
Shape choose_shape(std::size_t p_effective, int dims);

/// Variable indices placed into a dims-dimensional array of side `side`.
/// Cell c has coordinates (c mod k, (c / k) mod k, ...); axis 0 varies fastest.
class Arrangement {
public:
    static constexpr int kEmpty = -1;

    Arrangement(int dims, int side, std::uint64_t seed, std::vector<int> cells);

    int dims() const { return dims_; }
    int side() const { return side_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t cell_count() const { return cells_.size(); }
    const std::vector<int>& cells() const { return cells_; }
    int at(std::size_t cell) const { return cells_[cell]; }

    /// Arranged indices in increasing order.
    IndexSet indices() const;
    std::size_t size() const { return placement_.size(); }

    /// Cell holding `index`, or -1 when it is not arranged.
    int cell_of(int index) const;
    std::vector<int> coordinates(std::size_t cell) const;

    /// Number of other `marked` indices sharing a fibre with `index`.
    int companions(int index, const IndexSet& marked) const;
    /// Number of the fibres through `index` that hold another `marked` index.
    int accompanied_fibres(int index, const IndexSet& marked) const;

    bool operator==(const Arrangement& other) const;

private:
    int dims_;
    int side_;
    std::uint64_t seed_;
    std::vector<int> cells_;
    std::vector<std::pair<int, int>> placement_;  // (index, cell), sorted by index
};

/// Uniformly random injection of `indices` into side^dims cells, driven by a
/// Fisher-Yates shuffle of the cell list. Throws Overflow when the indices do
/// not fit.
Arrangement randomise(const IndexSet& indices, int dims, int side, std::uint64_t seed);

/// One regression block: a row, column, tube or higher-order line.
struct Fibre {
    int axis = 0;
    std::vector<int> anchor;   ///< coordinates on the other axes, in axis order
    std::vector<int> members;  ///< variable indices along the line, empty cells skipped
};

/// All nonempty fibres, axis-major, anchors in mixed-radix order.
std::vector<Fibre> fibres(const Arrangement& a);

/// Near-collinear columns merged under a single representative.
struct PairingGroups {
    std::vector<IndexSet> groups;  ///< partition of 0..p-1; front() is the representative
    double threshold = 0.97;
    std::vector<int> representative;  ///< representative[j] for every column j

    IndexSet representatives() const;
    std::size_t multi_member_groups() const;
};

/// Single-linkage grouping of columns with |corr| >= threshold. Zero-norm
/// columns stay singletons.
PairingGroups pair_collinear(const Matrix& x, double threshold);

/// Replaces each retained representative by its full group.
IndexSet unpair(const IndexSet& retained, const PairingGroups& groups);

/// Structured text record (JSON) of an arrangement, and its inverse.
std::string arrangement_record(const Arrangement& a);
Arrangement arrangement_from_record(const std::string& record);

}  // namespace coxred::hypercube
