#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coxred {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Zero-based column indices, kept sorted and duplicate-free by the helpers below.
using IndexSet = std::vector<int>;

IndexSet make_index_set(std::vector<int> indices);
IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);
IndexSet set_intersection(const IndexSet& a, const IndexSet& b);
bool is_subset(const IndexSet& sub, const IndexSet& super);
bool contains(const IndexSet& set, int index);

/// Columns of `x` listed in `cols`, in the given order.
Matrix select_columns(const Matrix& x, std::span<const int> cols);
/// Rows of `x` listed in `rows`, in the given order.
Matrix select_rows(const Matrix& x, std::span<const int> rows);
Vector select_rows(const Vector& y, std::span<const int> rows);

/// Either a known error standard deviation or a per-regression estimate.
struct SigmaMode {
    std::optional<double> known;

    static SigmaMode known_value(double sigma) { return SigmaMode{sigma}; }
    static SigmaMode estimate() { return SigmaMode{}; }
    bool is_known() const { return known.has_value(); }
    std::string describe() const;
};

}  // namespace coxred
