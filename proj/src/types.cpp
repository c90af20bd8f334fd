#include "coxred/types.hpp"

#include <algorithm>
#include <iterator>
#include <sstream>

namespace coxred {

IndexSet make_index_set(std::vector<int> indices) {
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    return indices;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet set_intersection(const IndexSet& a, const IndexSet& b) {
    IndexSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool is_subset(const IndexSet& sub, const IndexSet& super) {
    return std::includes(super.begin(), super.end(), sub.begin(), sub.end());
}

bool contains(const IndexSet& set, int index) {
    return std::binary_search(set.begin(), set.end(), index);
}

Matrix select_columns(const Matrix& x, std::span<const int> cols) {
    Matrix out(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = x.col(cols[j]);
    return out;
}

Matrix select_rows(const Matrix& x, std::span<const int> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
    return out;
}

Vector select_rows(const Vector& y, std::span<const int> rows) {
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
    return out;
}

std::string SigmaMode::describe() const {
    if (!known) return "estimate";
    std::ostringstream os;
    os.precision(17);
    os << "known(" << *known << ")";
    return os.str();
}

}  // namespace coxred
