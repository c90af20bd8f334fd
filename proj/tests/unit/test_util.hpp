#pragma once

#include "coxred/linalg.hpp"
#include "coxred/rng.hpp"
#include "coxred/types.hpp"

#include <Eigen/Dense>

namespace testutil {

inline coxred::Matrix gaussian(Eigen::Index n, Eigen::Index p, coxred::Rng& rng) {
    coxred::Matrix m(n, p);
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = rng.normal();
    return m;
}

inline coxred::Vector gaussian(Eigen::Index n, coxred::Rng& rng) {
    coxred::Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
    return v;
}

inline coxred::Matrix centred_gaussian(Eigen::Index n, Eigen::Index p, coxred::Rng& rng) {
    return coxred::linalg::centre(gaussian(n, p, rng)).values;
}

inline coxred::Vector centred_gaussian(Eigen::Index n, coxred::Rng& rng) {
    return coxred::linalg::centre(gaussian(n, rng)).values;
}

// Normal-equations least squares, the independent oracle for the QR path.
inline coxred::Vector normal_equations(const coxred::Vector& y, const coxred::Matrix& x) {
    const coxred::Matrix xtx = x.transpose() * x;
    return xtx.inverse() * (x.transpose() * y);
}

inline coxred::Vector residual_of(const coxred::Vector& y, const coxred::Matrix& x) {
    if (x.cols() == 0) return y;
    return y - x * normal_equations(y, x);
}

inline double rel_gap(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testutil
