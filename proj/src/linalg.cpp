#include "coxred/linalg.hpp"

#include "coxred/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coxred::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::size_t rank_from_singular_values(const Vector& sv, Eigen::Index n) {
    if (sv.size() == 0) return 0;
    const double tol = sv.maxCoeff() * static_cast<double>(n) * kEps;
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++r;
    return r;
}

// Thin Q of a full-rank block, or RankDeficient.
Matrix thin_q(const Matrix& xk) {
    const Eigen::HouseholderQR<Matrix> qr(xk);
    const Matrix r = qr.matrixQR().topRows(xk.cols()).triangularView<Eigen::Upper>();
    const Eigen::JacobiSVD<Matrix> svd(r);
    const std::size_t rank = rank_from_singular_values(svd.singularValues(), xk.rows());
    if (rank < static_cast<std::size_t>(xk.cols())) throw RankDeficient(rank, static_cast<std::size_t>(xk.cols()));
    return qr.householderQ() * Matrix::Identity(xk.rows(), xk.cols());
}

}  // namespace

CentredView centre(const Matrix& m) {
    if (m.rows() < 2) throw DomainError("centring needs at least two rows");
    CentredView out;
    out.means = m.colwise().mean().transpose();
    out.values = m.rowwise() - out.means.transpose();
    return out;
}

CentredVector centre(const Vector& v) {
    if (v.size() < 2) throw DomainError("centring needs at least two entries");
    CentredVector out;
    out.mean = v.mean();
    out.values = v.array() - out.mean;
    return out;
}

std::size_t numerical_rank(const Matrix& xk) {
    if (xk.cols() == 0 || xk.rows() == 0) return 0;
    const Eigen::JacobiSVD<Matrix> svd(xk);
    return rank_from_singular_values(svd.singularValues(), xk.rows());
}

Matrix orthonormal_basis(const Matrix& xk) {
    if (xk.cols() == 0) return Matrix(xk.rows(), 0);
    const Eigen::JacobiSVD<Matrix> svd(xk, Eigen::ComputeThinU);
    const std::size_t r = rank_from_singular_values(svd.singularValues(), xk.rows());
    return svd.matrixU().leftCols(static_cast<Eigen::Index>(r));
}

LstsqFit least_squares(const Vector& y, const Matrix& xk) {
    const Eigen::Index n = xk.rows();
    const Eigen::Index k = xk.cols();
    if (y.size() != n) throw DomainError("response length does not match design rows");
    LstsqFit fit;
    if (k == 0) {
        fit.coefficients = Vector(0);
        fit.residuals = y;
        fit.xtx_inv_diag = Vector(0);
        return fit;
    }
    if (n <= k) throw DomainError("least squares needs more rows than columns");

    const Eigen::HouseholderQR<Matrix> qr(xk);
    const Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Eigen::JacobiSVD<Matrix> svd(r);
    fit.rank = rank_from_singular_values(svd.singularValues(), n);
    if (fit.rank < static_cast<std::size_t>(k)) throw RankDeficient(fit.rank, static_cast<std::size_t>(k));

    fit.coefficients = qr.solve(y);
    fit.residuals = y - xk * fit.coefficients;
    const Matrix r_inv = r.triangularView<Eigen::Upper>().solve(Matrix::Identity(k, k));
    fit.xtx_inv_diag = r_inv.rowwise().squaredNorm();
    return fit;
}

Vector project(const Vector& y, const Matrix& xk) {
    if (xk.cols() == 0) return Vector::Zero(y.size());
    const Matrix q = thin_q(xk);
    return q * (q.transpose() * y);
}

double corr(const Vector& u, const Vector& v) {
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu < 1e-300 || nv < 1e-300) throw ZeroVector("corr");
    return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

double multiple_corr(const Vector& u, const Matrix& x) {
    const double nu = u.norm();
    if (nu < 1e-300) throw ZeroVector("multiple_corr");
    const Matrix q = orthonormal_basis(x);
    if (q.cols() == 0) return 0.0;
    return std::clamp((q.transpose() * u).norm() / nu, 0.0, 1.0);
}

double block_corr(const Matrix& xa, const Matrix& xb) {
    if (xa.cols() == 0 || xb.cols() == 0) return 0.0;
    const Matrix qa = thin_q(xa);
    const Matrix qb = thin_q(xb);
    const Matrix m = qa.transpose() * qb;
    const Matrix gram = m * m.transpose();
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues()(eig.eigenvalues().size() - 1);
    return std::clamp(std::sqrt(std::max(0.0, top)), 0.0, 1.0);
}

CochranSides cochran_decompose(const Vector& y, const IndexSet& e, const IndexSet& f, const Matrix& x) {
    if (!set_intersection(e, f).empty()) throw OverlappingSets();
    if (e.empty()) throw DomainError("cochran_decompose needs a nonempty E");
    const Matrix xe = select_columns(x, e);
    const Matrix xf = select_columns(x, f);

    CochranSides out;
    out.lhs = least_squares(y, xe).coefficients;

    Matrix xk(x.rows(), xe.cols() + xf.cols());
    xk << xe, xf;
    const LstsqFit joint = least_squares(y, xk);
    const auto ne = static_cast<Eigen::Index>(e.size());
    out.direct = joint.coefficients.head(ne);
    if (f.empty()) {
        out.indirect = Vector::Zero(ne);
    } else {
        // theta_{F:E} = (X_E^T X_E)^{-1} X_E^T X_F, one regression per column of X_F
        const Eigen::HouseholderQR<Matrix> qr(xe);
        const Matrix theta_fe = qr.solve(xf);
        out.indirect = theta_fe * joint.coefficients.tail(static_cast<Eigen::Index>(f.size()));
    }
    out.rhs = out.direct + out.indirect;
    return out;
}

}  // namespace coxred::linalg
