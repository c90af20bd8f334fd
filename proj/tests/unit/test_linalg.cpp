#include "coxred/errors.hpp"
#include "coxred/linalg.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace coxred;
using namespace coxred::linalg;
using testutil::centred_gaussian;

TEST_CASE("centre") {
    Matrix m(3, 1);
    m << 1, 2, 3;
    const auto c = centre(m);
    CHECK(c.values(0, 0) == -1.0);
    CHECK(c.values(1, 0) == 0.0);
    CHECK(c.values(2, 0) == 1.0);
    CHECK(c.means(0) == 2.0);

    const auto again = centre(c.values);
    CHECK(again.values.isApprox(c.values));
    CHECK(std::abs(again.means(0)) < 1e-15);

    Rng rng(1);
    const auto r = centre(testutil::gaussian(50, 10, rng));
    CHECK(r.values.colwise().sum().cwiseAbs().maxCoeff() / 50.0 < 1e-12);

    CHECK_THROWS_AS(centre(Matrix(1, 3)), DomainError);
    CHECK_THROWS_AS(centre(Vector(1)), DomainError);
}

TEST_CASE("least squares") {
    SUBCASE("orthonormal design") {
        Rng rng(2);
        const Matrix q = orthonormal_basis(centred_gaussian(30, 4, rng));
        const auto fit = least_squares(q.col(0), q);
        CHECK((fit.coefficients - Vector::Unit(4, 0)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(fit.residuals.norm() < 1e-12);
        CHECK(fit.rank == 4);
    }
    SUBCASE("response in the span") {
        Rng rng(3);
        const Matrix x = centred_gaussian(25, 3, rng);
        const Vector y = x * Vector{{1.0, -2.0, 0.5}};
        CHECK(least_squares(y, x).residuals.norm() <= 1e-10 * y.norm());
    }
    SUBCASE("normal-equations oracle") {
        Rng rng(4);
        for (int rep = 0; rep < 20; ++rep) {
            const Matrix x = centred_gaussian(40, 5, rng);
            const Vector y = testutil::centred_gaussian(40, rng);
            const auto fit = least_squares(y, x);
            const Vector oracle = testutil::normal_equations(y, x);
            CHECK((fit.coefficients - oracle).norm() <= 1e-8 * oracle.norm());
            const Vector diag = (x.transpose() * x).inverse().diagonal();
            CHECK((fit.xtx_inv_diag - diag).norm() <= 1e-8 * diag.norm());
            CHECK((x.transpose() * fit.residuals).cwiseAbs().maxCoeff() <= 1e-8 * y.norm());
        }
    }
    SUBCASE("rank deficiency") {
        Rng rng(5);
        Matrix x = centred_gaussian(20, 3, rng);
        x.col(2) = x.col(0) + x.col(1);
        CHECK_THROWS_AS(least_squares(testutil::centred_gaussian(20, rng), x), RankDeficient);
        CHECK(numerical_rank(x) == 2);
        CHECK(orthonormal_basis(x).cols() == 2);
    }
    SUBCASE("too few rows") { CHECK_THROWS_AS(least_squares(Vector::Zero(3), Matrix::Identity(3, 3)), DomainError); }
}

TEST_CASE("projection") {
    Rng rng(6);
    const Matrix x = centred_gaussian(30, 4, rng);
    const Vector in_span = x * Vector{{1.0, 2.0, 3.0, 4.0}};
    CHECK((project(in_span, x) - in_span).norm() <= 1e-10 * in_span.norm());

    const Vector y = testutil::centred_gaussian(30, rng);
    const Vector orth = testutil::residual_of(y, x);
    CHECK(project(orth, x).norm() <= 1e-10 * orth.norm());

    for (int rep = 0; rep < 20; ++rep) {
        const Matrix xr = centred_gaussian(30, 5, rng);
        const Vector yr = testutil::centred_gaussian(30, rng);
        const Vector py = project(yr, xr);
        CHECK((project(py, xr) - py).norm() <= 1e-10 * yr.norm());
        CHECK((xr.transpose() * (yr - py)).cwiseAbs().maxCoeff() <= 1e-10 * yr.norm() * xr.norm());
    }
}

TEST_CASE("correlations") {
    Vector u{{1.0, -1.0, 0.0}}, v{{0.0, 1.0, -1.0}};
    CHECK(corr(u, u) == doctest::Approx(1.0));
    CHECK(corr(u, -u) == doctest::Approx(-1.0));
    CHECK(corr(u, v) == doctest::Approx(-0.5));
    CHECK_THROWS_AS(corr(u, Vector::Zero(3)), ZeroVector);

    Rng rng(7);
    const Matrix x = centred_gaussian(40, 3, rng);
    CHECK(multiple_corr(x.col(1), x) == doctest::Approx(1.0));
    const Vector r = testutil::residual_of(testutil::centred_gaussian(40, rng), x);
    CHECK(multiple_corr(r, x) < 1e-10);
    CHECK_THROWS_AS(multiple_corr(Vector::Zero(40), x), ZeroVector);
}

TEST_CASE("multiple correlation is the supremum over directions") {
    Rng rng(8);
    const Matrix x = centred_gaussian(30, 3, rng);
    const Vector u = testutil::centred_gaussian(30, rng);
    const double r = multiple_corr(u, x);
    double best = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const Vector a = testutil::gaussian(3, rng);
        best = std::max(best, std::abs(corr(u, x * a)));
    }
    CHECK(best <= r + 1e-6);
    CHECK(best > r - 0.02);
    for (Eigen::Index j = 0; j < x.cols(); ++j) CHECK(r >= std::abs(corr(u, x.col(j))) - 1e-10);
}

TEST_CASE("block correlation") {
    Rng rng(9);
    SUBCASE("orthogonal spans") {
        const Matrix q = orthonormal_basis(centred_gaussian(30, 5, rng));
        CHECK(block_corr(q.leftCols(2), q.rightCols(3)) < 1e-10);
    }
    SUBCASE("shared column") {
        const Matrix x = centred_gaussian(30, 3, rng);
        Matrix b(30, 2);
        b << x.col(0), testutil::centred_gaussian(30, rng);
        CHECK(block_corr(x, b) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("eigen oracle and symmetry") {
        for (int rep = 0; rep < 30; ++rep) {
            const Matrix a = centred_gaussian(60, 3, rng);
            const Matrix b = centred_gaussian(60, 4, rng);
            // R_A^{-T} from the Cholesky factor of X_A^T X_A, so Q_A = X_A R_A^{-1}
            const Eigen::LLT<Matrix> llt_a(a.transpose() * a);
            const Matrix qa = llt_a.matrixU().solve<Eigen::OnTheRight>(a);
            const Matrix pb = b * (b.transpose() * b).inverse() * b.transpose();
            const Eigen::SelfAdjointEigenSolver<Matrix> eig(qa.transpose() * pb * qa);
            const double oracle = std::sqrt(eig.eigenvalues().maxCoeff());
            CHECK(std::abs(block_corr(a, b) - oracle) < 1e-8);
            CHECK(std::abs(block_corr(a, b) - block_corr(b, a)) < 1e-10);
            CHECK(block_corr(a, b) < 1.0 - 1e-8);
        }
    }
}

TEST_CASE("Cochran decomposition") {
    Rng rng(10);
    SUBCASE("empty F") {
        const Matrix x = centred_gaussian(30, 3, rng);
        const Vector y = testutil::centred_gaussian(30, rng);
        const auto s = cochran_decompose(y, {0, 1}, {}, x);
        CHECK((s.lhs - s.rhs).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((s.lhs - testutil::normal_equations(y, x.leftCols(2))).norm() < 1e-10);
    }
    SUBCASE("orthogonal F leaves the coefficient unchanged") {
        const Matrix q = orthonormal_basis(centred_gaussian(30, 4, rng));
        const Vector y = testutil::centred_gaussian(30, rng);
        const auto s = cochran_decompose(y, {0}, {1, 2, 3}, q);
        CHECK(std::abs(s.lhs(0) - s.direct(0)) < 1e-12);
        CHECK(s.indirect.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("random instances against independent fits") {
        for (int rep = 0; rep < 200; ++rep) {
            const Matrix x = centred_gaussian(50, 4, rng);
            const Vector y = testutil::centred_gaussian(50, rng);
            const auto s = cochran_decompose(y, {0}, {1, 2, 3}, x);
            const Vector full = testutil::normal_equations(y, x);
            const double marginal = testutil::normal_equations(y, x.leftCols(1))(0);
            const Matrix theta_fe = (x.col(0).transpose() * x.col(0)).inverse() * (x.col(0).transpose() * x.rightCols(3));
            const double rhs = full(0) + (theta_fe * full.tail(3))(0);
            CHECK(std::abs(s.lhs(0) - marginal) <= 1e-8 * (1.0 + std::abs(marginal)));
            CHECK(std::abs(s.rhs(0) - rhs) <= 1e-8 * (1.0 + std::abs(marginal)));
            CHECK(std::abs(s.lhs(0) - s.rhs(0)) <= 1e-8 * (1.0 + std::abs(s.lhs(0))));
        }
    }
    SUBCASE("errors") {
        const Matrix x = centred_gaussian(30, 3, rng);
        const Vector y = testutil::centred_gaussian(30, rng);
        CHECK_THROWS_AS(cochran_decompose(y, {0, 1}, {1, 2}, x), OverlappingSets);
        Matrix xd = x;
        xd.col(2) = xd.col(0);
        CHECK_THROWS_AS(cochran_decompose(y, {0}, {1, 2}, xd), RankDeficient);
    }
}
