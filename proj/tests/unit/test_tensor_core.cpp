#include "adaprune/errors.hpp"
#include "adaprune/linalg.hpp"
#include "adaprune/matrix.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace adaprune {
namespace {

using testing::Rng;
using testing::random_matrix;
using testing::random_spd;

TEST(Matrix, RejectsNonFiniteEntries) {
    EXPECT_THROW(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}), DataError);
    EXPECT_THROW(Matrix(1, 1, {std::numeric_limits<double>::infinity()}), DataError);
    EXPECT_THROW(Matrix(2, 2, {1.0, 2.0, 3.0}), ShapeError);
}

TEST(Dims, AllPositive) {
    EXPECT_NO_THROW(Dims(1, 1, 1));
    EXPECT_THROW(Dims(0, 3, 4), PreconditionError);
    EXPECT_THROW(Dims(3, 3, 0), PreconditionError);
}

TEST(Matmul, IdentityAndAnnihilator) {
    const Matrix a{{1.5, -2.0, 3.0}, {0.25, 4.0, -1.0}};
    EXPECT_EQ(matmul(Matrix::identity(2), a), a);
    EXPECT_EQ(matmul(a, Matrix::zeros(3, 4)), Matrix::zeros(2, 4));
}

TEST(Matmul, MatchesTripleLoop) {
    Rng rng(11);
    const Matrix a = random_matrix(3, 2, rng);
    const Matrix b = random_matrix(2, 4, rng);
    EXPECT_LE(max_abs(matmul(a, b) - testing::naive_matmul(a, b)), 1e-15);
}

TEST(Matmul, ShapeMismatch) {
    EXPECT_THROW(matmul(Matrix(2, 3), Matrix(2, 3)), ShapeError);
    EXPECT_THROW(matmul_transposed(Matrix(2, 3), Matrix(2, 4)), ShapeError);
}

TEST(Matmul, AssociativeOnRandomTriples) {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = random_matrix(rng.index(1, 7), rng.index(1, 7), rng);
        const Matrix b = random_matrix(a.cols(), rng.index(1, 7), rng);
        const Matrix c = random_matrix(b.cols(), rng.index(1, 7), rng);
        const Matrix left = matmul(matmul(a, b), c);
        const Matrix right = matmul(a, matmul(b, c));
        EXPECT_LE(frobenius_norm(left - right), 1e-9 * std::max(1.0, frobenius_norm(left)));
    }
}

TEST(DampedInverse, IdentityAndDiagonal) {
    EXPECT_EQ(damped_inverse(Matrix::identity(3), 0.0), Matrix::identity(3));
    const Matrix inv = damped_inverse(Matrix{{2.0, 0.0}, {0.0, 4.0}}, 0.0);
    EXPECT_DOUBLE_EQ(inv(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(inv(1, 1), 0.25);
    EXPECT_DOUBLE_EQ(inv(0, 1), 0.0);
}

TEST(DampedInverse, MultiplyBackOnRandomSpd) {
    Rng rng(13);
    for (std::size_t d = 1; d <= 32; ++d) {
        const Matrix a = random_spd(d, rng);
        const double lambda = d == 4 ? 1e-4 : rng.uniform(0.0, 1e-3);
        Matrix damped = a;
        for (std::size_t i = 0; i < d; ++i) damped(i, i) += lambda;
        const Matrix inv = damped_inverse(a, lambda);
        EXPECT_LE(inf_norm(matmul(inv, damped) - Matrix::identity(d)), 1e-10) << "d=" << d;
        EXPECT_EQ(inv, inv.transpose());
    }
}

TEST(DampedInverse, ReportsFailingPivot) {
    // Rank one: the second pivot vanishes.
    const Matrix a{{1.0, 2.0}, {2.0, 4.0}};
    try {
        damped_inverse(a, 0.0);
        FAIL() << "expected SingularityError";
    } catch (const SingularityError& e) {
        EXPECT_EQ(e.pivot(), 1u);
    }
    EXPECT_NO_THROW(damped_inverse(a, 1e-4));
    EXPECT_THROW(damped_inverse(Matrix{{-1.0}}, 0.0), SingularityError);
}

TEST(DampedInverse, Preconditions) {
    EXPECT_THROW(damped_inverse(Matrix(2, 3), 0.0), ShapeError);
    EXPECT_THROW(damped_inverse(Matrix{{1.0, 0.5}, {0.4, 1.0}}, 0.0), PreconditionError);
    EXPECT_THROW(damped_inverse(Matrix::identity(2), -1.0), PreconditionError);
}

TEST(LeastSquares, ExactRecoveryFromSquareInput) {
    Rng rng(14);
    const Matrix x = random_matrix(4, 4, rng);
    const Matrix w = random_matrix(3, 4, rng);
    const Matrix fitted = least_squares(x, matmul(w, x), 0.0);
    EXPECT_LE(max_abs(fitted - w), 1e-8);
}

TEST(LeastSquares, ZeroTarget) {
    Rng rng(15);
    const Matrix x = random_matrix(3, 6, rng);
    EXPECT_EQ(least_squares(x, Matrix(2, 6), 0.0), Matrix(2, 3));
}

TEST(LeastSquares, MatchesNormalEquationOracle) {
    Rng rng(16);
    const Matrix x = random_matrix(3, 10, rng);
    const Matrix y = random_matrix(2, 10, rng);
    EXPECT_LE(max_abs(least_squares(x, y, 0.0) - testing::normal_equation_lstsq(x, y)), 1e-8);
}

TEST(LeastSquares, SingularWithoutDamping) {
    // Duplicate input rows make X·Xᵀ singular.
    const Matrix x{{1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}};
    const Matrix y{{1.0, 1.0, 1.0}};
    EXPECT_THROW(least_squares(x, y, 0.0), SingularityError);
    EXPECT_NO_THROW(least_squares(x, y, 1e-4));
}

TEST(LeastSquares, OptimalAgainstChallengers) {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t d_in = rng.index(1, 6);
        const std::size_t n = d_in + rng.index(0, 10);
        const Matrix x = random_matrix(d_in, n, rng);
        const Matrix w = random_matrix(2, d_in, rng);
        const Matrix y = matmul(w, x) + random_matrix(2, n, rng);
        const Matrix best = least_squares(x, y, 0.0);
        const double best_err = frobenius_norm(matmul(best, x) - y);
        EXPECT_LE(best_err, frobenius_norm(matmul(w, x) - y) + 1e-9);
        for (int c = 0; c < 10; ++c) {
            const Matrix challenger = random_matrix(2, d_in, rng);
            EXPECT_LE(best_err, frobenius_norm(matmul(challenger, x) - y) + 1e-9);
        }
    }
}

}  // namespace
}  // namespace adaprune
