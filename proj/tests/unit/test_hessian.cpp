#include "adaprune/errors.hpp"
#include "adaprune/hessian.hpp"
#include "adaprune/linalg.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace adaprune {
namespace {

using testing::Rng;

TEST(BuildHessian, OrthonormalColumns) {
    EXPECT_EQ(build_hessian(Matrix::identity(2), 0.0), Matrix::identity(2));
}

TEST(BuildHessian, RankOnePlusDamping) {
    const Matrix x{{1.0}, {2.0}};
    EXPECT_EQ(build_hessian(x, 0.5), (Matrix{{1.5, 2.0}, {2.0, 4.5}}));
}

TEST(BuildHessian, MatchesNaiveAccumulation) {
    Rng rng(21);
    const Matrix x = testing::random_matrix(4, 7, rng);
    Matrix expected(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < 7; ++k) acc += x(i, k) * x(j, k);
            expected(i, j) = acc;
        }
    EXPECT_EQ(build_hessian(x, 0.0), expected);
}

TEST(BuildHessian, Preconditions) {
    EXPECT_THROW(build_hessian(Matrix(0, 0), 0.0), ShapeError);
    EXPECT_THROW(build_hessian(Matrix::identity(2), -1.0), PreconditionError);
}

TEST(HessianState, InitInverts) {
    EXPECT_EQ(init_state(Matrix::identity(3)).inverse(), Matrix::identity(3));
    EXPECT_DOUBLE_EQ(init_state(Matrix{{4.0}}).inverse()(0, 0), 0.25);

    Rng rng(22);
    const Matrix h = testing::random_spd(5, rng);
    const HessianState s = init_state(h);
    EXPECT_LE(inf_norm(matmul(s.inverse(), h) - Matrix::identity(5)), 1e-9);
    EXPECT_EQ(s.active_count(), 5u);
}

TEST(HessianState, SingularInitAsksForDamping) {
    const Matrix h{{1.0, 1.0}, {1.0, 1.0}};
    try {
        init_state(h);
        FAIL() << "expected SingularityError";
    } catch (const SingularityError& e) {
        EXPECT_NE(std::string(e.what()).find("lambda"), std::string::npos);
    }
}

TEST(HessianState, RemoveFromIdentity) {
    const HessianState s = remove_index(init_state(Matrix::identity(3)), 1);
    const Matrix& inv = s.inverse();
    EXPECT_EQ(testing::submatrix(inv, {0, 2}), Matrix::identity(2));
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(inv(1, i), 0.0);
        EXPECT_EQ(inv(i, 1), 0.0);
    }
    EXPECT_EQ(s.active_indices(), (std::vector<std::size_t>{0, 2}));
}

TEST(HessianState, RemoveLastIndexExhausts) {
    HessianState s = init_state(Matrix{{2.0}});
    s.remove(0);
    EXPECT_EQ(s.active_count(), 0u);
    EXPECT_TRUE(s.active_indices().empty());
    EXPECT_EQ(s.inverse(), Matrix(1, 1));
}

TEST(HessianState, RemoveErrors) {
    HessianState s = init_state(Matrix::identity(3));
    s.remove(0);
    EXPECT_THROW(s.remove(0), IndexError);
    EXPECT_THROW(s.remove(7), IndexError);
}

TEST(HessianState, PivotFloorAborts) {
    // [H⁻¹]_00 = 1e-13 sits below the 1e-12 floor.
    HessianState s = init_state(Matrix{{1e13, 0.0}, {0.0, 1.0}});
    EXPECT_THROW(s.remove(0), SingularityError);
    EXPECT_NO_THROW(s.remove(1));
}

TEST(HessianState, RemoveMatchesSubmatrixInverse) {
    Rng rng(23);
    const Matrix h = testing::random_spd(6, rng);
    for (std::size_t p = 0; p < 6; ++p) {
        const HessianState s = remove_index(init_state(h), p);
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < 6; ++i)
            if (i != p) keep.push_back(i);
        const Matrix direct = damped_inverse(testing::submatrix(h, keep), 0.0);
        EXPECT_LE(inf_norm(testing::submatrix(s.inverse(), keep) - direct), 1e-8);
    }
}

TEST(HessianState, RemovalSequencesTrackSubmatrixInverse) {
    Rng rng(24);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = rng.index(2, 16);
        const Matrix h = testing::random_spd(d, rng);
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng.engine());
        const std::size_t steps = rng.index(1, d - 1);

        HessianState s = init_state(h);
        for (std::size_t i = 0; i < steps; ++i) s.remove(order[i]);
        std::vector<std::size_t> keep = s.active_indices();
        const Matrix direct = testing::gauss_jordan_inverse(testing::submatrix(h, keep));
        const Matrix incremental = testing::submatrix(s.inverse(), keep);
        EXPECT_LE(inf_norm(incremental - direct), 1e-8 * inf_norm(direct));
        EXPECT_EQ(s.inverse(), s.inverse().transpose());
    }
}

TEST(HessianState, ScaleCovariance) {
    Rng rng(25);
    const Matrix h = testing::random_spd(5, rng);
    for (double c : {2.0, 4.0, 0.5}) {
        HessianState base = init_state(h);
        HessianState scaled = init_state(c * h);
        EXPECT_LE(max_abs(scaled.inverse() - (1.0 / c) * base.inverse()),
                  1e-12 * max_abs(base.inverse()));
        base.remove(2);
        scaled.remove(2);
        EXPECT_LE(max_abs(scaled.inverse() - (1.0 / c) * base.inverse()),
                  1e-12 * max_abs(base.inverse()));
    }
}

}  // namespace
}  // namespace adaprune
