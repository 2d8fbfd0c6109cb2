#include "adaprune/linalg.hpp"

#include "adaprune/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace adaprune {

namespace {

constexpr double kSymmetryTol = 1e-10;

void require_symmetric(const Matrix& a, const char* op) {
    if (!a.is_square()) throw ShapeError(std::string(op) + ": matrix is not square");
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double scale = std::max({1.0, std::abs(a(i, j)), std::abs(a(j, i))});
            if (std::abs(a(i, j) - a(j, i)) > kSymmetryTol * scale) {
                std::ostringstream os;
                os << op << ": matrix is not symmetric at (" << i << "," << j << ")";
                throw PreconditionError(os.str());
            }
        }
    }
}

void require_nonneg(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw PreconditionError("damping lambda must be a finite non-negative value");
    }
}

// Solves L·Lᵀ·X = B in place (B is n x m).
void cholesky_solve_in_place(const Matrix& l, Matrix& b) {
    const std::size_t n = l.rows();
    const std::size_t m = b.cols();
    for (std::size_t col = 0; col < m; ++col) {
        for (std::size_t i = 0; i < n; ++i) {
            double v = b(i, col);
            for (std::size_t k = 0; k < i; ++k) v -= l(i, k) * b(k, col);
            b(i, col) = v / l(i, i);
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double v = b(ii, col);
            for (std::size_t k = ii + 1; k < n; ++k) v -= l(k, ii) * b(k, col);
            b(ii, col) = v / l(ii, ii);
        }
    }
}

Matrix with_damping(const Matrix& a, double lambda) {
    Matrix d = a;
    for (std::size_t i = 0; i < d.rows(); ++i) d(i, i) += lambda;
    return d;
}

}  // namespace

Matrix cholesky(const Matrix& a) {
    if (!a.is_square()) throw ShapeError("cholesky: matrix is not square");
    const std::size_t n = a.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    // Pivots at rounding level relative to the diagonal count as zero.
    const double floor =
        static_cast<double>(std::max<std::size_t>(n, 1)) * std::numeric_limits<double>::epsilon() *
        max_diag;

    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > floor)) {
            std::ostringstream os;
            os << "matrix is not positive definite: pivot " << j << " is " << diag
               << "; increase the damping lambda";
            throw SingularityError(os.str(), j);
        }
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / ljj;
        }
    }
    return l;
}

Matrix damped_inverse(const Matrix& a, double lambda) {
    require_nonneg(lambda);
    require_symmetric(a, "damped_inverse");
    const Matrix l = cholesky(with_damping(a, lambda));
    Matrix inv = Matrix::identity(a.rows());
    cholesky_solve_in_place(l, inv);
    for (std::size_t i = 0; i < inv.rows(); ++i) {
        for (std::size_t j = i + 1; j < inv.cols(); ++j) {
            const double avg = 0.5 * (inv(i, j) + inv(j, i));
            inv(i, j) = avg;
            inv(j, i) = avg;
        }
    }
    return inv;
}

Matrix least_squares(const Matrix& xhat, const Matrix& y, double lambda) {
    require_nonneg(lambda);
    if (xhat.cols() != y.cols()) {
        throw ShapeError("least_squares: input and target sample counts differ");
    }
    Matrix gram = matmul_transposed(xhat, xhat);  // d_in x d_in
    for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) += lambda;
    const Matrix l = cholesky(gram);
    // Solve (X̂X̂ᵀ + λI)·W̄ᵀ = X̂·Yᵀ.
    Matrix rhs = matmul_transposed(xhat, y);  // d_in x d_out
    cholesky_solve_in_place(l, rhs);
    return rhs.transpose();
}

}  // namespace adaprune
