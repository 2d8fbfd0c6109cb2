#pragma once

#include "adaprune/matrix.hpp"

namespace adaprune {

/// Lower-triangular Cholesky factor L with a = L·Lᵀ.
///
/// Throws SingularityError carrying the failing pivot index when `a` is not
/// numerically positive definite.
Matrix cholesky(const Matrix& a);

/// (a + lambda·I)⁻¹ through a Cholesky factorization. `a` must be square and
/// symmetric within 1e-10; the result is exactly symmetric.
Matrix damped_inverse(const Matrix& a, double lambda);

/// Ridge least squares in the samples-as-columns orientation.
///
/// Given `xhat` (d_in x N) and `y` (d_out x N), returns the d_out x d_in
/// matrix W̄ = Y·X̂ᵀ·(X̂·X̂ᵀ + λI)⁻¹, which minimizes
/// ‖W̄·X̂ − Y‖²_F + λ‖W̄‖²_F. At λ = 0 a rank-deficient X̂ raises
/// SingularityError.
Matrix least_squares(const Matrix& xhat, const Matrix& y, double lambda);

}  // namespace adaprune
