#pragma once

#include "adaprune/matrix.hpp"

#include <cstddef>
#include <vector>

namespace adaprune {

/// Default diagonal damping applied to Hessians and recalibration solves.
inline constexpr double kDefaultLambda = 1e-4;

/// Diagonal entries of the inverse Hessian below this abort a removal.
inline constexpr double kPivotFloor = 1e-12;

/// H = X·Xᵀ + λ·I for activations X stored as d_in x N.
Matrix build_hessian(const Matrix& x, double lambda);

/// Inverse Hessian restricted to the still-active input positions.
///
/// The inverse stays full-size; rows and columns of removed positions are
/// held at exactly zero so indices keep their original meaning throughout a
/// pruning trajectory.
class HessianState {
public:
    /// Inverts `h` (which must be SPD). Throws SingularityError otherwise.
    explicit HessianState(const Matrix& h);

    std::size_t dim() const noexcept { return inv_.rows(); }
    std::size_t active_count() const noexcept { return active_count_; }
    bool is_active(std::size_t p) const { return active_.at(p) != 0; }
    std::vector<std::size_t> active_indices() const;

    const Matrix& inverse() const noexcept { return inv_; }
    double diag(std::size_t p) const { return inv_(p, p); }

    /// Rank-1 Gaussian-elimination downdate removing position `p`:
    /// inv ← inv − inv[:,p]·inv[p,:] / inv[p,p], then row/col p zeroed.
    void remove(std::size_t p);

private:
    Matrix inv_;
    std::vector<char> active_;
    std::size_t active_count_ = 0;
};

HessianState init_state(const Matrix& h);

/// Functional form of HessianState::remove.
HessianState remove_index(HessianState state, std::size_t p);

}  // namespace adaprune
