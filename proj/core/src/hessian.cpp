#include "adaprune/hessian.hpp"

#include "adaprune/errors.hpp"
#include "adaprune/linalg.hpp"

#include <sstream>

namespace adaprune {

Matrix build_hessian(const Matrix& x, double lambda) {
    if (x.rows() == 0 || x.cols() == 0) {
        throw ShapeError("build_hessian: activations must have at least one row and sample");
    }
    if (!(lambda >= 0.0)) throw PreconditionError("build_hessian: lambda must be non-negative");
    const std::size_t d = x.rows();
    Matrix h(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        auto xi = x.row(i);
        for (std::size_t j = 0; j <= i; ++j) {
            auto xj = x.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < xi.size(); ++k) acc += xi[k] * xj[k];
            h(i, j) = acc;
            h(j, i) = acc;
        }
    }
    for (std::size_t i = 0; i < d; ++i) h(i, i) += lambda;
    return h;
}

HessianState::HessianState(const Matrix& h) {
    try {
        inv_ = damped_inverse(h, 0.0);
    } catch (const SingularityError& e) {
        std::ostringstream os;
        os << "Hessian is singular at pivot " << e.pivot()
           << "; raise the damping lambda or supply more calibration samples";
        throw SingularityError(os.str(), e.pivot());
    }
    active_.assign(inv_.rows(), 1);
    active_count_ = inv_.rows();
}

std::vector<std::size_t> HessianState::active_indices() const {
    std::vector<std::size_t> out;
    out.reserve(active_count_);
    for (std::size_t i = 0; i < active_.size(); ++i)
        if (active_[i]) out.push_back(i);
    return out;
}

void HessianState::remove(std::size_t p) {
    if (p >= active_.size()) throw IndexError("remove_index: position out of range");
    if (!active_[p]) {
        std::ostringstream os;
        os << "remove_index: position " << p << " was already pruned";
        throw IndexError(os.str());
    }
    const double pivot = inv_(p, p);
    if (!(pivot > kPivotFloor)) {
        std::ostringstream os;
        os << "inverse Hessian diagonal at " << p << " is " << pivot
           << " (below pivot floor); raise the damping lambda";
        throw SingularityError(os.str(), p);
    }

    const std::size_t n = inv_.rows();
    std::vector<double> col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = inv_(i, p);
    for (std::size_t i = 0; i < n; ++i) {
        if (!active_[i] || col[i] == 0.0) continue;
        const double ci = col[i];
        auto row = inv_.row(i);
        // (ci·cj)/pivot is commutative in floating point, so symmetry is exact.
        for (std::size_t j = 0; j < n; ++j) row[j] -= ci * col[j] / pivot;
    }
    for (std::size_t i = 0; i < n; ++i) {
        inv_(i, p) = 0.0;
        inv_(p, i) = 0.0;
    }
    active_[p] = 0;
    --active_count_;
}

HessianState init_state(const Matrix& h) { return HessianState(h); }

HessianState remove_index(HessianState state, std::size_t p) {
    state.remove(p);
    return state;
}

}  // namespace adaprune
