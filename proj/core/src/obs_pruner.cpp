#include "adaprune/obs_pruner.hpp"

#include "adaprune/errors.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adaprune {

SparsityTarget SparsityTarget::unstructured(double ratio) {
    if (!(ratio >= 0.0 && ratio < 1.0)) {
        throw PreconditionError("unstructured sparsity ratio must lie in [0, 1)");
    }
    SparsityTarget t;
    t.mode_ = Mode::unstructured;
    t.ratio_ = ratio;
    return t;
}

SparsityTarget SparsityTarget::structured(std::size_t n_keep, std::size_t bank) {
    if (n_keep == 0 || n_keep >= bank) {
        throw PreconditionError("structured sparsity needs 1 <= n_keep < bank");
    }
    SparsityTarget t;
    t.mode_ = Mode::structured;
    t.n_keep_ = n_keep;
    t.bank_ = bank;
    t.ratio_ = 1.0 - static_cast<double>(n_keep) / static_cast<double>(bank);
    return t;
}

std::size_t SparsityTarget::removals(std::size_t d_in) const {
    if (mode_ == Mode::unstructured) {
        // Truncation toward zero.
        return static_cast<std::size_t>(static_cast<double>(d_in) * ratio_);
    }
    if (d_in % bank_ != 0) {
        std::ostringstream os;
        os << "bank size " << bank_ << " does not divide input width " << d_in;
        throw PreconditionError(os.str());
    }
    return (bank_ - n_keep_) * (d_in / bank_);
}

namespace {

void check_row(std::span<const double> row, const HessianState& state) {
    if (row.size() != state.dim()) {
        throw ShapeError("row width does not match the Hessian dimension");
    }
}

double pivot_of(const HessianState& state, std::size_t p) {
    const double pivot = state.diag(p);
    if (!(pivot > kPivotFloor)) {
        std::ostringstream os;
        os << "inverse Hessian diagonal at " << p << " is " << pivot
           << " (below pivot floor); raise the damping lambda";
        throw SingularityError(os.str(), p);
    }
    return pivot;
}

void apply_removal_in_place(std::span<double> row, const HessianState& state, std::size_t p) {
    const double pivot = pivot_of(state, p);
    const double wp = row[p];
    if (wp != 0.0) {
        const double scale = wp / pivot;
        const Matrix& inv = state.inverse();
        for (std::size_t i = 0; i < row.size(); ++i) row[i] -= scale * inv(i, p);
    }
    row[p] = 0.0;
}

class CandidateSet {
public:
    CandidateSet(const SparsityTarget& target, std::size_t d_in)
        : structured_(target.mode() == SparsityTarget::Mode::structured) {
        if (structured_) {
            bank_ = target.bank();
            n_keep_ = target.n_keep();
            bank_active_.assign(d_in / bank_, bank_);
        }
    }

    // Active positions still eligible for removal, ascending.
    void fill(const HessianState& state, std::vector<std::size_t>& out) const {
        out.clear();
        for (std::size_t i = 0; i < state.dim(); ++i) {
            if (!state.is_active(i)) continue;
            if (structured_ && bank_active_[i / bank_] <= n_keep_) continue;
            out.push_back(i);
        }
    }

    void removed(std::size_t p) {
        if (structured_) --bank_active_[p / bank_];
    }

private:
    bool structured_;
    std::size_t bank_ = 0;
    std::size_t n_keep_ = 0;
    std::vector<std::size_t> bank_active_;
};

// Positions an all-zero row gives up: the lowest eligible index each step,
// mirroring what the greedy selection does with all quotients equal to zero.
RowTrajectory zero_row_trajectory(const Matrix& row, const SparsityTarget& target) {
    const std::size_t d = row.cols();
    const std::size_t k = target.removals(d);
    RowTrajectory traj{{}, {}, row};
    traj.pruned_order.reserve(k);
    if (target.mode() == SparsityTarget::Mode::unstructured) {
        for (std::size_t i = 0; i < k; ++i) traj.pruned_order.push_back(i);
    } else {
        const std::size_t drop = target.bank() - target.n_keep();
        for (std::size_t b = 0; b < d / target.bank(); ++b)
            for (std::size_t j = 0; j < drop; ++j) traj.pruned_order.push_back(b * target.bank() + j);
    }
    traj.step_losses.assign(k, 0.0);
    return traj;
}

}  // namespace

std::size_t select_prune_index(std::span<const double> row, const HessianState& state,
                               std::span<const std::size_t> candidates) {
    check_row(row, state);
    if (candidates.empty()) throw PreconditionError("select_prune_index: no candidates");
    std::size_t best = 0;
    double best_loss = 0.0;
    bool have = false;
    for (std::size_t p : candidates) {
        if (p >= state.dim() || !state.is_active(p)) {
            throw IndexError("select_prune_index: candidate is not an active position");
        }
        const double loss = row[p] * row[p] / pivot_of(state, p);
        if (!have || loss < best_loss || (loss == best_loss && p < best)) {
            best = p;
            best_loss = loss;
            have = true;
        }
    }
    return best;
}

std::size_t select_prune_index(const Matrix& row, const HessianState& state,
                               std::span<const std::size_t> candidates) {
    if (row.rows() != 1) throw ShapeError("select_prune_index: expected a 1 x d_in row");
    return select_prune_index(row.row(0), state, candidates);
}

Matrix apply_removal(const Matrix& row, const HessianState& state, std::size_t p) {
    if (row.rows() != 1) throw ShapeError("apply_removal: expected a 1 x d_in row");
    check_row(row.row(0), state);
    if (p >= state.dim() || !state.is_active(p)) {
        throw IndexError("apply_removal: position is not active");
    }
    Matrix out = row;
    apply_removal_in_place(out.row(0), state, p);
    return out;
}

RowTrajectory prune_row(const Matrix& row, const Matrix& h, const SparsityTarget& target) {
    if (row.rows() != 1) throw ShapeError("prune_row: expected a 1 x d_in row");
    if (h.rows() != row.cols()) throw ShapeError("prune_row: Hessian size differs from row width");
    const std::size_t k = target.removals(row.cols());
    if (k == 0) return RowTrajectory{{}, {}, row};
    if (count_nonzeros(row.row(0)) == 0) return zero_row_trajectory(row, target);
    return prune_row(row, HessianState(h), target);
}

RowTrajectory prune_row(const Matrix& row, HessianState state, const SparsityTarget& target) {
    if (row.rows() != 1) throw ShapeError("prune_row: expected a 1 x d_in row");
    check_row(row.row(0), state);
    if (state.active_count() != state.dim()) {
        throw PreconditionError("prune_row: state must start with every position active");
    }
    const std::size_t k = target.removals(row.cols());
    if (count_nonzeros(row.row(0)) == 0) return zero_row_trajectory(row, target);

    RowTrajectory traj{{}, {}, row};
    traj.pruned_order.reserve(k);
    traj.step_losses.reserve(k);
    auto w = traj.final_row.row(0);

    CandidateSet eligible(target, row.cols());
    std::vector<std::size_t> candidates;
    for (std::size_t step = 0; step < k; ++step) {
        eligible.fill(state, candidates);
        const std::size_t p = select_prune_index(std::span<const double>(w), state, candidates);
        const double loss = w[p] * w[p] / state.diag(p);
        apply_removal_in_place(w, state, p);
        state.remove(p);
        eligible.removed(p);
        traj.pruned_order.push_back(p);
        traj.step_losses.push_back(loss);
    }
    return traj;
}

LayerPruneResult prune_layer(const Matrix& w, const Matrix& x, const SparsityTarget& target,
                             double lambda, const PruneOptions& options) {
    if (w.cols() != x.rows()) {
        throw ShapeError("prune_layer: weight input width does not match activation rows");
    }
    const Dims dims(w.cols(), w.rows(), x.cols());
    const std::size_t k = target.removals(dims.d_in);

    LayerPruneResult result;
    result.weight = w;
    result.rows.resize(dims.d_out);

    if (k == 0) {
        for (std::size_t r = 0; r < dims.d_out; ++r) result.rows[r] = {{}, {}, w.row_matrix(r)};
    } else {
        const HessianState base(build_hessian(x, lambda));
        detail::parallel_for(dims.d_out, options.threads, [&](std::size_t r) {
            result.rows[r] = prune_row(w.row_matrix(r), base, target);
        });
        for (std::size_t r = 0; r < dims.d_out; ++r)
            result.weight.set_row(r, result.rows[r].final_row.row(0));
    }

    for (const auto& traj : result.rows)
        for (double l : traj.step_losses) result.step_loss_sum += l;
    const Matrix delta = matmul(w - result.weight, x);
    result.mse = frobenius_norm_sq(delta) / static_cast<double>(dims.d_out * dims.n_samples);
    result.sparsity = 1.0 - static_cast<double>(count_nonzeros(result.weight.data())) /
                                static_cast<double>(result.weight.size());
    return result;
}

}  // namespace adaprune
