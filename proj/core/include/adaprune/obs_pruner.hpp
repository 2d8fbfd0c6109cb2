#pragma once

#include "adaprune/hessian.hpp"
#include "adaprune/matrix.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace adaprune {

/// How many weights to remove from each row.
///
/// Unstructured: k = int(d_in · ratio) weights per row, anywhere.
/// Structured (N:M): every bank of `bank` consecutive positions keeps
/// exactly `n_keep` weights.
class SparsityTarget {
public:
    enum class Mode { unstructured, structured };

    static SparsityTarget unstructured(double ratio);
    static SparsityTarget structured(std::size_t n_keep, std::size_t bank);
    static SparsityTarget dense() { return unstructured(0.0); }

    Mode mode() const noexcept { return mode_; }
    double ratio() const noexcept { return ratio_; }
    std::size_t n_keep() const noexcept { return n_keep_; }
    std::size_t bank() const noexcept { return bank_; }

    /// Number of removals per row of width `d_in`; checks bank divisibility.
    std::size_t removals(std::size_t d_in) const;

private:
    SparsityTarget() = default;

    Mode mode_ = Mode::unstructured;
    double ratio_ = 0.0;
    std::size_t n_keep_ = 0;
    std::size_t bank_ = 0;
};

struct RowTrajectory {
    std::vector<std::size_t> pruned_order;
    /// Predicted loss w_p² / [H⁻¹]_pp at each step.
    std::vector<double> step_losses;
    Matrix final_row;
};

/// Candidate minimizing w_p² / [H⁻¹]_pp; ties go to the lowest index.
std::size_t select_prune_index(std::span<const double> row, const HessianState& state,
                               std::span<const std::size_t> candidates);
std::size_t select_prune_index(const Matrix& row, const HessianState& state,
                               std::span<const std::size_t> candidates);

/// Compensated row after removing position p: row − (row_p / [H⁻¹]_pp)·H⁻¹[:,p],
/// with row_p set to exactly zero. Does not touch `state`; the caller follows
/// up with HessianState::remove(p).
Matrix apply_removal(const Matrix& row, const HessianState& state, std::size_t p);

/// Greedy OBS trajectory for one 1 x d_in row against Hessian `h`.
RowTrajectory prune_row(const Matrix& row, const Matrix& h, const SparsityTarget& target);

/// Same, starting from an already inverted state (consumed by value).
RowTrajectory prune_row(const Matrix& row, HessianState state, const SparsityTarget& target);

struct LayerPruneResult {
    Matrix weight;
    /// ‖W·X − Ŵ·X‖²_F / (d_out · N), measured on the undamped activations.
    double mse = 0.0;
    double step_loss_sum = 0.0;
    /// Fraction of zero entries in the pruned weight.
    double sparsity = 0.0;
    std::vector<RowTrajectory> rows;
};

struct PruneOptions {
    /// Worker threads for row-parallel pruning; 0 picks hardware concurrency.
    unsigned threads = 0;
};

/// Prunes every row of `w` (d_out x d_in) independently against H built once
/// from `x` (d_in x N). Each row works on its own copy of the inverse Hessian.
LayerPruneResult prune_layer(const Matrix& w, const Matrix& x, const SparsityTarget& target,
                             double lambda, const PruneOptions& options = {});

}  // namespace adaprune
