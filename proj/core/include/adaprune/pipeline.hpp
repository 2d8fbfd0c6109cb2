#pragma once

#include "adaprune/hessian.hpp"
#include "adaprune/matrix.hpp"
#include "adaprune/model.hpp"
#include "adaprune/obs_pruner.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adaprune {

struct LayerActivations {
    Matrix pre;   // Y_l = W_l·X_l (+ bias), d_out x N
    Matrix post;  // X_{l+1} = activation(Y_l)
};

/// Adds the layer's bias to every column of `y` and applies its activation.
Matrix post_process(const Matrix& y, const Layer& layer);

/// Runs the dense model on `x` (d_in x N), keeping every layer's pre- and
/// post-activation output.
std::vector<LayerActivations> forward_dense(const Checkpoint& ckpt, const Matrix& x);

/// Final post-activation output of the model.
Matrix forward(const Checkpoint& ckpt, const Matrix& x);

struct Recalibrated {
    Matrix weight;
    std::optional<std::vector<double>> bias;
};

/// Least-squares weight (and, when `with_bias`, bias) mapping the perturbed
/// input `xhat` onto the dense target `y_dense`. The bias is solved jointly by
/// appending a row of ones to X̂.
Recalibrated recalibrate_weights(const Matrix& xhat, const Matrix& y_dense, double lambda,
                                 bool with_bias);

struct LayerReport {
    std::size_t layer = 0;
    bool pruned = false;
    double sparsity = 0.0;
    /// Error of the incoming dense weight on the propagated input, against Y_l.
    double mse_before = 0.0;
    /// ‖W_ref·X̂ − Ŵ·X̂‖²_F / (d_out·N), W_ref the (recalibrated) dense weight.
    double mse_after = 0.0;
    double step_loss_sum = 0.0;
    double seconds = 0.0;
};

struct PruneReport {
    std::vector<LayerReport> layers;
    /// MSE between the dense and pruned models' final outputs on calibration.
    double final_output_mse = 0.0;
    std::vector<std::string> warnings;
};

struct PipelineOptions {
    double lambda = kDefaultLambda;
    /// Rebuild Hessians from propagated sparse activations and recalibrate
    /// dense weights. When false every layer is pruned in isolation against
    /// its original dense input.
    bool adaptive = true;
    PruneOptions prune;
};

struct PruneOutcome {
    Checkpoint checkpoint;
    PruneReport report;
};

/// Layer-wise pruning of a whole checkpoint. `targets` holds one entry per
/// layer; entries for non-prunable layers are ignored. Calibration is
/// d_in x N, samples as columns.
PruneOutcome prune_model(const Checkpoint& ckpt, const Matrix& calibration,
                         const std::vector<SparsityTarget>& targets,
                         const PipelineOptions& options = {});

}  // namespace adaprune
