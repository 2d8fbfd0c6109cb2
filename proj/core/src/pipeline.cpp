#include "adaprune/pipeline.hpp"

#include "adaprune/errors.hpp"
#include "adaprune/linalg.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace adaprune {

namespace {

void add_bias(Matrix& y, const std::optional<std::vector<double>>& bias) {
    if (!bias) return;
    if (bias->size() != y.rows()) throw ShapeError("bias length does not match layer output");
    for (std::size_t r = 0; r < y.rows(); ++r) {
        const double b = (*bias)[r];
        for (double& v : y.row(r)) v += b;
    }
}

void activate(Matrix& y, Activation act) {
    switch (act) {
        case Activation::identity: break;
        case Activation::relu:
            for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::tanh:
            for (double& v : y.data()) v = std::tanh(v);
            break;
    }
}

Matrix affine(const Matrix& w, const std::optional<std::vector<double>>& bias, const Matrix& x) {
    Matrix y = matmul(w, x);
    add_bias(y, bias);
    return y;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

Matrix post_process(const Matrix& y, const Layer& layer) {
    Matrix out = y;
    add_bias(out, layer.bias);
    activate(out, layer.activation);
    return out;
}

std::vector<LayerActivations> forward_dense(const Checkpoint& ckpt, const Matrix& x) {
    ckpt.validate();
    if (ckpt.layers.empty()) return {};
    if (x.rows() != ckpt.input_width()) {
        throw ShapeError("forward: input rows do not match the first layer's width");
    }
    std::vector<LayerActivations> out;
    out.reserve(ckpt.layers.size());
    const Matrix* input = &x;
    for (const Layer& layer : ckpt.layers) {
        Matrix pre = affine(layer.weight, layer.bias, *input);
        Matrix post = pre;
        activate(post, layer.activation);
        out.push_back({std::move(pre), std::move(post)});
        input = &out.back().post;
    }
    return out;
}

Matrix forward(const Checkpoint& ckpt, const Matrix& x) {
    auto acts = forward_dense(ckpt, x);
    if (acts.empty()) return x;
    return std::move(acts.back().post);
}

Recalibrated recalibrate_weights(const Matrix& xhat, const Matrix& y_dense, double lambda,
                                 bool with_bias) {
    if (xhat.cols() != y_dense.cols()) {
        throw ShapeError("recalibrate_weights: input and target sample counts differ");
    }
    if (!with_bias) return {least_squares(xhat, y_dense, lambda), std::nullopt};

    const std::size_t d_in = xhat.rows();
    Matrix augmented(d_in + 1, xhat.cols());
    for (std::size_t r = 0; r < d_in; ++r) augmented.set_row(r, xhat.row(r));
    for (double& v : augmented.row(d_in)) v = 1.0;

    const Matrix solved = least_squares(augmented, y_dense, lambda);
    Matrix weight(solved.rows(), d_in);
    std::vector<double> bias(solved.rows());
    for (std::size_t r = 0; r < solved.rows(); ++r) {
        for (std::size_t c = 0; c < d_in; ++c) weight(r, c) = solved(r, c);
        bias[r] = solved(r, d_in);
    }
    return {std::move(weight), std::move(bias)};
}

PruneOutcome prune_model(const Checkpoint& ckpt, const Matrix& calibration,
                         const std::vector<SparsityTarget>& targets,
                         const PipelineOptions& options) {
    ckpt.validate();
    if (ckpt.layers.empty()) throw PreconditionError("prune_model: checkpoint has no layers");
    if (targets.size() != ckpt.layers.size()) {
        throw PreconditionError("prune_model: need exactly one sparsity target per layer");
    }
    if (calibration.cols() == 0) throw PreconditionError("prune_model: empty calibration set");

    const auto dense = forward_dense(ckpt, calibration);

    PruneOutcome outcome;
    outcome.checkpoint.name = ckpt.name;
    outcome.checkpoint.metadata = ckpt.metadata;
    PruneReport& report = outcome.report;

    const std::size_t n = calibration.cols();
    Matrix xhat = calibration;
    for (std::size_t l = 0; l < ckpt.layers.size(); ++l) {
        const auto start = std::chrono::steady_clock::now();
        const Layer& layer = ckpt.layers[l];
        if (n < layer.d_in()) {
            std::ostringstream os;
            os << "layer " << l << ": " << n << " calibration samples for input width "
               << layer.d_in() << "; the Hessian is rank-deficient and relies on damping";
            report.warnings.push_back(os.str());
        }

        const Matrix& input = options.adaptive ? xhat : (l == 0 ? calibration : dense[l - 1].post);
        const Matrix& target_y = dense[l].pre;

        LayerReport rec;
        rec.layer = l;
        rec.mse_before = mean_squared_error(affine(layer.weight, layer.bias, input), target_y);

        Layer out_layer = layer;
        if (options.adaptive && l != 0) {
            auto fitted = recalibrate_weights(input, target_y, options.lambda, layer.bias.has_value());
            out_layer.weight = std::move(fitted.weight);
            out_layer.bias = std::move(fitted.bias);
        }

        if (layer.prunable) {
            auto pruned = prune_layer(out_layer.weight, input, targets[l], options.lambda,
                                      options.prune);
            rec.pruned = true;
            rec.mse_after = pruned.mse;
            rec.step_loss_sum = pruned.step_loss_sum;
            out_layer.weight = std::move(pruned.weight);
        }
        rec.sparsity = 1.0 - static_cast<double>(count_nonzeros(out_layer.weight.data())) /
                                 static_cast<double>(out_layer.weight.size());

        if (options.adaptive) xhat = post_process(matmul(out_layer.weight, xhat), out_layer);
        outcome.checkpoint.layers.push_back(std::move(out_layer));
        rec.seconds = seconds_since(start);
        report.layers.push_back(rec);
    }

    report.final_output_mse =
        mean_squared_error(forward(outcome.checkpoint, calibration), dense.back().post);
    return outcome;
}

}  // namespace adaprune
