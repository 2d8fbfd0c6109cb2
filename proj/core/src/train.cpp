#include "adaprune/train.hpp"

#include "adaprune/errors.hpp"
#include "adaprune/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace adaprune {

Checkpoint init_toy_model(const std::vector<std::size_t>& widths, std::uint64_t seed) {
    if (widths.size() < 2) throw PreconditionError("a model needs at least input and output widths");
    for (std::size_t w : widths)
        if (w == 0) throw PreconditionError("layer widths must be positive");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Checkpoint ckpt;
    ckpt.name = "toy-mlp";
    ckpt.metadata["seed"] = std::to_string(seed);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const bool last = l + 2 == widths.size();
        Layer layer;
        layer.weight = Matrix(widths[l + 1], widths[l]);
        const double scale = std::sqrt((last ? 1.0 : 2.0) / static_cast<double>(widths[l]));
        for (double& v : layer.weight.data()) v = scale * gauss(rng);
        layer.bias = std::vector<double>(widths[l + 1], 0.0);
        layer.activation = last ? Activation::identity : Activation::relu;
        layer.prunable = !last;
        ckpt.layers.push_back(std::move(layer));
    }
    return ckpt;
}

Checkpoint train_toy(const ToyDataset& data, const TrainConfig& config) {
    data.validate();
    if (config.widths.empty() || config.widths.front() != data.embed_dim() ||
        config.widths.back() != data.num_labels) {
        throw PreconditionError("widths must start at the embedding width and end at the label count");
    }
    if (data.examples.empty()) throw PreconditionError("cannot train on an empty dataset");

    Checkpoint model = init_toy_model(config.widths, config.seed);
    const Matrix x = embed_examples(data);
    const std::size_t n = x.cols();
    const std::size_t depth = model.layers.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto acts = forward_dense(model, x);
        const Matrix& logits = acts.back().post;

        // Softmax cross-entropy; grad holds dL/dlogits.
        Matrix grad(logits.rows(), n);
        double loss = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double top = logits(0, j);
            for (std::size_t c = 1; c < logits.rows(); ++c) top = std::max(top, logits(c, j));
            double z = 0.0;
            for (std::size_t c = 0; c < logits.rows(); ++c) z += std::exp(logits(c, j) - top);
            const std::size_t y = data.examples[j].label;
            loss -= logits(y, j) - top - std::log(z);
            for (std::size_t c = 0; c < logits.rows(); ++c) {
                const double p = std::exp(logits(c, j) - top) / z;
                grad(c, j) = (p - (c == y ? 1.0 : 0.0)) * inv_n;
            }
        }
        loss *= inv_n;
        if (!std::isfinite(loss)) {
            std::ostringstream os;
            os << "training loss became non-finite at epoch " << epoch
               << "; lower the learning rate (currently " << config.learning_rate << ")";
            throw NumericalError(os.str());
        }

        for (std::size_t l = depth; l-- > 0;) {
            Layer& layer = model.layers[l];
            const Matrix& input = l == 0 ? x : acts[l - 1].post;
            if (layer.activation == Activation::relu) {
                for (std::size_t i = 0; i < grad.size(); ++i)
                    if (acts[l].pre.data()[i] <= 0.0) grad.data()[i] = 0.0;
            } else if (layer.activation == Activation::tanh) {
                for (std::size_t i = 0; i < grad.size(); ++i) {
                    const double t = acts[l].post.data()[i];
                    grad.data()[i] *= 1.0 - t * t;
                }
            }
            Matrix next = l > 0 ? matmul(layer.weight.transpose(), grad) : Matrix{};
            const Matrix gw = matmul_transposed(grad, input);
            for (std::size_t i = 0; i < gw.size(); ++i)
                layer.weight.data()[i] -= config.learning_rate * gw.data()[i];
            if (layer.bias) {
                for (std::size_t r = 0; r < grad.rows(); ++r) {
                    double g = 0.0;
                    for (double v : grad.row(r)) g += v;
                    (*layer.bias)[r] -= config.learning_rate * g;
                }
            }
            grad = std::move(next);
        }
    }
    for (const Layer& layer : model.layers) {
        for (double v : layer.weight.data())
            if (!std::isfinite(v)) throw NumericalError("training produced non-finite weights");
    }
    return model;
}

}  // namespace adaprune
