#pragma once

#include "adaprune/dataset.hpp"
#include "adaprune/model.hpp"

#include <cstdint>
#include <vector>

namespace adaprune {

struct TrainConfig {
    /// Full layer widths: {d_embed, hidden..., num_labels}.
    std::vector<std::size_t> widths;
    std::size_t epochs = 200;
    double learning_rate = 0.5;
    std::uint64_t seed = 0;
};

/// Seeded initialization used by train_toy: hidden layers relu and
/// prunable, output layer identity and not prunable, zero biases.
Checkpoint init_toy_model(const std::vector<std::size_t>& widths, std::uint64_t seed);

/// Full-batch gradient descent on mean softmax cross-entropy over the
/// mean-of-embeddings inputs. Throws NumericalError if the loss goes
/// non-finite.
Checkpoint train_toy(const ToyDataset& data, const TrainConfig& config);

}  // namespace adaprune
