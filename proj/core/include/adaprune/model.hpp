#pragma once

#include "adaprune/matrix.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adaprune {

enum class Activation { identity, relu, tanh };

std::string_view to_string(Activation a);
/// Parses "identity", "relu" or "tanh"; throws DataError otherwise.
Activation parse_activation(std::string_view name);

struct Layer {
    Matrix weight;  // d_out x d_in
    std::optional<std::vector<double>> bias;
    Activation activation = Activation::identity;
    bool prunable = true;

    std::size_t d_in() const noexcept { return weight.cols(); }
    std::size_t d_out() const noexcept { return weight.rows(); }
};

struct Checkpoint {
    std::string name;
    std::vector<Layer> layers;
    std::map<std::string, std::string> metadata;

    std::size_t input_width() const;
    std::size_t output_width() const;

    /// Throws ShapeError on bias length or layer-to-layer width mismatches.
    void validate() const;
};

/// True when both checkpoints have the same layer shapes, activations,
/// bias presence and prunable flags.
bool same_structure(const Checkpoint& a, const Checkpoint& b);

}  // namespace adaprune
