#include "adaprune/model.hpp"

#include "adaprune/errors.hpp"

#include <sstream>

namespace adaprune {

std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
    }
    return "identity";
}

Activation parse_activation(std::string_view name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    throw DataError("unknown activation '" + std::string(name) + "'");
}

std::size_t Checkpoint::input_width() const {
    if (layers.empty()) throw PreconditionError("checkpoint has no layers");
    return layers.front().d_in();
}

std::size_t Checkpoint::output_width() const {
    if (layers.empty()) throw PreconditionError("checkpoint has no layers");
    return layers.back().d_out();
}

void Checkpoint::validate() const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        std::ostringstream os;
        if (l.weight.empty()) {
            os << "layer " << i << " has an empty weight";
            throw ShapeError(os.str());
        }
        if (l.bias && l.bias->size() != l.d_out()) {
            os << "layer " << i << " bias length " << l.bias->size() << " != d_out " << l.d_out();
            throw ShapeError(os.str());
        }
        if (i > 0 && layers[i - 1].d_out() != l.d_in()) {
            os << "layer " << i << " expects width " << l.d_in() << " but layer " << i - 1
               << " produces " << layers[i - 1].d_out();
            throw ShapeError(os.str());
        }
    }
}

bool same_structure(const Checkpoint& a, const Checkpoint& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i) {
        const Layer& x = a.layers[i];
        const Layer& y = b.layers[i];
        if (x.weight.rows() != y.weight.rows() || x.weight.cols() != y.weight.cols()) return false;
        if (x.bias.has_value() != y.bias.has_value()) return false;
        if (x.bias && x.bias->size() != y.bias->size()) return false;
        if (x.activation != y.activation || x.prunable != y.prunable) return false;
    }
    return true;
}

}  // namespace adaprune
