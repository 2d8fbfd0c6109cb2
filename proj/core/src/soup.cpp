#include "adaprune/soup.hpp"

#include "adaprune/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>

namespace adaprune {

Checkpoint average(const std::vector<Checkpoint>& ckpts) {
    if (ckpts.empty()) throw PreconditionError("average: no checkpoints given");
    for (std::size_t i = 1; i < ckpts.size(); ++i) {
        if (!same_structure(ckpts[0], ckpts[i])) {
            std::ostringstream os;
            os << "average: checkpoint " << i << " differs structurally from checkpoint 0";
            throw ShapeError(os.str());
        }
    }
    Checkpoint out = ckpts[0];
    if (ckpts.size() == 1) return out;

    const double count = static_cast<double>(ckpts.size());
    for (std::size_t l = 0; l < out.layers.size(); ++l) {
        auto w = out.layers[l].weight.data();
        for (std::size_t i = 0; i < w.size(); ++i) {
            double sum = 0.0;
            for (const auto& c : ckpts) sum += c.layers[l].weight.data()[i];
            w[i] = sum / count;
        }
        if (auto& bias = out.layers[l].bias) {
            for (std::size_t i = 0; i < bias->size(); ++i) {
                double sum = 0.0;
                for (const auto& c : ckpts) sum += (*c.layers[l].bias)[i];
                (*bias)[i] = sum / count;
            }
        }
    }
    return out;
}

SoupResult greedy_weight_average(const std::vector<SoupCandidate>& candidates,
                                 const SoupEval& eval) {
    if (candidates.empty()) throw PreconditionError("greedy_weight_average: no candidates");

    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return candidates[a].score > candidates[b].score;
    });

    SoupResult result;
    std::vector<Checkpoint> ingredients;
    double current = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
        ingredients.push_back(candidates[idx].ckpt);
        Checkpoint trial = average(ingredients);
        double value = 0.0;
        try {
            value = eval(trial);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "soup evaluation failed while adding candidate " << idx << ": " << e.what();
            throw Error(os.str());
        }
        if (std::isnan(value)) {
            std::ostringstream os;
            os << "soup evaluation returned NaN for candidate " << idx;
            throw NumericalError(os.str());
        }
        if (value >= current) {
            current = value;
            result.chosen.push_back(idx);
            result.trace.push_back(value);
            result.checkpoint = std::move(trial);
        } else {
            ingredients.pop_back();
        }
    }
    return result;
}

}  // namespace adaprune
