#pragma once

#include "adaprune/model.hpp"

#include <functional>
#include <vector>

namespace adaprune {

struct SoupCandidate {
    Checkpoint ckpt;
    /// Sort key, higher is better (e.g. accuracy under attack).
    double score = 0.0;
};

/// Elementwise mean of every weight and bias. Metadata and name come from
/// the first checkpoint.
Checkpoint average(const std::vector<Checkpoint>& ckpts);

struct SoupResult {
    Checkpoint checkpoint;
    /// Input indices of the accepted candidates, in acceptance order.
    std::vector<std::size_t> chosen;
    /// Eval of the running average after each acceptance.
    std::vector<double> trace;
};

using SoupEval = std::function<double(const Checkpoint&)>;

/// Greedy weight averaging: candidates are visited by descending score
/// (stable), and each joins the soup iff the averaged checkpoint's eval does
/// not decrease. The first visited candidate always joins.
SoupResult greedy_weight_average(const std::vector<SoupCandidate>& candidates,
                                 const SoupEval& eval);

}  // namespace adaprune
