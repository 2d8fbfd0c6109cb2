#pragma once

#include "adaprune/dataset.hpp"
#include "adaprune/matrix.hpp"
#include "adaprune/model.hpp"

#include <cstddef>
#include <vector>

namespace adaprune {

struct Prediction {
    std::size_t label = 0;
    std::vector<double> scores;
};

/// Mean-of-embeddings input fed through the model; argmax with ties going to
/// the lowest label.
Prediction classify(const Checkpoint& model, const Matrix& embedding,
                    const std::vector<std::size_t>& tokens);

struct AttackOutcome {
    bool success = false;
    std::vector<std::size_t> tokens;
    std::size_t substitutions = 0;
};

/// Greedy synonym-substitution attack against the model's current label.
///
/// Positions are visited by importance (drop in the true-label score when the
/// token is left out of the mean, ties to the lower position). At each
/// position the synonym that lowers the true-label score the most is kept,
/// provided it lowers it at all. The attack stops at the first label flip or
/// after `max_subs` substitutions.
AttackOutcome attack_example(const Checkpoint& model, const Matrix& embedding,
                             const std::vector<std::size_t>& tokens, const SynonymMap& synonyms,
                             std::size_t max_subs);

/// Clean accuracy (Acc), accuracy under attack (Aua) and attack success rate
/// (Asr), all in percent. Asr is over initially-correct examples only.
struct RobustnessResult {
    double acc = 0.0;
    double aua = 0.0;
    double asr = 0.0;
    std::size_t total = 0;
    std::size_t attempted = 0;
    std::size_t succeeded = 0;

    /// `correct` examples were attacked, `succeeded` of them flipped.
    static RobustnessResult from_counts(std::size_t total, std::size_t correct,
                                        std::size_t succeeded);
};

struct RobustnessOptions {
    std::size_t max_subs = 5;
    /// Worker threads for attacking examples; 0 picks hardware concurrency.
    unsigned threads = 0;
};

RobustnessResult evaluate_robustness(const Checkpoint& model, const ToyDataset& data,
                                     const RobustnessOptions& options = {});

/// Clean accuracy in percent.
double clean_accuracy(const Checkpoint& model, const ToyDataset& data);

}  // namespace adaprune
