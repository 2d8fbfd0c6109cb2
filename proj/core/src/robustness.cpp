#include "adaprune/robustness.hpp"

#include "adaprune/errors.hpp"
#include "adaprune/pipeline.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <numeric>

namespace adaprune {

namespace {

std::size_t argmax_lowest(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

std::vector<double> scores_for(const Checkpoint& model, const Matrix& input) {
    const Matrix out = forward(model, input);
    auto col = out.data();
    return {col.begin(), col.end()};
}

double true_score(const Checkpoint& model, const Matrix& embedding,
                  const std::vector<std::size_t>& tokens, std::size_t label) {
    return classify(model, embedding, tokens).scores[label];
}

// True-label score with position `skip` left out of the mean; a lone token
// leaves a zero input.
double score_without(const Checkpoint& model, const Matrix& embedding,
                     const std::vector<std::size_t>& tokens, std::size_t skip, std::size_t label) {
    if (tokens.size() == 1) return scores_for(model, Matrix(embedding.cols(), 1))[label];
    std::vector<std::size_t> rest;
    rest.reserve(tokens.size() - 1);
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (i != skip) rest.push_back(tokens[i]);
    return true_score(model, embedding, rest, label);
}

}  // namespace

Prediction classify(const Checkpoint& model, const Matrix& embedding,
                    const std::vector<std::size_t>& tokens) {
    if (tokens.empty()) throw PreconditionError("classify: empty token sequence");
    Prediction p;
    p.scores = scores_for(model, embed_tokens(embedding, tokens));
    p.label = argmax_lowest(p.scores);
    return p;
}

AttackOutcome attack_example(const Checkpoint& model, const Matrix& embedding,
                             const std::vector<std::size_t>& tokens, const SynonymMap& synonyms,
                             std::size_t max_subs) {
    AttackOutcome out{false, tokens, 0};
    if (max_subs == 0 || synonyms.empty() || tokens.empty()) return out;

    const Prediction original = classify(model, embedding, tokens);
    const std::size_t label = original.label;
    const double base = original.scores[label];

    std::vector<double> importance(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i)
        importance[i] = base - score_without(model, embedding, tokens, i, label);
    std::vector<std::size_t> order(tokens.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return importance[a] > importance[b]; });

    double current = base;
    for (std::size_t pos : order) {
        if (out.substitutions >= max_subs) break;
        const auto it = synonyms.find(tokens[pos]);
        if (it == synonyms.end()) continue;

        std::vector<std::size_t> best_tokens;
        double best_score = current;
        std::size_t best_label = label;
        for (std::size_t syn : it->second) {
            std::vector<std::size_t> trial = out.tokens;
            trial[pos] = syn;
            const Prediction p = classify(model, embedding, trial);
            if (p.scores[label] < best_score) {
                best_score = p.scores[label];
                best_label = p.label;
                best_tokens = std::move(trial);
            }
        }
        if (best_tokens.empty()) continue;
        out.tokens = std::move(best_tokens);
        current = best_score;
        ++out.substitutions;
        if (best_label != label) {
            out.success = true;
            break;
        }
    }
    return out;
}

RobustnessResult RobustnessResult::from_counts(std::size_t total, std::size_t correct,
                                               std::size_t succeeded) {
    if (correct > total || succeeded > correct) {
        throw PreconditionError("robustness counts must satisfy succeeded <= correct <= total");
    }
    RobustnessResult r;
    r.total = total;
    r.attempted = correct;
    r.succeeded = succeeded;
    if (total > 0) {
        r.acc = 100.0 * static_cast<double>(correct) / static_cast<double>(total);
        r.aua = 100.0 * static_cast<double>(correct - succeeded) / static_cast<double>(total);
    }
    if (correct > 0) r.asr = 100.0 * static_cast<double>(succeeded) / static_cast<double>(correct);
    return r;
}

RobustnessResult evaluate_robustness(const Checkpoint& model, const ToyDataset& data,
                                     const RobustnessOptions& options) {
    if (data.examples.empty()) throw PreconditionError("evaluate_robustness: empty dataset");
    const std::size_t n = data.examples.size();
    // 0 = misclassified, 1 = correct and survived, 2 = correct and flipped.
    std::vector<int> status(n, 0);
    detail::parallel_for(n, options.threads, [&](std::size_t i) {
        const Example& ex = data.examples[i];
        if (classify(model, data.embedding, ex.tokens).label != ex.label) return;
        const auto attack =
            attack_example(model, data.embedding, ex.tokens, data.synonyms, options.max_subs);
        status[i] = attack.success ? 2 : 1;
    });
    const auto correct = static_cast<std::size_t>(
        std::count_if(status.begin(), status.end(), [](int s) { return s != 0; }));
    const auto flipped = static_cast<std::size_t>(std::count(status.begin(), status.end(), 2));
    return RobustnessResult::from_counts(n, correct, flipped);
}

double clean_accuracy(const Checkpoint& model, const ToyDataset& data) {
    if (data.examples.empty()) throw PreconditionError("clean_accuracy: empty dataset");
    std::size_t correct = 0;
    for (const Example& ex : data.examples)
        if (classify(model, data.embedding, ex.tokens).label == ex.label) ++correct;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(data.examples.size());
}

}  // namespace adaprune
