#pragma once

#include "adaprune/matrix.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <vector>

namespace adaprune {

struct Example {
    std::vector<std::size_t> tokens;
    std::size_t label = 0;
};

using SynonymMap = std::map<std::size_t, std::vector<std::size_t>>;

/// Token-sequence classification data with a fixed embedding table.
struct ToyDataset {
    std::vector<Example> examples;
    std::size_t vocab_size = 0;
    std::size_t num_labels = 0;
    Matrix embedding;  // vocab_size x d_embed
    SynonymMap synonyms;

    std::size_t embed_dim() const noexcept { return embedding.cols(); }

    /// Token ids in range, labels in range, synonym lists free of their key.
    void validate() const;
};

/// Dataset file: a JSON header line followed by one JSON record per line.
/// The embedding lives in a separate tensor archive referenced (relative to
/// the dataset file) from the header; see docs/formats.md.
ToyDataset load_dataset(const std::filesystem::path& path);

/// Writes `path` and the embedding archive `<stem>.embedding.adpr` next to it.
void save_dataset(const ToyDataset& data, const std::filesystem::path& path);

struct ToyDatasetConfig {
    std::size_t num_labels = 2;
    std::size_t embed_dim = 8;
    /// Class-indicative root words per label; each root gets `synonyms_per_word` variants.
    std::size_t words_per_label = 6;
    std::size_t synonyms_per_word = 2;
    std::size_t neutral_words = 8;
    std::size_t examples = 200;
    std::size_t min_tokens = 3;
    std::size_t max_tokens = 6;
    /// How far each synonym variant drifts toward another label's prototype.
    double synonym_drift = 0.6;
    double noise = 0.3;
};

/// Synthetic data: label prototypes in embedding space, indicative words
/// near their label's prototype, synonym variants that drift toward a
/// different label, and label-neutral filler words.
ToyDataset generate_toy_dataset(const ToyDatasetConfig& config, std::uint64_t seed);

/// Mean embedding of a token sequence as a d_embed x 1 column.
Matrix embed_tokens(const Matrix& embedding, const std::vector<std::size_t>& tokens);

/// Mean embeddings of the first `limit` examples (all if 0) as d_embed x N.
Matrix embed_examples(const ToyDataset& data, std::size_t limit = 0);

}  // namespace adaprune
