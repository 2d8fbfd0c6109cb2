#include "adaprune/dataset.hpp"

#include "adaprune/archive.hpp"
#include "adaprune/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace adaprune {

namespace {

using json = nlohmann::json;

constexpr const char* kEmbeddingTensor = "embedding";

std::filesystem::path embedding_path_for(const std::filesystem::path& path) {
    std::filesystem::path p = path;
    p.replace_extension(".embedding.adpr");
    return p;
}

}  // namespace

void ToyDataset::validate() const {
    if (embedding.rows() != vocab_size) {
        throw DataError("embedding rows do not match the vocabulary size");
    }
    if (num_labels == 0) throw DataError("dataset declares no labels");
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const Example& ex = examples[i];
        if (ex.label >= num_labels) {
            throw DataError("example " + std::to_string(i) + " has an out-of-range label");
        }
        for (std::size_t t : ex.tokens) {
            if (t >= vocab_size) {
                throw DataError("example " + std::to_string(i) + " has an out-of-range token");
            }
        }
    }
    for (const auto& [key, list] : synonyms) {
        if (key >= vocab_size) throw DataError("synonym key out of vocabulary");
        for (std::size_t s : list) {
            if (s >= vocab_size) throw DataError("synonym out of vocabulary");
            if (s == key) {
                throw DataError("synonym list of token " + std::to_string(key) + " contains itself");
            }
        }
    }
}

ToyDataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset " + path.string());

    ToyDataset data;
    std::string line;
    std::size_t line_no = 0;
    try {
        if (!std::getline(in, line)) throw DataError("dataset " + path.string() + " is empty");
        ++line_no;
        const json header = json::parse(line);
        if (header.at("format").get<std::string>() != "adpr-dataset") {
            throw DataError("dataset header has the wrong format tag");
        }
        data.vocab_size = header.at("vocab_size").get<std::size_t>();
        data.num_labels = header.at("num_labels").get<std::size_t>();
        for (const auto& [key, list] : header.at("synonyms").items()) {
            data.synonyms[std::stoul(key)] = list.get<std::vector<std::size_t>>();
        }
        const auto emb_file = header.at("embedding").get<std::string>();
        data.embedding = load_matrix(path.parent_path() / emb_file, kEmbeddingTensor);

        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const json rec = json::parse(line);
            data.examples.push_back(
                {rec.at("tokens").get<std::vector<std::size_t>>(), rec.at("label").get<std::size_t>()});
        }
    } catch (const json::exception& e) {
        std::ostringstream os;
        os << path.string() << ":" << line_no << ": " << e.what();
        throw DataError(os.str());
    } catch (const std::invalid_argument&) {
        throw DataError(path.string() + ": synonym keys must be token ids");
    }
    data.validate();
    return data;
}

void save_dataset(const ToyDataset& data, const std::filesystem::path& path) {
    data.validate();
    const auto emb_path = embedding_path_for(path);
    save_matrix(data.embedding, kEmbeddingTensor, emb_path);

    json synonyms = json::object();
    for (const auto& [key, list] : data.synonyms) synonyms[std::to_string(key)] = list;
    const json header = {{"format", "adpr-dataset"},
                         {"version", 1},
                         {"vocab_size", data.vocab_size},
                         {"num_labels", data.num_labels},
                         {"embed_dim", data.embed_dim()},
                         {"embedding", emb_path.filename().string()},
                         {"synonyms", synonyms}};

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write dataset " + path.string());
    out << header.dump() << "\n";
    for (const Example& ex : data.examples) {
        out << json{{"tokens", ex.tokens}, {"label", ex.label}}.dump() << "\n";
    }
}

ToyDataset generate_toy_dataset(const ToyDatasetConfig& config, std::uint64_t seed) {
    if (config.num_labels < 2) throw PreconditionError("toy dataset needs at least two labels");
    if (config.min_tokens == 0 || config.min_tokens > config.max_tokens) {
        throw PreconditionError("toy dataset token range is empty");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t d = config.embed_dim;

    std::vector<std::vector<double>> proto(config.num_labels, std::vector<double>(d));
    for (auto& p : proto) {
        double norm = 0.0;
        for (double& v : p) {
            v = gauss(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        for (double& v : p) v = 2.0 * v / norm;
    }

    const std::size_t group = 1 + config.synonyms_per_word;
    const std::size_t per_label = config.words_per_label * group;
    ToyDataset data;
    data.num_labels = config.num_labels;
    data.vocab_size = config.num_labels * per_label + config.neutral_words;
    data.embedding = Matrix(data.vocab_size, d);

    std::vector<std::vector<std::size_t>> roots(config.num_labels);
    for (std::size_t c = 0; c < config.num_labels; ++c) {
        for (std::size_t w = 0; w < config.words_per_label; ++w) {
            const std::size_t root = c * per_label + w * group;
            roots[c].push_back(root);
            for (std::size_t j = 0; j < d; ++j)
                data.embedding(root, j) = proto[c][j] + config.noise * gauss(rng);
            const std::size_t other = (c + 1 + w % (config.num_labels - 1)) % config.num_labels;
            for (std::size_t s = 1; s < group; ++s) {
                const double drift = config.synonym_drift * static_cast<double>(s) /
                                     static_cast<double>(config.synonyms_per_word);
                for (std::size_t j = 0; j < d; ++j) {
                    data.embedding(root + s, j) = data.embedding(root, j) +
                                                  drift * (proto[other][j] - proto[c][j]) +
                                                  0.5 * config.noise * gauss(rng);
                }
            }
            for (std::size_t a = 0; a < group; ++a) {
                auto& list = data.synonyms[root + a];
                for (std::size_t b = 0; b < group; ++b)
                    if (a != b) list.push_back(root + b);
            }
        }
    }
    const std::size_t neutral0 = config.num_labels * per_label;
    for (std::size_t n = 0; n < config.neutral_words; ++n)
        for (std::size_t j = 0; j < d; ++j) data.embedding(neutral0 + n, j) = config.noise * gauss(rng);

    std::uniform_int_distribution<std::size_t> len_dist(config.min_tokens, config.max_tokens);
    std::uniform_int_distribution<std::size_t> label_dist(0, config.num_labels - 1);
    std::uniform_int_distribution<std::size_t> root_dist(0, config.words_per_label - 1);
    std::uniform_int_distribution<std::size_t> neutral_dist(
        0, config.neutral_words == 0 ? 0 : config.neutral_words - 1);
    std::bernoulli_distribution neutral_coin(config.neutral_words == 0 ? 0.0 : 0.4);
    for (std::size_t i = 0; i < config.examples; ++i) {
        Example ex;
        ex.label = label_dist(rng);
        const std::size_t len = len_dist(rng);
        for (std::size_t t = 0; t < len; ++t) {
            // Position 0 is always indicative so every example carries signal.
            if (t > 0 && neutral_coin(rng)) {
                ex.tokens.push_back(neutral0 + neutral_dist(rng));
            } else {
                ex.tokens.push_back(roots[ex.label][root_dist(rng)]);
            }
        }
        data.examples.push_back(std::move(ex));
    }
    data.validate();
    return data;
}

Matrix embed_tokens(const Matrix& embedding, const std::vector<std::size_t>& tokens) {
    if (tokens.empty()) throw PreconditionError("cannot embed an empty token sequence");
    Matrix out(embedding.cols(), 1);
    for (std::size_t t : tokens) {
        if (t >= embedding.rows()) throw IndexError("token id outside the embedding table");
        auto row = embedding.row(t);
        for (std::size_t j = 0; j < row.size(); ++j) out(j, 0) += row[j];
    }
    const double n = static_cast<double>(tokens.size());
    for (double& v : out.data()) v /= n;
    return out;
}

Matrix embed_examples(const ToyDataset& data, std::size_t limit) {
    const std::size_t n =
        limit == 0 ? data.examples.size() : std::min(limit, data.examples.size());
    Matrix out(data.embed_dim(), n);
    for (std::size_t i = 0; i < n; ++i) {
        const Matrix col = embed_tokens(data.embedding, data.examples[i].tokens);
        for (std::size_t j = 0; j < out.rows(); ++j) out(j, i) = col(j, 0);
    }
    return out;
}

}  // namespace adaprune
