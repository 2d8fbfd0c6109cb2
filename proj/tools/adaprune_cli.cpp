// adaprune command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include "adaprune/adaprune.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace adaprune;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

constexpr const char* kCalibrationTensor = "calibration";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

SparsityTarget parse_nm(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("--nm expects N:M, e.g. 32:64");
    try {
        const auto n = std::stoul(spec.substr(0, colon));
        const auto m = std::stoul(spec.substr(colon + 1));
        if (n == 0 || n >= m) throw UsageError("--nm needs 1 <= N < M");
        return SparsityTarget::structured(n, m);
    } catch (const std::logic_error&) {
        throw UsageError("--nm expects two integers N:M");
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("cannot write " + path);
    return out;
}

struct PruneArgs {
    std::string model, calib, out, report, nm;
    double sparsity = 0.5;
    double lambda = kDefaultLambda;
    bool independent = false;
    unsigned threads = 0;
};

int run_prune(const PruneArgs& a) {
    const Checkpoint ckpt = load_archive(a.model);
    const Matrix calib = load_matrix(a.calib, kCalibrationTensor);
    const SparsityTarget target =
        a.nm.empty() ? SparsityTarget::unstructured(a.sparsity) : parse_nm(a.nm);
    std::vector<SparsityTarget> targets(ckpt.layers.size(), target);

    PipelineOptions opts;
    opts.lambda = a.lambda;
    opts.adaptive = !a.independent;
    opts.prune.threads = a.threads;
    PruneOutcome result = prune_model(ckpt, calib, targets, opts);

    for (const auto& w : result.report.warnings) std::cerr << "warning: " << w << "\n";
    result.checkpoint.metadata["pruned.mode"] = a.independent ? "independent" : "adaptive";
    result.checkpoint.metadata["pruned.target"] =
        a.nm.empty() ? std::to_string(a.sparsity) : a.nm;
    result.checkpoint.metadata["pruned.final_output_mse"] =
        std::to_string(result.report.final_output_mse);
    save_archive(result.checkpoint, a.out);
    if (!a.report.empty()) {
        auto out = open_out(a.report);
        write_prune_report_csv(result.report, out);
    }
    const auto pruned = std::count_if(result.report.layers.begin(), result.report.layers.end(),
                                      [](const LayerReport& r) { return r.pruned; });
    std::printf("pruned %zu of %zu layers, model sparsity %.4f, final output mse %.6g\n",
                static_cast<std::size_t>(pruned), result.report.layers.size(),
                model_sparsity(result.checkpoint),
                result.report.final_output_mse);
    return 0;
}

struct SoupArgs {
    std::vector<std::string> models;
    std::string eval = "attack";
    std::string data, out;
    std::size_t max_subs = 5;
    unsigned threads = 0;
};

int run_soup(const SoupArgs& a) {
    const ToyDataset data = load_dataset(a.data);
    RobustnessOptions ropts{a.max_subs, a.threads};
    const SoupEval eval = [&](const Checkpoint& c) {
        if (a.eval == "clean") return clean_accuracy(c, data);
        return evaluate_robustness(c, data, ropts).aua;
    };
    std::vector<SoupCandidate> candidates;
    for (const auto& path : a.models) {
        Checkpoint c = load_archive(path);
        const double score = eval(c);
        std::printf("candidate %s: %s %.2f\n", path.c_str(), a.eval.c_str(), score);
        candidates.push_back({std::move(c), score});
    }
    SoupResult soup = greedy_weight_average(candidates, eval);
    std::string chosen;
    for (std::size_t i : soup.chosen) {
        if (!chosen.empty()) chosen += " ";
        chosen += a.models[i];
    }
    soup.checkpoint.name = "soup";
    soup.checkpoint.metadata["soup.ingredients"] = chosen;
    save_archive(soup.checkpoint, a.out);
    std::printf("soup of %zu/%zu candidates, %s %.2f\n", soup.chosen.size(), candidates.size(),
                a.eval.c_str(), soup.trace.back());
    return 0;
}

struct AttackArgs {
    std::string model, data, out;
    std::size_t max_subs = 5;
    unsigned threads = 0;
};

int run_attack(const AttackArgs& a) {
    const Checkpoint ckpt = load_archive(a.model);
    const ToyDataset data = load_dataset(a.data);
    const RobustnessResult r = evaluate_robustness(ckpt, data, {a.max_subs, a.threads});
    AttackRecord rec{a.model, model_sparsity(ckpt), r};
    auto out = open_out(a.out);
    write_attack_csv({rec}, out);
    std::printf("Acc %.1f  Aua %.1f  Asr %.1f  (%zu attacked, %zu flipped)\n", r.acc, r.aua, r.asr,
                r.attempted, r.succeeded);
    return 0;
}

int run_eval(const std::string& model, const std::string& data_path) {
    const Checkpoint ckpt = load_archive(model);
    const ToyDataset data = load_dataset(data_path);
    std::printf("accuracy %.2f%% on %zu examples, sparsity %.4f\n", clean_accuracy(ckpt, data),
                data.examples.size(), model_sparsity(ckpt));
    return 0;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out_path) {
    std::vector<AttackRecord> attacks;
    std::vector<std::pair<std::string, std::vector<LayerReport>>> prunes;
    for (const auto& path : inputs) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open " + path);
        std::string header;
        std::getline(in, header);
        if (!header.empty() && header.back() == '\r') header.pop_back();
        in.seekg(0);
        if (header == kAttackResultHeader) {
            auto rows = read_attack_csv(in);
            attacks.insert(attacks.end(), rows.begin(), rows.end());
        } else if (header == kPruneReportHeader) {
            prunes.emplace_back(path, read_prune_report_csv(in));
        } else {
            throw DataError(path + " is neither a prune report nor an attack result CSV");
        }
    }
    const bool csv = out_path.size() >= 4 && out_path.substr(out_path.size() - 4) == ".csv";
    auto out = open_out(out_path);
    out << (csv ? summarize_csv(attacks) : summarize_markdown(attacks, prunes));
    return 0;
}

struct GenArgs {
    std::string out;
    std::uint64_t seed = 1;
    ToyDatasetConfig config;
};

int run_gen_data(const GenArgs& a) {
    const ToyDataset data = generate_toy_dataset(a.config, a.seed);
    save_dataset(data, a.out);
    std::printf("wrote %zu examples, vocab %zu, embed dim %zu\n", data.examples.size(),
                data.vocab_size, data.embed_dim());
    return 0;
}

struct TrainArgs {
    std::string data, out;
    std::vector<std::size_t> hidden{16};
    TrainConfig config;
};

int run_train(TrainArgs a) {
    const ToyDataset data = load_dataset(a.data);
    a.config.widths.clear();
    a.config.widths.push_back(data.embed_dim());
    a.config.widths.insert(a.config.widths.end(), a.hidden.begin(), a.hidden.end());
    a.config.widths.push_back(data.num_labels);
    Checkpoint model = train_toy(data, a.config);
    model.metadata["train.epochs"] = std::to_string(a.config.epochs);
    model.metadata["train.learning_rate"] = std::to_string(a.config.learning_rate);
    save_archive(model, a.out);
    std::printf("training accuracy %.2f%%\n", clean_accuracy(model, data));
    return 0;
}

int run_calib(const std::string& data_path, std::size_t samples, const std::string& out) {
    const ToyDataset data = load_dataset(data_path);
    const Matrix calib = embed_examples(data, samples);
    save_matrix(calib, kCalibrationTensor, out);
    std::printf("calibration set %zu x %zu\n", calib.rows(), calib.cols());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive layer-wise pruning of feed-forward checkpoints"};
    app.require_subcommand(1);

    PruneArgs prune;
    auto* cmd_prune = app.add_subcommand("prune", "Prune a checkpoint with calibration data");
    cmd_prune->add_option("--model", prune.model, "Dense checkpoint (.adpr)")->required();
    cmd_prune->add_option("--calib", prune.calib, "Calibration archive (d_in x N)")->required();
    cmd_prune->add_option("--sparsity", prune.sparsity, "Unstructured ratio in [0, 1)")
        ->check(CLI::Range(0.0, 0.999999));
    cmd_prune->add_option("--nm", prune.nm, "Structured N:M target, e.g. 32:64");
    cmd_prune->add_option("--lambda", prune.lambda, "Diagonal damping")
        ->check(CLI::NonNegativeNumber);
    cmd_prune->add_flag("--independent", prune.independent,
                        "Prune each layer against its dense input, no recalibration");
    cmd_prune->add_option("--threads", prune.threads, "Worker threads (0 = all cores)");
    cmd_prune->add_option("--out", prune.out, "Output checkpoint")->required();
    cmd_prune->add_option("--report", prune.report, "Per-layer CSV report");

    SoupArgs soup;
    auto* cmd_soup = app.add_subcommand("soup", "Greedy weight averaging of candidates");
    cmd_soup->add_option("--models", soup.models, "Candidate checkpoints")->required();
    cmd_soup->add_option("--eval", soup.eval, "Selection metric")
        ->check(CLI::IsMember({"clean", "attack"}));
    cmd_soup->add_option("--data", soup.data, "Dataset file")->required();
    cmd_soup->add_option("--max-subs", soup.max_subs, "Attack substitution budget");
    cmd_soup->add_option("--threads", soup.threads, "Worker threads (0 = all cores)");
    cmd_soup->add_option("--out", soup.out, "Output checkpoint")->required();

    AttackArgs attack;
    auto* cmd_attack = app.add_subcommand("attack", "Synonym-substitution robustness evaluation");
    cmd_attack->add_option("--model", attack.model, "Checkpoint")->required();
    cmd_attack->add_option("--data", attack.data, "Dataset file")->required();
    cmd_attack->add_option("--max-subs", attack.max_subs, "Substitution budget");
    cmd_attack->add_option("--threads", attack.threads, "Worker threads (0 = all cores)");
    cmd_attack->add_option("--out", attack.out, "Result CSV")->required();

    std::string eval_model, eval_data;
    auto* cmd_eval = app.add_subcommand("eval", "Clean accuracy of a checkpoint");
    cmd_eval->add_option("--model", eval_model, "Checkpoint")->required();
    cmd_eval->add_option("--data", eval_data, "Dataset file")->required();

    std::vector<std::string> report_in;
    std::string report_out;
    auto* cmd_report = app.add_subcommand("report", "Summarize prune reports and attack results");
    cmd_report->add_option("--in", report_in, "CSV inputs")->required();
    cmd_report->add_option("--out", report_out, "Markdown (or .csv) summary")->required();

    GenArgs gen;
    auto* cmd_gen = app.add_subcommand("gen-data", "Generate a synthetic toy dataset");
    cmd_gen->add_option("--out", gen.out, "Dataset file")->required();
    cmd_gen->add_option("--seed", gen.seed, "RNG seed");
    cmd_gen->add_option("--examples", gen.config.examples, "Number of examples");
    cmd_gen->add_option("--labels", gen.config.num_labels, "Number of labels");
    cmd_gen->add_option("--embed-dim", gen.config.embed_dim, "Embedding width");
    cmd_gen->add_option("--drift", gen.config.synonym_drift, "Synonym drift toward other labels");

    TrainArgs train;
    auto* cmd_train = app.add_subcommand("train", "Train a toy MLP classifier");
    cmd_train->add_option("--data", train.data, "Dataset file")->required();
    cmd_train->add_option("--hidden", train.hidden, "Hidden layer widths");
    cmd_train->add_option("--epochs", train.config.epochs, "Full-batch epochs");
    cmd_train->add_option("--lr", train.config.learning_rate, "Learning rate");
    cmd_train->add_option("--seed", train.config.seed, "Initialization seed");
    cmd_train->add_option("--out", train.out, "Output checkpoint")->required();

    std::string calib_data, calib_out;
    std::size_t calib_samples = 0;
    auto* cmd_calib = app.add_subcommand("calib", "Build a calibration archive from a dataset");
    cmd_calib->add_option("--data", calib_data, "Dataset file")->required();
    cmd_calib->add_option("--samples", calib_samples, "Number of examples (0 = all)");
    cmd_calib->add_option("--out", calib_out, "Calibration archive")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*cmd_prune) return run_prune(prune);
        if (*cmd_soup) return run_soup(soup);
        if (*cmd_attack) return run_attack(attack);
        if (*cmd_eval) return run_eval(eval_model, eval_data);
        if (*cmd_report) return run_report(report_in, report_out);
        if (*cmd_gen) return run_gen_data(gen);
        if (*cmd_train) return run_train(train);
        if (*cmd_calib) return run_calib(calib_data, calib_samples, calib_out);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
