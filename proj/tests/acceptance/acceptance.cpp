// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include "adaprune/adaprune.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

using namespace adaprune;
using adaprune::testing::Rng;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

template <class F>
void criterion(const char* id, const char* title, F&& body) {
    Outcome o{false, ""};
    const auto start = std::chrono::steady_clock::now();
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("[%s] %s %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(),
                secs);
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<double> values(const Matrix& row) {
    auto s = row.row(0);
    return {s.begin(), s.end()};
}

Checkpoint toy_mlp(Rng& rng) {
    Checkpoint c;
    const std::size_t widths[] = {8, 8, 8, 4};
    for (std::size_t l = 0; l < 3; ++l) {
        Layer layer;
        layer.weight = (1.0 / std::sqrt(8.0)) * testing::random_matrix(widths[l + 1], widths[l], rng);
        std::vector<double> b(widths[l + 1]);
        for (double& v : b) v = 0.1 * rng.normal();
        layer.bias = b;
        layer.activation = l == 2 ? Activation::identity : Activation::relu;
        c.layers.push_back(layer);
    }
    return c;
}

Outcome ac1() {
    Rng rng(1001);
    const auto start = std::chrono::steady_clock::now();
    int mask_mismatch = 0;
    double worst = 0.0;
    for (int layer = 0; layer < 100; ++layer) {
        const std::size_t d_in = rng.index(2, 8);
        const std::size_t d_out = rng.index(1, 4);
        const Matrix x = testing::random_matrix(d_in, 2 * d_in, rng);
        const Matrix w = testing::random_matrix(d_out, d_in, rng);
        const Matrix h = build_hessian(x, 0.0);
        const double s = 0.125 * static_cast<double>(rng.index(1, 7));
        const auto target = SparsityTarget::unstructured(s);
        const std::size_t k = target.removals(d_in);
        for (std::size_t r = 0; r < d_out; ++r) {
            const auto traj = prune_row(w.row_matrix(r), h, target);
            const auto oracle = testing::greedy_refit_oracle(values(w.row_matrix(r)), h, k);
            if (traj.pruned_order != oracle.pruned_order) ++mask_mismatch;
            worst = std::max(worst, testing::max_abs_diff(traj.final_row.row(0), oracle.final_row));
        }
    }
    const double secs = seconds_since(start);
    const bool ok = mask_mismatch == 0 && worst <= 1e-8 && secs < 30.0;
    return {ok, std::to_string(mask_mismatch) + " mask mismatches, max weight diff " +
                    fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + "s of 30s"};
}

Outcome ac2() {
    Rng rng(1002);
    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = rng.index(2, 16);
        const Matrix h = testing::random_spd(d, rng);
        std::vector<std::size_t> order(d);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng.engine());
        const std::size_t steps = rng.index(1, d - 1);
        HessianState s = init_state(h);
        for (std::size_t i = 0; i < steps; ++i) s.remove(order[i]);
        const auto keep = s.active_indices();
        const Matrix direct = testing::gauss_jordan_inverse(testing::submatrix(h, keep));
        const Matrix inc = testing::submatrix(s.inverse(), keep);
        worst = std::max(worst, inf_norm(inc - direct) / inf_norm(direct));
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-8 && secs < 10.0,
            "max relative inf-norm error " + fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + "s of 10s"};
}

Outcome ac3() {
    Rng rng(1003);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = rng.index(2, 12);
        const Matrix x = testing::random_matrix(d, 2 * d, rng);
        const Matrix w = testing::random_matrix(1, d, rng);
        const Matrix h = build_hessian(x, 0.0);
        const auto traj =
            prune_row(w, h, SparsityTarget::unstructured(rng.uniform(0.0, 0.95)));
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < d; ++i)
            if (std::find(traj.pruned_order.begin(), traj.pruned_order.end(), i) ==
                traj.pruned_order.end())
                keep.push_back(i);
        // Direct least squares of the dense outputs on the surviving inputs.
        const Matrix y = matmul(w, x);
        std::vector<double> refit(d, 0.0);
        if (!keep.empty()) {
            Matrix xs(keep.size(), x.cols());
            for (std::size_t a = 0; a < keep.size(); ++a) xs.set_row(a, x.row(keep[a]));
            const Matrix v = testing::normal_equation_lstsq(xs, y);
            for (std::size_t a = 0; a < keep.size(); ++a) refit[keep[a]] = v(0, a);
        }
        worst = std::max(worst, testing::max_abs_diff(traj.final_row.row(0), refit));
    }
    return {worst < 1e-6, "max change after refit " + fmt("%.3g", worst)};
}

Outcome ac4() {
    Rng rng(1004);
    int order_mismatch = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = rng.index(2, 16);
        const Matrix h = build_hessian(testing::random_matrix(d, 2 * d, rng), 1e-4);
        const Matrix w = testing::random_matrix(1, d, rng);
        const auto target = SparsityTarget::unstructured(0.5);
        const auto base = prune_row(w, h, target);
        for (double c : {2.0, 10.0}) {
            const auto scaled = prune_row(w, c * h, target);
            if (scaled.pruned_order != base.pruned_order) ++order_mismatch;
            worst = std::max(worst, max_abs(scaled.final_row - base.final_row));
        }
    }
    return {order_mismatch == 0 && worst <= 1e-10,
            std::to_string(order_mismatch) + " order mismatches, max weight diff " + fmt("%.3g", worst)};
}

Outcome ac5() {
    const auto start = std::chrono::steady_clock::now();
    int wins = 0;
    double sum_adaptive = 0.0;
    double sum_independent = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Rng rng(5000 + seed);
        const Checkpoint model = toy_mlp(rng);
        const Matrix calib = testing::random_matrix(8, 64, rng);
        const std::vector<SparsityTarget> targets(3, SparsityTarget::unstructured(0.5));
        PipelineOptions adaptive;
        PipelineOptions independent;
        independent.adaptive = false;
        const double a = prune_model(model, calib, targets, adaptive).report.final_output_mse;
        const double b = prune_model(model, calib, targets, independent).report.final_output_mse;
        if (a <= b) ++wins;
        sum_adaptive += a;
        sum_independent += b;
    }
    const double secs = seconds_since(start);
    const double ma = sum_adaptive / 20.0;
    const double mi = sum_independent / 20.0;
    return {wins >= 16 && ma <= mi && secs < 60.0,
            "adaptive <= independent on " + std::to_string(wins) + "/20 seeds, mean " +
                fmt("%.4g", ma) + " vs " + fmt("%.4g", mi) + ", " + fmt("%.2f", secs) + "s of 60s"};
}

Outcome ac6() {
    Rng rng(1006);
    int bad_rows = 0;
    int rows = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d_in = rng.index(1, 24);
        const std::size_t d_out = rng.index(1, 5);
        const double s = rng.uniform(0.0, 0.99);
        const Matrix x = testing::random_matrix(d_in, d_in + 8, rng);
        const Matrix w = testing::random_matrix(d_out, d_in, rng);
        const auto res = prune_layer(w, x, SparsityTarget::unstructured(s), 1e-4);
        const std::size_t expected = d_in - static_cast<std::size_t>(static_cast<double>(d_in) * s);
        for (std::size_t r = 0; r < d_out; ++r, ++rows)
            if (count_nonzeros(res.weight.row(r)) != expected) ++bad_rows;
    }
    const Matrix w = testing::random_matrix(8, 128, rng);
    const Matrix x = testing::random_matrix(128, 256, rng);
    const auto nm = prune_layer(w, x, SparsityTarget::structured(32, 64), 1e-4);
    int bad_banks = 0;
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t b = 0; b < 2; ++b)
            if (count_nonzeros(nm.weight.row(r).subspan(64 * b, 64)) != 32) ++bad_banks;
    return {bad_rows == 0 && bad_banks == 0,
            std::to_string(bad_rows) + "/" + std::to_string(rows) + " rows off target, " +
                std::to_string(bad_banks) + "/16 banks off 32:64"};
}

Outcome ac7() {
    Rng rng(1007);
    int beaten = 0;
    double worst_recovery = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t d_in = rng.index(1, 8);
        const std::size_t d_out = rng.index(1, 4);
        const std::size_t n = d_in + rng.index(1, 16);
        const Matrix xhat = testing::random_matrix(d_in, n, rng);
        const Matrix w = testing::random_matrix(d_out, d_in, rng);
        const Matrix y = matmul(w, testing::random_matrix(d_in, n, rng));
        const Matrix wbar = recalibrate_weights(xhat, y, 0.0, false).weight;
        const double best = frobenius_norm(matmul(wbar, xhat) - y);
        const double tol = 1e-12 * std::max(1.0, best);
        if (best > frobenius_norm(matmul(w, xhat) - y) + tol) ++beaten;
        for (int c = 0; c < 20; ++c) {
            const Matrix challenger = testing::random_matrix(d_out, d_in, rng);
            if (best > frobenius_norm(matmul(challenger, xhat) - y) + tol) ++beaten;
        }
        const Matrix recovered = recalibrate_weights(xhat, matmul(w, xhat), 0.0, false).weight;
        worst_recovery = std::max(worst_recovery, max_abs(recovered - w));
    }
    return {beaten == 0 && worst_recovery <= 1e-8,
            std::to_string(beaten) + " challengers beat the refit, recovery error " +
                fmt("%.3g", worst_recovery)};
}

Checkpoint scalar(double w) {
    Checkpoint c;
    Layer l;
    l.weight = Matrix{{w}};
    c.layers.push_back(l);
    return c;
}

double peak_at_one(const Checkpoint& c) {
    const double d = c.layers[0].weight(0, 0) - 1.0;
    return -d * d;
}

Outcome ac8() {
    Rng rng(1008);
    int monotone_fail = 0;
    int floor_fail = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<SoupCandidate> cands;
        const std::size_t n = rng.index(1, 8);
        double best_single = -INFINITY;
        for (std::size_t i = 0; i < n; ++i) {
            cands.push_back({scalar(rng.uniform(-4.0, 6.0)), rng.uniform(0.0, 1.0)});
            best_single = std::max(best_single, peak_at_one(cands.back().ckpt));
        }
        // Scores equal to the eval make the top-scored candidate the best single one.
        for (auto& c : cands) c.score = peak_at_one(c.ckpt);
        const auto res = greedy_weight_average(cands, peak_at_one);
        if (!std::is_sorted(res.trace.begin(), res.trace.end())) ++monotone_fail;
        if (peak_at_one(res.checkpoint) < best_single) ++floor_fail;
    }
    const std::vector<SoupCandidate> traced{{scalar(5.0), 0.1}, {scalar(3.0), 0.9}, {scalar(-1.0), 0.5}};
    const auto res = greedy_weight_average(traced, peak_at_one);
    const bool traced_ok = res.chosen == std::vector<std::size_t>{1, 2} &&
                           res.trace == std::vector<double>{-4.0, 0.0} &&
                           res.checkpoint.layers[0].weight(0, 0) == 1.0;
    return {monotone_fail == 0 && floor_fail == 0 && traced_ok,
            std::to_string(monotone_fail) + " non-monotone traces, " + std::to_string(floor_fail) +
                " soups below best single, hand-traced case " + (traced_ok ? "exact" : "WRONG")};
}

Outcome ac9() {
    ToyDatasetConfig cfg;
    cfg.examples = 300;
    const ToyDataset data = generate_toy_dataset(cfg, 9);
    TrainConfig tc;
    tc.widths = {data.embed_dim(), 8, data.num_labels};
    tc.epochs = 100;
    tc.seed = 9;
    const Checkpoint model = train_toy(data, tc);
    const auto r = evaluate_robustness(model, data);
    const double harness_gap = std::abs(r.asr - 100.0 * (r.acc - r.aua) / r.acc);
    bool ok = harness_gap <= 0.05;
    std::string detail = "harness acc " + fmt("%.2f", r.acc) + " aua " + fmt("%.2f", r.aua) +
                         " asr " + fmt("%.2f", r.asr) + " (gap " + fmt("%.2g", harness_gap) + ")";

    struct Triple {
        std::size_t correct;
        std::size_t survived;
        double asr;
    };
    for (const Triple t : {Triple{923, 127, 86.2}, Triple{947, 191, 80.0}}) {
        const auto inj = RobustnessResult::from_counts(1000, t.correct, t.correct - t.survived);
        const bool match = std::abs(inj.asr - t.asr) <= 0.05;
        ok = ok && match;
        detail += "; (" + fmt("%.1f", inj.acc) + ", " + fmt("%.1f", inj.aua) + ") -> asr " +
                  fmt("%.2f", inj.asr) + " vs " + fmt("%.1f", t.asr) + (match ? " ok" : " MISMATCH");
    }
    return {ok, detail};
}

Outcome ac10() {
    Rng rng(1010);
    int unsound = 0;
    int flips = 0;
    for (int ex = 0; ex < 50; ++ex) {
        const std::size_t vocab = 8;
        const Matrix emb = testing::random_matrix(vocab, 3, rng);
        Checkpoint net;
        Layer a;
        a.weight = testing::random_matrix(5, 3, rng);
        a.activation = Activation::relu;
        Layer b;
        b.weight = testing::random_matrix(2, 5, rng);
        net.layers = {a, b};
        SynonymMap syn;
        for (std::size_t t = 0; t < vocab; ++t) {
            const std::size_t k = rng.index(0, 2);
            for (std::size_t j = 0; j < k; ++j) {
                std::size_t s = rng.index(0, vocab - 2);
                if (s >= t) ++s;
                syn[t].push_back(s);
            }
        }
        std::vector<std::size_t> tokens(rng.index(1, 3));
        for (auto& t : tokens) t = rng.index(0, vocab - 1);
        const std::size_t budget = tokens.size();
        const bool exhaustive = testing::exhaustive_attack_flips(net, emb, tokens, syn, budget);
        const bool greedy = attack_example(net, emb, tokens, syn, budget).success;
        if (greedy && !exhaustive) ++unsound;
        if (exhaustive) ++flips;
    }

    int archive_mismatch = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Checkpoint c;
        c.name = "rt" + std::to_string(trial);
        std::size_t d = rng.index(1, 6);
        for (std::size_t l = 0; l < 3; ++l) {
            Layer layer;
            const std::size_t d_out = rng.index(1, 6);
            layer.weight = testing::random_matrix(d_out, d, rng);
            if (rng.index(0, 1)) {
                std::vector<double> bias(d_out);
                for (double& v : bias) v = rng.normal() * std::pow(10.0, rng.uniform(-300, 300));
                layer.bias = bias;
            }
            c.layers.push_back(layer);
            d = d_out;
        }
        const Checkpoint back = decode_checkpoint(encode_checkpoint(c));
        for (std::size_t l = 0; l < 3; ++l) {
            const auto& x = c.layers[l];
            const auto& y = back.layers[l];
            bool same = x.weight.size() == y.weight.size() &&
                        std::memcmp(x.weight.data().data(), y.weight.data().data(),
                                    x.weight.size() * sizeof(double)) == 0 &&
                        x.bias.has_value() == y.bias.has_value();
            if (same && x.bias)
                same = std::memcmp(x.bias->data(), y.bias->data(), x.bias->size() * sizeof(double)) == 0;
            if (!same) ++archive_mismatch;
        }
    }
    return {unsound == 0 && archive_mismatch == 0,
            std::to_string(unsound) + " greedy flips without an exhaustive flip (" +
                std::to_string(flips) + "/50 flippable), " + std::to_string(archive_mismatch) +
                " archive round-trip mismatches"};
}

}  // namespace

int main() {
    criterion("AC1", "OBS oracle equivalence", ac1);
    criterion("AC2", "inverse downdate identity", ac2);
    criterion("AC3", "mask-conditional optimality", ac3);
    criterion("AC4", "Hessian scale invariance", ac4);
    criterion("AC5", "adaptive vs independent pruning", ac5);
    criterion("AC6", "sparsity exactness", ac6);
    criterion("AC7", "recalibration optimality", ac7);
    criterion("AC8", "greedy soup guarantees", ac8);
    criterion("AC9", "Asr arithmetic identity", ac9);
    criterion("AC10", "attack oracle and archive round-trip", ac10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
