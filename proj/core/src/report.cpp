#include "adaprune/report.hpp"

#include "adaprune/errors.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace adaprune {

namespace {

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

double to_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("csv line " + std::to_string(line_no) + ": '" + s + "' is not a number");
    }
}

std::size_t to_count(const std::string& s, std::size_t line_no) {
    const double v = to_double(s, line_no);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
        throw DataError("csv line " + std::to_string(line_no) + ": '" + s + "' is not a count");
    }
    return static_cast<std::size_t>(v);
}

template <typename RowFn>
void read_csv(std::istream& in, const char* header, std::size_t columns, RowFn&& on_row) {
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != header) {
        throw DataError(std::string("csv header must be: ") + header);
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != columns) {
            throw DataError("csv line " + std::to_string(line_no) + ": expected " +
                            std::to_string(columns) + " columns");
        }
        on_row(cells, line_no);
    }
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

}  // namespace

void write_prune_report_csv(const PruneReport& report, std::ostream& out) {
    out << kPruneReportHeader << "\n";
    for (const LayerReport& r : report.layers) {
        out << r.layer << "," << fmt_g(r.sparsity) << "," << fmt_g(r.mse_before) << ","
            << fmt_g(r.mse_after) << "," << fmt_g(r.step_loss_sum) << "," << fmt_g(r.seconds)
            << "\n";
    }
}

std::vector<LayerReport> read_prune_report_csv(std::istream& in) {
    std::vector<LayerReport> rows;
    read_csv(in, kPruneReportHeader, 6, [&](const std::vector<std::string>& c, std::size_t ln) {
        LayerReport r;
        r.layer = to_count(c[0], ln);
        r.sparsity = to_double(c[1], ln);
        r.mse_before = to_double(c[2], ln);
        r.mse_after = to_double(c[3], ln);
        r.step_loss_sum = to_double(c[4], ln);
        r.seconds = to_double(c[5], ln);
        r.pruned = r.sparsity > 0.0;
        rows.push_back(r);
    });
    return rows;
}

void write_attack_csv(const std::vector<AttackRecord>& records, std::ostream& out) {
    out << kAttackResultHeader << "\n";
    for (const AttackRecord& a : records) {
        const auto& r = a.result;
        out << sanitize(a.model) << "," << fmt_g(a.sparsity) << "," << r.total << ","
            << fmt_g(r.acc) << "," << fmt_g(r.aua) << "," << fmt_g(r.asr) << "," << r.attempted
            << "," << r.succeeded << "\n";
    }
}

std::vector<AttackRecord> read_attack_csv(std::istream& in) {
    std::vector<AttackRecord> rows;
    read_csv(in, kAttackResultHeader, 8, [&](const std::vector<std::string>& c, std::size_t ln) {
        AttackRecord a;
        a.model = c[0];
        a.sparsity = to_double(c[1], ln);
        a.result.total = to_count(c[2], ln);
        a.result.acc = to_double(c[3], ln);
        a.result.aua = to_double(c[4], ln);
        a.result.asr = to_double(c[5], ln);
        a.result.attempted = to_count(c[6], ln);
        a.result.succeeded = to_count(c[7], ln);
        rows.push_back(std::move(a));
    });
    return rows;
}

double model_sparsity(const Checkpoint& ckpt) {
    std::size_t zeros = 0;
    std::size_t total = 0;
    for (const Layer& l : ckpt.layers) {
        if (!l.prunable) continue;
        total += l.weight.size();
        zeros += l.weight.size() - count_nonzeros(l.weight.data());
    }
    return total == 0 ? 0.0 : static_cast<double>(zeros) / static_cast<double>(total);
}

std::string summarize_markdown(
    const std::vector<AttackRecord>& attacks,
    const std::vector<std::pair<std::string, std::vector<LayerReport>>>& prune_reports) {
    std::ostringstream md;
    md << "# Pruning summary\n";
    if (!attacks.empty()) {
        std::vector<AttackRecord> sorted = attacks;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const auto& a, const auto& b) { return a.sparsity < b.sparsity; });
        md << "\n## Robustness vs sparsity\n\n"
           << "| model | sparsity % | Acc % | Aua % | Asr % | attacked | flipped |\n"
           << "|---|---:|---:|---:|---:|---:|---:|\n";
        for (const auto& a : sorted) {
            md << "| " << a.model << " | " << fmt_fixed(100.0 * a.sparsity, 1) << " | "
               << fmt_fixed(a.result.acc, 1) << " | " << fmt_fixed(a.result.aua, 1) << " | "
               << fmt_fixed(a.result.asr, 1) << " | " << a.result.attempted << " | "
               << a.result.succeeded << " |\n";
        }
    }
    for (const auto& [name, layers] : prune_reports) {
        md << "\n## Layer report: " << name << "\n\n"
           << "| layer | sparsity % | mse before | mse after | step loss sum | seconds |\n"
           << "|---:|---:|---:|---:|---:|---:|\n";
        double total_seconds = 0.0;
        for (const auto& r : layers) {
            md << "| " << r.layer << " | " << fmt_fixed(100.0 * r.sparsity, 1) << " | "
               << fmt_g(r.mse_before) << " | " << fmt_g(r.mse_after) << " | "
               << fmt_g(r.step_loss_sum) << " | " << fmt_fixed(r.seconds, 4) << " |\n";
            total_seconds += r.seconds;
        }
        md << "\nTotal pruning time: " << fmt_fixed(total_seconds, 4) << " s\n";
    }
    return md.str();
}

std::string summarize_csv(const std::vector<AttackRecord>& attacks) {
    std::vector<AttackRecord> sorted = attacks;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.sparsity < b.sparsity; });
    std::ostringstream out;
    write_attack_csv(sorted, out);
    return out.str();
}

}  // namespace adaprune
