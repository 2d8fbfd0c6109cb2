#pragma once

#include "adaprune/model.hpp"
#include "adaprune/pipeline.hpp"
#include "adaprune/robustness.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace adaprune {

// Prune report CSV: fixed header
//   layer,sparsity,mse_before,mse_after,step_loss_sum,seconds
// Attack result CSV: fixed header
//   model,sparsity,total,acc,aua,asr,attempted,succeeded

inline constexpr const char* kPruneReportHeader =
    "layer,sparsity,mse_before,mse_after,step_loss_sum,seconds";
inline constexpr const char* kAttackResultHeader =
    "model,sparsity,total,acc,aua,asr,attempted,succeeded";

void write_prune_report_csv(const PruneReport& report, std::ostream& out);
std::vector<LayerReport> read_prune_report_csv(std::istream& in);

struct AttackRecord {
    std::string model;
    double sparsity = 0.0;
    RobustnessResult result;
};

void write_attack_csv(const std::vector<AttackRecord>& records, std::ostream& out);
std::vector<AttackRecord> read_attack_csv(std::istream& in);

/// Fraction of zero weights across the prunable layers (0 if none).
double model_sparsity(const Checkpoint& ckpt);

/// Markdown summary: a sparsity vs Acc/Aua/Asr table (rows sorted by
/// sparsity) and, for each prune report, its per-layer table.
std::string summarize_markdown(
    const std::vector<AttackRecord>& attacks,
    const std::vector<std::pair<std::string, std::vector<LayerReport>>>& prune_reports);

/// CSV variant of the sparsity vs Acc/Aua/Asr table.
std::string summarize_csv(const std::vector<AttackRecord>& attacks);

}  // namespace adaprune
