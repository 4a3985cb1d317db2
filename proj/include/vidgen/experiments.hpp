#ifndef VIDGEN_EXPERIMENTS_HPP
#define VIDGEN_EXPERIMENTS_HPP

#include "vidgen/checkpoint.hpp"
#include "vidgen/curation.hpp"
#include "vidgen/metrics.hpp"
#include "vidgen/training.hpp"

namespace vidgen {

// Declarative description of one of the three paper-shaped experiments:
//   finetune        baseline on real data, then synthetic-only finetune; two
//                   report rows (Table-1 shape)
//   ratio_scale     five models trained from scratch at sim:real ratios
//                   0:1..8:1; five rows (Table-2 shape) plus radar data
//   targeted_select three groups of real + n selected synthetic entries via
//                   random/manual/clip_sim; three rows (Table-3 shape, no FVD)
struct ExperimentPlan {
    std::string kind;  // finetune | ratio_scale | targeted_select
    std::filesystem::path real_manifest;
    std::filesystem::path synthetic_manifest;
    std::filesystem::path eval_manifest;  // ground-truth eval split; also the clip_sim target set
    std::filesystem::path out_dir;
    NetConfig net;
    TrainConfig train;
    int stage1_steps = 2000;  // paper's 300k/100k/30k scaled by 150x
    int stage2_steps = 1000;
    int finetune_steps = 300;
    int sample_steps = 50;
    int select_n = 5;             // targeted_select group size (paper: n = 50)
    std::vector<int> ratios = {0, 1, 2, 4, 8};
    // manual-selection id list; empty falls back to the first select_n ids in
    // lexicographic order (a deterministic stand-in for human inspection)
    std::vector<std::string> manual_ids;
    uint64_t seed = 0;
    uint64_t codec_seed = 0x1234abcd;

    nlohmann::json to_json() const;
    static ExperimentPlan from_json(const nlohmann::json& j);  // throws on unknown kind
};

ExperimentPlan load_plan(const std::filesystem::path& path);

struct ExperimentReport {
    std::string kind;
    std::string label_header;  // first table column
    bool include_fvd = true;
    std::vector<std::pair<std::string, AggregateMetrics>> rows;
    nlohmann::json radar;  // ratio_scale only, Fig-4 normalization

    nlohmann::json to_json() const;
    std::string to_markdown() const;
};

// Fig-4 rule: per metric, min := the 0:1 row's value, max := row maximum;
// values map to clamp((v-min)/(max-min), 0, 1); LPIPS and FVD are inverted
// after normalization. Throws if the 0:1 row is missing.
nlohmann::json normalize_radar(const std::vector<std::pair<std::string, AggregateMetrics>>& rows);

// Runs the plan end to end, writing per-row checkpoints/records/metrics plus
// report.json and report.md under plan.out_dir. Any sub-step failure rethrows
// with the failing stage named; partial outputs are preserved.
ExperimentReport run_experiment(const ExperimentPlan& plan);

// cmd_report: merge report.json files from several run dirs into one table;
// recomputes radar data when a ratio_scale report is present.
ExperimentReport merge_reports(const std::vector<std::filesystem::path>& run_dirs);

}  // namespace vidgen

#endif  // VIDGEN_EXPERIMENTS_HPP
