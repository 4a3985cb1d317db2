#ifndef VIDGEN_CURATION_HPP
#define VIDGEN_CURATION_HPP

#include <functional>

#include "vidgen/manifest.hpp"

namespace vidgen {

// pluggable whole-video embedder (CLIP-style backends slot in here)
using VideoEmbedder = std::function<std::vector<double>(const Tensorf& video)>;

// Default toy embedder: per-frame downsampled color histograms plus
// frame-difference energy, mean-pooled over all frames.
std::vector<double> toy_video_embedding(const Tensorf& video);

std::vector<double> embed_video(const ManifestEntry& entry, const VideoEmbedder& embedder = toy_video_embedding);

// annotate every entry in place
void embed_manifest(Manifest& m, const VideoEmbedder& embedder = toy_video_embedding);

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// keeps all real entries and adds exactly ratio_syn * |real| synthetic
// entries sampled without replacement, interleaved deterministically by seed
Manifest mix_datasets(const Manifest& real, const Manifest& synthetic, int ratio_syn, int ratio_real,
                      uint64_t seed);

enum class TargetAggregation { Max, Mean };

struct SelectionResult {
    std::string strategy;  // random | manual | clip_sim
    std::vector<std::string> ids;
    std::vector<double> scores;  // clip_sim only, sorted non-increasing
    std::string target_descriptor;
};

// score = aggregated cosine similarity against the target set; ties broken by
// lexicographic id
SelectionResult select_top_n(const std::vector<std::vector<double>>& targets, const Manifest& candidates,
                             size_t n, TargetAggregation agg = TargetAggregation::Max);

SelectionResult select_random(const Manifest& candidates, size_t n, uint64_t seed);
SelectionResult select_manual(const Manifest& candidates, const std::vector<std::string>& id_list);

Manifest subset_by_ids(const Manifest& pool, const std::vector<std::string>& ids);

}  // namespace vidgen

#endif  // VIDGEN_CURATION_HPP
