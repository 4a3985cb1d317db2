#ifndef VIDGEN_METRICS_HPP
#define VIDGEN_METRICS_HPP

#include <functional>
#include <optional>

#include "vidgen/curation.hpp"

namespace vidgen {

// videos are [F,3,H,W] in [0,1]

double psnr(const Tensorf& a, const Tensorf& b);  // capped at kPsnrCap for identical inputs
double psnr(const Tensord& a, const Tensord& b);  // double overload for exact-MSE oracles
double ssim(const Tensorf& a, const Tensorf& b);  // 11x11 gaussian sigma 1.5, K1=.01 K2=.03, on luma

// ||mu_a-mu_b||^2 + Tr(Sa + Sb - 2 (Sa Sb)^{1/2}); covariance shrinkage
// (1-l)S + l tr(S)/k I with l=0.01 when the sample count is below dim+1.
// clamp_events (optional out) counts negative-eigenvalue clamps.
double frechet_distance(const std::vector<std::vector<double>>& feats_a,
                        const std::vector<std::vector<double>>& feats_b, int* clamp_events = nullptr);

double csim(const std::vector<double>& id_embed_a, const std::vector<double>& id_embed_b);

// toy identity signature: mean color / area / second moment of the face
// region, located with the face raster; stand-in for a pretrained identity net
std::vector<double> identity_embedding(const Tensorf& video, const Tensorf& face_map);

// pluggable per-frame perceptual embedding (LPIPS-style slot, no default weights)
using FrameEmbedder = std::function<std::vector<double>(const Tensorf& frame)>;
double perceptual_distance(const Tensorf& a, const Tensorf& b, const FrameEmbedder& embedder);

struct AggregateMetrics {
    double psnr = 0, ssim = 0, frechet = 0, csim = 0;
    std::optional<double> perceptual;

    nlohmann::json to_json() const;
    static AggregateMetrics from_json(const nlohmann::json& j);
};

struct PerVideoMetrics {
    std::string id;
    double psnr = 0, ssim = 0, csim = 0;
    std::optional<double> perceptual;
};

struct MetricReport {
    std::vector<PerVideoMetrics> per_video;
    AggregateMetrics aggregate;
    std::string fvd_embedder_label = "toy-histogram";  // never a published-FVD scale
    int clamp_events = 0;

    nlohmann::json to_json() const;
};

// Samples every eval entry through `generator` and scores it against ground
// truth; aggregates are means over per-video values, FVD is set-level.
using VideoGenerator = std::function<Tensorf(const ManifestEntry&)>;
MetricReport evaluate(const VideoGenerator& generator, const Manifest& eval_manifest,
                      const VideoEmbedder& fvd_embedder = toy_video_embedding,
                      const std::optional<FrameEmbedder>& perceptual = std::nullopt);

// markdown table in the standard column order; missing perceptual values
// render as absent, best value per column bolded
std::string render_table(const std::vector<std::pair<std::string, AggregateMetrics>>& rows,
                         bool include_fvd = true, const std::string& label_header = "Model");

}  // namespace vidgen

#endif  // VIDGEN_METRICS_HPP
