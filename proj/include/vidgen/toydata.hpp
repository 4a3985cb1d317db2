#ifndef VIDGEN_TOYDATA_HPP
#define VIDGEN_TOYDATA_HPP

#include "vidgen/manifest.hpp"

namespace vidgen {

// Procedural stand-in for real footage: an oscillating articulated stick
// figure over a background plate, rendered together with aligned body/face/
// normal rasters, silhouette masks and the plate itself.  The synthetic
// domain is flat-shaded; the real domain gets a noise texture plus per-frame
// sensor noise, so the two domains are statistically distinguishable.
struct ToyDatasetSpec {
    int count = 8;
    int frames = 16;
    int height = 64;
    int width = 64;
    std::string domain = "real";  // real | synthetic
    std::string id_prefix;        // defaults to domain

    nlohmann::json to_json() const;
    static ToyDatasetSpec from_json(const nlohmann::json& j);
};

Manifest generate_toy_dataset(const ToyDatasetSpec& spec, uint64_t seed, const std::filesystem::path& out_root);

// local-variance score used by the domain-separation check
double pixel_variance_score(const Tensorf& video);

}  // namespace vidgen

#endif  // VIDGEN_TOYDATA_HPP
