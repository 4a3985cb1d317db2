#ifndef VIDGEN_MANIFEST_HPP
#define VIDGEN_MANIFEST_HPP

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "vidgen/model.hpp"

namespace vidgen {

// One dataset record; media live in a per-entry directory with a fixed layout:
//   <locator>/video/NNN.ppm   rendered frames
//   <locator>/smpl/NNN.ppm    body map S
//   <locator>/face/NNN.ppm    face map (the paper's H)
//   <locator>/normal/NNN.ppm  surface normal map N
//   <locator>/mask/NNN.pgm    foreground mask
//   <locator>/background.ppm  static background plate
struct ManifestEntry {
    std::string id;
    std::string domain;  // "real" | "synthetic"
    std::string locator;  // entry directory
    int64_t frame_count = 0;
    bool present_s = true;
    bool present_h = true;
    bool present_n = true;
    std::optional<std::vector<double>> embedding;

    nlohmann::json to_json() const;
    static ManifestEntry from_json(const nlohmann::json& j);
};

using Manifest = std::vector<ManifestEntry>;

inline constexpr int kManifestSchemaVersion = 1;

void save_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest load_manifest(const std::filesystem::path& path);

// media loaders (frames selected by index)
Tensorf load_video(const ManifestEntry& e, const std::vector<int64_t>& frames);
ControlBundle load_controls(const ManifestEntry& e, const std::vector<int64_t>& frames);
Tensorf load_mask_video(const ManifestEntry& e, const std::vector<int64_t>& frames);  // [F,1,H,W]
Tensorf load_background(const ManifestEntry& e);                                      // [3,H,W]

}  // namespace vidgen

#endif  // VIDGEN_MANIFEST_HPP
