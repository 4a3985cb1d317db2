#include "vidgen/manifest.hpp"

#include <fstream>

#include "vidgen/image.hpp"

namespace vidgen {

nlohmann::json ManifestEntry::to_json() const {
    nlohmann::json j{{"schema", kManifestSchemaVersion},
                     {"id", id},
                     {"domain", domain},
                     {"locator", locator},
                     {"frame_count", frame_count},
                     {"present_s", present_s},
                     {"present_h", present_h},
                     {"present_n", present_n}};
    if (embedding) j["embedding"] = *embedding;
    return j;
}

ManifestEntry ManifestEntry::from_json(const nlohmann::json& j) {
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    e.domain = j.at("domain").get<std::string>();
    if (e.domain != "real" && e.domain != "synthetic")
        throw std::invalid_argument("manifest: domain must be real|synthetic, got " + e.domain);
    e.locator = j.at("locator").get<std::string>();
    e.frame_count = j.at("frame_count").get<int64_t>();
    if (e.frame_count < 1) throw std::invalid_argument("manifest: frame_count must be >= 1");
    e.present_s = j.value("present_s", true);
    e.present_h = j.value("present_h", true);
    e.present_n = j.value("present_n", true);
    if (j.contains("embedding")) e.embedding = j.at("embedding").get<std::vector<double>>();
    return e;
}

void save_manifest(const std::filesystem::path& path, const Manifest& m) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_manifest: cannot open " + path.string());
    for (const auto& e : m) f << e.to_json().dump() << "\n";
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_manifest: cannot open " + path.string());
    Manifest m;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        m.push_back(ManifestEntry::from_json(nlohmann::json::parse(line)));
    }
    return m;
}

Tensorf load_video(const ManifestEntry& e, const std::vector<int64_t>& frames) {
    return read_video_frames(std::filesystem::path(e.locator) / "video", frames);
}

ControlBundle load_controls(const ManifestEntry& e, const std::vector<int64_t>& frames) {
    ControlBundle b;
    std::filesystem::path root(e.locator);
    b.s_map = read_video_frames(root / "smpl", frames);
    b.face_map = read_video_frames(root / "face", frames);
    b.normal_map = read_video_frames(root / "normal", frames);
    b.present_s = e.present_s;
    b.present_h = e.present_h;
    b.present_n = e.present_n;
    if (!b.present_s) std::fill(b.s_map.data.begin(), b.s_map.data.end(), 0.0f);
    if (!b.present_h) std::fill(b.face_map.data.begin(), b.face_map.data.end(), 0.0f);
    if (!b.present_n) std::fill(b.normal_map.data.begin(), b.normal_map.data.end(), 0.0f);
    return b;
}

Tensorf load_mask_video(const ManifestEntry& e, const std::vector<int64_t>& frames) {
    return read_video_frames(std::filesystem::path(e.locator) / "mask", frames);
}

Tensorf load_background(const ManifestEntry& e) {
    return read_ppm(std::filesystem::path(e.locator) / "background.ppm");
}

}  // namespace vidgen
