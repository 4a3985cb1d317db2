#ifndef VIDGEN_TESTS_HELPERS_HPP
#define VIDGEN_TESTS_HELPERS_HPP

#include <filesystem>
#include <functional>

#include "vidgen/model.hpp"
#include "vidgen/toydata.hpp"

namespace vidgen::testing {

// ~3k-parameter instance used by the gradient-check and training tests
inline NetConfig tiny_net() {
    NetConfig c;
    c.image_size = 32;
    c.levels = 2;
    c.base_width = 2;
    c.heads = 1;
    c.clip_dim = 3;
    c.cproj_dim = 2;
    c.ffn_hidden = 2;
    c.normal_dim = 4;
    c.time_dim = 4;
    c.temporal_max_len = 4;
    c.pose_width = 2;
    c.normal_width = 2;
    c.motion_levels = {1, 2};
    return c;
}

// slightly wider instance for end-to-end runs (still fast)
inline NetConfig small_net() {
    NetConfig c = tiny_net();
    c.base_width = 4;
    c.heads = 2;
    c.clip_dim = 12;
    c.cproj_dim = 4;
    c.normal_dim = 8;
    c.temporal_max_len = 8;
    return c;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() / ("vidgen_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline Manifest make_dataset(const std::filesystem::path& root, const std::string& domain, int count, int frames,
                             uint64_t seed, int size = 32) {
    ToyDatasetSpec spec;
    spec.count = count;
    spec.frames = frames;
    spec.height = size;
    spec.width = size;
    spec.domain = domain;
    spec.id_prefix = domain;
    return generate_toy_dataset(spec, seed, root);
}

}  // namespace vidgen::testing

#endif
