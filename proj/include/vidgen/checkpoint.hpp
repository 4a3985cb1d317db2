#ifndef VIDGEN_CHECKPOINT_HPP
#define VIDGEN_CHECKPOINT_HPP

#include <filesystem>

#include "vidgen/model.hpp"
#include "vidgen/schedule.hpp"

namespace vidgen {

// Checkpoint = JSON metadata block + raw float32 tensor directory. Values and
// Adam moments round-trip bit-exactly, so a resumed run continues identically.
struct Checkpoint {
    std::string stage;  // stage1 | stage2 | finetune
    int64_t step = 0;
    uint64_t codec_seed = 0;
    NetConfig net;
    NoiseSchedule schedule;
    nlohmann::json extra;  // free-form provenance (train config, data tags)
};

void save_checkpoint(const std::filesystem::path& path, const Model<float>& model, const Checkpoint& meta);

// metadata only (cheap; skips tensor payloads)
Checkpoint load_checkpoint_meta(const std::filesystem::path& path);

// Rebuilds the model from the stored NetConfig and overwrites every parameter
// (and Adam state when present). Name/shape/tag mismatches throw.
Model<float> load_checkpoint(const std::filesystem::path& path, Checkpoint* meta = nullptr);

}  // namespace vidgen

#endif  // VIDGEN_CHECKPOINT_HPP
