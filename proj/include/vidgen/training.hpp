#ifndef VIDGEN_TRAINING_HPP
#define VIDGEN_TRAINING_HPP

#include "vidgen/codec.hpp"
#include "vidgen/manifest.hpp"
#include "vidgen/schedule.hpp"

namespace vidgen {

struct TrainConfig {
    int steps = 100;
    double lr_stage1 = 1e-4;
    double lr_stage2 = 5e-5;
    int clip_length = 16;
    int frame_rate = 8;        // dataset fps, recorded for provenance
    double dropout_p = 0.01;   // independent per-modality control dropout (stage 1)
    double shuffle_p = 0.05;   // pose-shuffle augmentation (stage 2)
    int T = 1000;
    double beta_lo = 1e-4;
    double beta_hi = 0.02;
    bool zero_terminal_snr = true;
    double gamma = 5.0;
    uint64_t seed = 0;

    nlohmann::json to_json() const;
    static TrainConfig from_json(const nlohmann::json& j);
};

// per-step scalars, one JSONL row each
struct TrainRecord {
    std::vector<nlohmann::json> rows;
    void save(const std::filesystem::path& path) const;
};

// everything one optimization step consumes, already in image space
struct TrainSample {
    Tensorf video;       // [F,3,H,W]
    ControlBundle controls;
    Tensorf background;  // [3,H,W]
    Tensorf mask;        // [F,1,H,W]
    Tensorf ref_frame;   // [3,H,W]
};

TrainSample load_sample(const ManifestEntry& e, const std::vector<int64_t>& frames, int64_t ref_index);

// pose-shuffle augmentation: permutes the frame axis of every control map in
// place (video/targets untouched); exposed for the permutation-check oracle
void shuffle_controls(ControlBundle& c, Rng& rng);

// reference appearance stand-in for a CLIP image encoder: a flattened RGB
// thumbnail whose side is inferred from clip_dim (= 3*k*k)
Tensorf toy_appearance_embedding(const Tensorf& frame, int clip_dim);

// One end-to-end step: forward through reference bank + guiders + projector +
// denoiser on a single tape, loss = w(SNR(t)) * MSE(v_pred, v_target), Adam
// update restricted by `filter`. Throws on non-finite loss. Returns the loss.
double training_step(Model<float>& model, const LatentCodec& codec, const NoiseSchedule& sch,
                     const WeightConfig& wcfg, const TrainSample& sample, int t, const Tensorf& eps, Mode mode,
                     ParamFilter filter, const AdamConfig& adam, int64_t step_index);

// stage 1: single random frames, 2D mode, all parameters, control dropout
void train_stage1(Model<float>& model, const LatentCodec& codec, const Manifest& data, const TrainConfig& cfg,
                  TrainRecord* record = nullptr);

// stage 2: clip_length windows, 3D mode, temporal parameters only (spatial
// weights stay bit-identical), pose-shuffle augmentation
void train_stage2(Model<float>& model, const LatentCodec& codec, const Manifest& data, const TrainConfig& cfg,
                  TrainRecord* record = nullptr);

// target-specific finetune on synthetic data only; real-domain entries are
// rejected. 0 steps leaves the model untouched.
void finetune(Model<float>& model, const LatentCodec& codec, const Manifest& data, const TrainConfig& cfg,
              TrainRecord* record = nullptr);

// Deterministic DDIM sampling conditioned on an entry's controls, background
// and frame-0 reference; returns a decoded video in [0,1], shape [F,3,H,W].
Tensorf sample_video(Model<float>& model, const LatentCodec& codec, const NoiseSchedule& sch,
                     const ManifestEntry& entry, const std::vector<int64_t>& frames, int steps, uint64_t seed,
                     Mode mode);

}  // namespace vidgen

#endif  // VIDGEN_TRAINING_HPP
