#include "vidgen/training.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "vidgen/image.hpp"

namespace vidgen {

nlohmann::json TrainConfig::to_json() const {
    return {{"steps", steps},
            {"lr_stage1", lr_stage1},
            {"lr_stage2", lr_stage2},
            {"clip_length", clip_length},
            {"frame_rate", frame_rate},
            {"dropout_p", dropout_p},
            {"shuffle_p", shuffle_p},
            {"T", T},
            {"beta_lo", beta_lo},
            {"beta_hi", beta_hi},
            {"zero_terminal_snr", zero_terminal_snr},
            {"gamma", gamma},
            {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    TrainConfig c;
    c.steps = j.value("steps", c.steps);
    c.lr_stage1 = j.value("lr_stage1", c.lr_stage1);
    c.lr_stage2 = j.value("lr_stage2", c.lr_stage2);
    c.clip_length = j.value("clip_length", c.clip_length);
    c.frame_rate = j.value("frame_rate", c.frame_rate);
    c.dropout_p = j.value("dropout_p", c.dropout_p);
    c.shuffle_p = j.value("shuffle_p", c.shuffle_p);
    c.T = j.value("T", c.T);
    c.beta_lo = j.value("beta_lo", c.beta_lo);
    c.beta_hi = j.value("beta_hi", c.beta_hi);
    c.zero_terminal_snr = j.value("zero_terminal_snr", c.zero_terminal_snr);
    c.gamma = j.value("gamma", c.gamma);
    c.seed = j.value("seed", c.seed);
    if (c.steps < 0 || c.clip_length < 1 || c.T < 1) throw std::invalid_argument("train config: bad values");
    return c;
}

void TrainRecord::save(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("train record: cannot open " + path.string());
    for (const auto& row : rows) os << row.dump() << "\n";
}

TrainSample load_sample(const ManifestEntry& e, const std::vector<int64_t>& frames, int64_t ref_index) {
    TrainSample s;
    s.video = load_video(e, frames);
    s.controls = load_controls(e, frames);
    s.background = load_background(e);
    s.mask = load_mask_video(e, frames);
    Tensorf ref = load_video(e, {ref_index});
    s.ref_frame = ref.reshaped({ref.dim(1), ref.dim(2), ref.dim(3)});
    return s;
}

Tensorf toy_appearance_embedding(const Tensorf& frame, int clip_dim) {
    if (clip_dim % 3 != 0) throw std::invalid_argument("appearance embedding: clip_dim must be 3*k*k");
    int k = int(std::lround(std::sqrt(double(clip_dim / 3))));
    if (3 * k * k != clip_dim) throw std::invalid_argument("appearance embedding: clip_dim must be 3*k*k");
    Tensorf thumb = downsample_box(frame, k, k);
    return thumb.reshaped({int64_t(clip_dim)});
}

namespace {

Tensorf tile_latent(const Tensorf& lat, int64_t F) {
    Tensorf out({F, lat.dim(0), lat.dim(1), lat.dim(2)});
    for (int64_t f = 0; f < F; ++f)
        std::copy(lat.data.begin(), lat.data.end(), out.data.begin() + f * lat.numel());
    return out;
}

Tensorf masked_video(const Tensorf& video, const Tensorf& mask) {
    int64_t F = video.dim(0), H = video.dim(2), W = video.dim(3);
    Tensorf out = video;
    for (int64_t f = 0; f < F; ++f)
        for (int64_t c = 0; c < 3; ++c)
            for (int64_t p = 0; p < H * W; ++p) out[(f * 3 + c) * H * W + p] *= mask[f * H * W + p];
    return out;
}

void check_sample_dims(const Model<float>& model, const TrainSample& s) {
    if (s.video.dim(2) != model.cfg.image_size || s.video.dim(3) != model.cfg.image_size)
        throw std::invalid_argument("training: sample resolution does not match network config");
}

}  // namespace

void shuffle_controls(ControlBundle& c, Rng& rng) {
    int64_t F = c.frames();
    std::vector<int64_t> perm(static_cast<size_t>(F), 0);
    std::iota(perm.begin(), perm.end(), int64_t(0));
    for (int64_t i = F - 1; i > 0; --i) {
        int64_t j = int64_t(rng.uniform_int(uint64_t(i + 1)));
        std::swap(perm[size_t(i)], perm[size_t(j)]);
    }
    auto apply = [&](Tensorf& m) {
        Tensorf src = m;
        int64_t stride = m.numel() / F;
        for (int64_t f = 0; f < F; ++f)
            std::copy(src.data.begin() + perm[size_t(f)] * stride, src.data.begin() + (perm[size_t(f)] + 1) * stride,
                      m.data.begin() + f * stride);
    };
    apply(c.s_map);
    apply(c.face_map);
    apply(c.normal_map);
}

double training_step(Model<float>& model, const LatentCodec& codec, const NoiseSchedule& sch,
                     const WeightConfig& wcfg, const TrainSample& sample, int t, const Tensorf& eps, Mode mode,
                     ParamFilter filter, const AdamConfig& adam, int64_t step_index) {
    check_sample_dims(model, sample);
    int64_t F = sample.video.dim(0);
    Tensorf z0 = codec.encode_video(sample.video);
    check_same_shape(z0, eps, "training_step: eps");
    Tensorf z_t = add_noise(z0, eps, sch, t);
    Tensorf vt = v_target(z0, eps, sch, t);
    Tensorf z_bg = tile_latent(codec.encode(sample.background), F);
    Tensorf z_fg = codec.encode_video(masked_video(sample.video, sample.mask));
    CompositeInput comp = assemble_input(z_t, z_bg, z_fg);
    Tensorf ref_lat = codec.encode(sample.ref_frame);
    Tensorf c_clip = toy_appearance_embedding(sample.ref_frame, model.cfg.clip_dim);

    Tape<float> tp;
    Bound<float> p = bind_params(model.params, tp);
    auto bank = model.write_bank_nodes(
        tp, p, tp.input(ref_lat.reshaped({1, ref_lat.dim(0), ref_lat.dim(1), ref_lat.dim(2)})));
    int p_body = model.pose_guide_nodes(tp, p, tp.input(sample.controls.s_map), tp.input(sample.controls.face_map));
    int p_normal = model.normal_guide_nodes(tp, p, tp.input(sample.controls.normal_map));
    int c_proj = model.project_nodes(tp, p, tp.input(c_clip));
    int v_pred = model.main_forward_nodes(tp, p, tp.input(comp.data), bank, c_proj, p_body, p_normal, t, mode);
    double w = loss_weight(snr(sch, t), wcfg);
    int loss = scale(tp, mse(tp, v_pred, tp.input(vt)), float(w));

    double lv = double(tp.val(loss)[0]);
    if (!std::isfinite(lv))
        throw std::runtime_error("training_step: non-finite loss at step " + std::to_string(step_index));
    tp.backward(loss);
    adam_step(model.params, collect_grads(p, tp), step_index, adam, filter);
    return lv;
}

namespace {

enum class Phase { Stage1, Stage2, Finetune };

// Stratified timestep sampler: [1,T] is split into equal strata visited in a
// reshuffled order per block, with uniform jitter inside the stratum. Keeps
// the t-distribution of any window near-uniform, which cuts the variance the
// min-SNR weight otherwise injects into short loss averages.
class TimestepSampler {
public:
    TimestepSampler(int T, int strata) : T_(T), strata_(std::min(strata, T)) {}

    int next(Rng& rng) {
        if (cursor_ == order_.size()) {
            order_.resize(size_t(strata_));
            std::iota(order_.begin(), order_.end(), 0);
            for (size_t i = order_.size(); i > 1; --i)
                std::swap(order_[i - 1], order_[size_t(rng.uniform_int(uint64_t(i)))]);
            cursor_ = 0;
        }
        int s = order_[cursor_++];
        int lo = 1 + int(int64_t(T_) * s / strata_);
        int hi = 1 + int(int64_t(T_) * (s + 1) / strata_);
        return lo + int(rng.uniform_int(uint64_t(hi - lo)));
    }

private:
    int T_, strata_;
    std::vector<int> order_;
    size_t cursor_ = 0;
};

void train_loop(Model<float>& model, const LatentCodec& codec, const Manifest& data, const TrainConfig& cfg,
                TrainRecord* record, Phase phase) {
    const char* name = phase == Phase::Stage1 ? "stage1" : (phase == Phase::Stage2 ? "stage2" : "finetune");
    if (cfg.steps == 0) return;
    if (data.empty()) throw std::invalid_argument(std::string(name) + ": empty dataset");
    NoiseSchedule sch = make_schedule(cfg.T, cfg.beta_lo, cfg.beta_hi, cfg.zero_terminal_snr);
    WeightConfig wcfg{cfg.gamma};
    AdamConfig adam;
    adam.lr = phase == Phase::Stage1 ? cfg.lr_stage1 : cfg.lr_stage2;
    ParamFilter filter = phase == Phase::Stage2 ? ParamFilter::TemporalOnly : ParamFilter::All;
    Mode mode = phase == Phase::Stage1 ? Mode::Image2D : Mode::Video3D;
    Rng rng(cfg.seed ^ hash_str(name));
    TimestepSampler tsampler(cfg.T, 25);

    for (int64_t step = 1; step <= cfg.steps; ++step) {
        const ManifestEntry& e = data[size_t(rng.uniform_int(uint64_t(data.size())))];
        std::vector<int64_t> frames;
        if (phase == Phase::Stage1) {
            frames = {int64_t(rng.uniform_int(uint64_t(e.frame_count)))};
        } else {
            int64_t len = std::min<int64_t>(cfg.clip_length, e.frame_count);
            int64_t start = int64_t(rng.uniform_int(uint64_t(e.frame_count - len + 1)));
            frames.resize(size_t(len));
            std::iota(frames.begin(), frames.end(), start);
        }
        int64_t ref = int64_t(rng.uniform_int(uint64_t(e.frame_count)));
        TrainSample sample = load_sample(e, frames, ref);
        bool shuffled = false;
        if (phase == Phase::Stage1) sample.controls = drop_controls(sample.controls, rng, cfg.dropout_p);
        if (phase == Phase::Stage2 && rng.uniform() < cfg.shuffle_p) {
            shuffle_controls(sample.controls, rng);
            shuffled = true;
        }

        int t = tsampler.next(rng);
        int64_t lat = model.cfg.latent_size();
        Tensorf eps = Tensorf::randn({int64_t(frames.size()), 4, lat, lat}, rng, 1.0f);
        double loss = training_step(model, codec, sch, wcfg, sample, t, eps, mode, filter, adam, step);
        if (record)
            record->rows.push_back(
                {{"phase", name}, {"step", step}, {"id", e.id}, {"t", t}, {"loss", loss}, {"shuffled", shuffled}});
    }
}

}  // namespace

void train_stage1(Model<float>& model, const LatentCodec& codec, const Manifest& data, const TrainConfig& cfg,
                  TrainRecord* record) {
    train_loop(model, codec, data, cfg, record, Phase::Stage1);
}

void train_stage2(Model<float>& model, const LatentCodec& codec, const Manifest& data, const TrainConfig& cfg,
                  TrainRecord* record) {
    train_loop(model, codec, data, cfg, record, Phase::Stage2);
}

void finetune(Model<float>& model, const LatentCodec& codec, const Manifest& data, const TrainConfig& cfg,
              TrainRecord* record) {
    for (const auto& e : data)
        if (e.domain != "synthetic")
            throw std::invalid_argument("finetune: real-domain entry " + e.id + " in finetune set");
    if (cfg.steps == 0) return;  // identity by contract
    train_loop(model, codec, data, cfg, record, Phase::Finetune);
}

Tensorf sample_video(Model<float>& model, const LatentCodec& codec, const NoiseSchedule& sch,
                     const ManifestEntry& entry, const std::vector<int64_t>& frames, int steps, uint64_t seed,
                     Mode mode) {
    TrainSample s = load_sample(entry, frames, /*ref_index=*/0);
    check_sample_dims(model, s);
    int64_t F = s.video.dim(0);
    if (mode == Mode::Image2D && F > 1) {
        // 2D model: run the sampler frame by frame
        int64_t H = s.video.dim(2), W = s.video.dim(3);
        Tensorf out({F, 3, H, W});
        for (int64_t f = 0; f < F; ++f) {
            Tensorf one = sample_video(model, codec, sch, entry, {frames[size_t(f)]}, steps,
                                       seed ^ (0x9e3779b97f4a7c15ull * uint64_t(f + 1)), mode);
            std::copy(one.data.begin(), one.data.end(), out.data.begin() + f * 3 * H * W);
        }
        return out;
    }

    MemoryBank<float> bank = model.reference_write(codec.encode(s.ref_frame));
    GuidanceSignals sig;
    sig.p_body = model.pose_guide(s.controls.s_map, s.controls.face_map);
    sig.p_normal = model.normal_guide(s.controls.normal_map);
    Tensorf c_proj = model.project_appearance(toy_appearance_embedding(s.ref_frame, model.cfg.clip_dim));
    Tensorf z_bg = tile_latent(codec.encode(s.background), F);
    Tensorf z_fg = codec.encode_video(masked_video(s.video, s.mask));

    Rng rng(seed ^ hash_str("sample"));
    int64_t lat = model.cfg.latent_size();
    Tensorf z = Tensorf::randn({F, 4, lat, lat}, rng, 1.0f);
    std::vector<int> ts = ddim_timesteps(sch.T, steps);
    for (size_t k = 0; k + 1 < ts.size(); ++k) {
        CompositeInput comp = assemble_input(z, z_bg, z_fg);
        Tensorf v = model.denoise(comp, bank, c_proj, sig, ts[k], mode);
        z = ddim_step_v(z, v, sch, ts[k], ts[k + 1]);
    }
    Tensorf video = codec.decode_video(z);
    for (auto& v : video.data) v = std::min(1.0f, std::max(0.0f, v));
    return video;
}

}  // namespace vidgen
