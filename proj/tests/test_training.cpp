#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "vidgen/checkpoint.hpp"
#include "vidgen/training.hpp"

using namespace vidgen;
using vidgen::testing::TempDir;
using vidgen::testing::make_dataset;
using vidgen::testing::tiny_net;

namespace {

TrainConfig fast_cfg(int steps, uint64_t seed) {
    TrainConfig c;
    c.steps = steps;
    c.T = 50;
    c.clip_length = 4;
    c.seed = seed;
    return c;
}

}  // namespace

TEST_CASE("training is seed-deterministic per step") {
    TempDir dir("train_det");
    Manifest m = make_dataset(dir.path() / "d", "real", 2, 4, 3);
    LatentCodec codec(1);
    TrainRecord r1, r2;
    Model<float> a(tiny_net(), 7), b(tiny_net(), 7);
    train_stage1(a, codec, m, fast_cfg(5, 9), &r1);
    train_stage1(b, codec, m, fast_cfg(5, 9), &r2);
    REQUIRE(r1.rows.size() == r2.rows.size());
    for (size_t i = 0; i < r1.rows.size(); ++i)
        CHECK(std::abs(r1.rows[i].at("loss").get<double>() - r2.rows[i].at("loss").get<double>()) < 1e-5);
    for (const auto& [name, e] : a.params.entries)
        for (int64_t i = 0; i < e.value.numel(); ++i) CHECK(e.value[i] == b.params.at(name)[i]);
}

TEST_CASE("stage-2 freeze is bit-exact on the spatial partition") {
    TempDir dir("freeze");
    Manifest m = make_dataset(dir.path() / "d", "real", 2, 4, 5);
    LatentCodec codec(1);
    Model<float> model(tiny_net(), 11);
    train_stage1(model, codec, m, fast_cfg(3, 1));
    // snapshot = the stage-1 checkpoint
    std::map<std::string, Tensorf> snap;
    for (const auto& [name, e] : model.params.entries) snap[name] = e.value;
    train_stage2(model, codec, m, fast_cfg(10, 2));
    bool temporal_changed = false;
    for (const auto& [name, e] : model.params.entries) {
        if (e.temporal) {
            for (int64_t i = 0; i < e.value.numel(); ++i)
                temporal_changed = temporal_changed || e.value[i] != snap[name][i];
        } else {
            for (int64_t i = 0; i < e.value.numel(); ++i) CHECK(e.value[i] == snap[name][i]);
        }
    }
    CHECK(temporal_changed);
}

TEST_CASE("zero-SNR terminal draw gives zero loss regardless of prediction") {
    TempDir dir("zerosnr");
    Manifest m = make_dataset(dir.path() / "d", "real", 1, 2, 7);
    LatentCodec codec(1);
    Model<float> model(tiny_net(), 3);
    NoiseSchedule sch = make_schedule(50, 1e-4, 0.02, true);
    std::vector<int64_t> frames = {0};
    TrainSample s = load_sample(m[0], frames, 0);
    Rng rng(1);
    Tensorf eps = Tensorf::randn({1, 4, 4, 4}, rng, 1.0f);
    double loss = training_step(model, codec, sch, {}, s, 50, eps, Mode::Image2D, ParamFilter::All, {}, 1);
    CHECK(loss == 0.0);
}

TEST_CASE("shuffle_controls permutes maps only, preserving the frame multiset") {
    TempDir dir("shuffle");
    Manifest m = make_dataset(dir.path() / "d", "real", 1, 6, 9);
    std::vector<int64_t> frames(6);
    std::iota(frames.begin(), frames.end(), 0);
    TrainSample s = load_sample(m[0], frames, 0);
    ControlBundle orig = s.controls;
    Rng rng(4);
    shuffle_controls(s.controls, rng);
    // per-frame slices of the shuffled map form a permutation of the originals
    int64_t stride = orig.s_map.numel() / 6;
    std::vector<bool> used(6, false);
    int matches = 0;
    for (int64_t f = 0; f < 6; ++f) {
        for (int64_t g = 0; g < 6; ++g) {
            if (used[size_t(g)]) continue;
            bool eq = true;
            for (int64_t i = 0; i < stride && eq; ++i)
                eq = s.controls.s_map[f * stride + i] == orig.s_map[g * stride + i];
            if (eq) {
                used[size_t(g)] = true;
                ++matches;
                break;
            }
        }
    }
    CHECK(matches == 6);
    // video frames untouched by the augmentation
    for (int64_t i = 0; i < s.video.numel(); ++i) CHECK(s.video[i] == load_sample(m[0], frames, 0).video[i]);
}

TEST_CASE("finetune guards: real entries rejected, zero steps is the identity") {
    TempDir dir("ft");
    Manifest real = make_dataset(dir.path() / "r", "real", 1, 2, 1);
    Manifest synth = make_dataset(dir.path() / "s", "synthetic", 1, 2, 2);
    LatentCodec codec(1);
    Model<float> model(tiny_net(), 5);
    CHECK_THROWS_AS(finetune(model, codec, real, fast_cfg(1, 1)), std::invalid_argument);

    std::map<std::string, Tensorf> snap;
    for (const auto& [name, e] : model.params.entries) snap[name] = e.value;
    finetune(model, codec, synth, fast_cfg(0, 1));
    for (const auto& [name, e] : model.params.entries)
        for (int64_t i = 0; i < e.value.numel(); ++i) CHECK(e.value[i] == snap[name][i]);
    // nonzero steps do train
    finetune(model, codec, synth, fast_cfg(2, 1));
    bool changed = false;
    for (const auto& [name, e] : model.params.entries)
        for (int64_t i = 0; i < e.value.numel(); ++i) changed = changed || e.value[i] != snap[name][i];
    CHECK(changed);
}

TEST_CASE("sampling: determinism, degenerate step count, 2D fallback") {
    TempDir dir("samp");
    Manifest m = make_dataset(dir.path() / "d", "real", 1, 3, 13);
    LatentCodec codec(1);
    Model<float> model(tiny_net(), 17);
    NoiseSchedule sch = make_schedule(50, 1e-4, 0.02, true);
    Tensorf a = sample_video(model, codec, sch, m[0], {0, 1, 2}, 5, 77, Mode::Video3D);
    Tensorf b = sample_video(model, codec, sch, m[0], {0, 1, 2}, 5, 77, Mode::Video3D);
    CHECK(a.shape == std::vector<int64_t>({3, 3, 32, 32}));
    for (int64_t i = 0; i < a.numel(); ++i) CHECK(a[i] == b[i]);
    for (int64_t i = 0; i < a.numel(); ++i) {
        CHECK(a[i] >= 0.0f);
        CHECK(a[i] <= 1.0f);
    }
    Tensorf c = sample_video(model, codec, sch, m[0], {0}, 1, 5, Mode::Video3D);  // single jump to x0-hat
    for (int64_t i = 0; i < c.numel(); ++i) CHECK(std::isfinite(c[i]));
    Tensorf d = sample_video(model, codec, sch, m[0], {0, 1}, 3, 9, Mode::Image2D);  // frame-by-frame path
    CHECK(d.dim(0) == 2);
}

TEST_CASE("toy appearance embedding shape and content") {
    Tensorf frame = Tensorf::full({3, 32, 32}, 0.25f);
    Tensorf e = toy_appearance_embedding(frame, 12);
    CHECK(e.shape == std::vector<int64_t>({12}));
    for (int64_t i = 0; i < 12; ++i) CHECK(e[i] == doctest::Approx(0.25f));
    CHECK_THROWS(toy_appearance_embedding(frame, 13));
}

TEST_CASE("checkpoint round-trips values, tags and Adam state bit-exactly") {
    TempDir dir("ckpt");
    Manifest m = make_dataset(dir.path() / "d", "real", 1, 2, 19);
    LatentCodec codec(9);
    Model<float> model(tiny_net(), 23);
    train_stage1(model, codec, m, fast_cfg(2, 3));  // populates Adam moments

    Checkpoint meta;
    meta.stage = "stage1";
    meta.step = 2;
    meta.codec_seed = 9;
    meta.net = model.cfg;
    meta.schedule = make_schedule(50, 1e-4, 0.02, true);
    meta.extra = {{"note", "roundtrip"}};
    save_checkpoint(dir.path() / "m.ckpt", model, meta);

    Checkpoint meta2;
    Model<float> loaded = load_checkpoint(dir.path() / "m.ckpt", &meta2);
    CHECK(meta2.stage == "stage1");
    CHECK(meta2.step == 2);
    CHECK(meta2.codec_seed == 9);
    CHECK(meta2.extra.at("note") == "roundtrip");
    CHECK(meta2.schedule.abar(50) == 0.0);
    for (const auto& [name, e] : model.params.entries) {
        const auto& l = loaded.params.entries.at(name);
        CHECK(l.temporal == e.temporal);
        for (int64_t i = 0; i < e.value.numel(); ++i) CHECK(l.value[i] == e.value[i]);
        REQUIRE(l.m.numel() == e.m.numel());
        for (int64_t i = 0; i < e.m.numel(); ++i) {
            CHECK(l.m[i] == e.m[i]);
            CHECK(l.v[i] == e.v[i]);
        }
    }
    // resumed training continues identically
    Model<float> again = load_checkpoint(dir.path() / "m.ckpt");
    TrainRecord ra, rb;
    train_stage2(model, codec, m, fast_cfg(2, 4), &ra);
    train_stage2(again, codec, m, fast_cfg(2, 4), &rb);
    for (size_t i = 0; i < ra.rows.size(); ++i)
        CHECK(ra.rows[i].at("loss").get<double>() == rb.rows[i].at("loss").get<double>());
    CHECK_THROWS(load_checkpoint(dir.path() / "missing.ckpt"));
}

TEST_CASE("training rejects empty datasets and mismatched resolution") {
    LatentCodec codec(1);
    Model<float> model(tiny_net(), 1);
    CHECK_THROWS(train_stage1(model, codec, Manifest{}, fast_cfg(1, 1)));
    TempDir dir("baddims");
    Manifest m = make_dataset(dir.path() / "d", "real", 1, 2, 1, /*size=*/64);
    CHECK_THROWS(train_stage1(model, codec, m, fast_cfg(1, 1)));
}
