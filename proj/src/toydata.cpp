#include "vidgen/toydata.hpp"

#include <algorithm>
#include <cmath>

#include "vidgen/image.hpp"

namespace vidgen {

namespace {

struct Vec2 {
    double x, y;
};

struct Figure {
    // identity
    float body_r, body_g, body_b;
    float face_r, face_g, face_b;
    double scale;
    // motion
    double freq, phase, amp, sway;
};

struct Segment {
    Vec2 a, b;
    double radius;
    int part;  // 0 torso, 1 arm, 2 leg, 3 head (disc)
};

std::vector<Segment> pose_at(const Figure& fig, double H, double W, int frame, int total_frames) {
    double t = double(frame) / double(std::max(1, total_frames));
    double swing = fig.amp * std::sin(2.0 * M_PI * (fig.freq * t) + fig.phase);
    double cx = W * 0.5 + fig.sway * W * 0.1 * std::sin(2.0 * M_PI * t);
    double cy = H * 0.45;
    double s = fig.scale * H;

    Vec2 hip{cx, cy + 0.18 * s};
    Vec2 neck{cx, cy - 0.12 * s};
    Vec2 head{cx, cy - 0.24 * s};
    double limb = 0.22 * s, th = 0.035 * s + 1.0;

    std::vector<Segment> segs;
    segs.push_back({neck, hip, th * 1.4, 0});
    double a1 = M_PI / 2 + swing, a2 = M_PI / 2 - swing;
    segs.push_back({neck, {neck.x + limb * std::cos(a1 + 0.5), neck.y + limb * std::sin(a1 + 0.5)}, th, 1});
    segs.push_back({neck, {neck.x - limb * std::cos(a2 + 0.5), neck.y + limb * std::sin(a2 + 0.5)}, th, 1});
    segs.push_back({hip, {hip.x + limb * std::sin(swing * 0.7), hip.y + limb}, th, 2});
    segs.push_back({hip, {hip.x - limb * std::sin(swing * 0.7), hip.y + limb}, th, 2});
    segs.push_back({head, head, 0.09 * s, 3});
    return segs;
}

// distance from p to segment ab, plus the outward offset direction
double seg_distance(const Segment& s, double px, double py, double* ox, double* oy) {
    double vx = s.b.x - s.a.x, vy = s.b.y - s.a.y;
    double len2 = vx * vx + vy * vy;
    double u = len2 > 0 ? ((px - s.a.x) * vx + (py - s.a.y) * vy) / len2 : 0.0;
    u = std::min(1.0, std::max(0.0, u));
    double qx = s.a.x + u * vx, qy = s.a.y + u * vy;
    double dx = px - qx, dy = py - qy;
    double d = std::sqrt(dx * dx + dy * dy);
    if (d > 1e-9) {
        *ox = dx / d;
        *oy = dy / d;
    } else {
        *ox = 0.0;
        *oy = 1.0;
    }
    return d;
}

void put(Tensorf& img, int64_t y, int64_t x, float r, float g, float b) {
    int64_t H = img.dim(1), W = img.dim(2);
    img[(0 * H + y) * W + x] = r;
    img[(1 * H + y) * W + x] = g;
    img[(2 * H + y) * W + x] = b;
}

// cheap deterministic value noise for the "real" background texture
float value_noise(uint64_t seed, int64_t y, int64_t x) {
    uint64_t h = seed ^ (uint64_t(y) * 0x9e3779b97f4a7c15ull) ^ (uint64_t(x) * 0xc2b2ae3d27d4eb4full);
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdull;
    h ^= h >> 33;
    return float(h >> 40) / float(1 << 24);
}

}  // namespace

nlohmann::json ToyDatasetSpec::to_json() const {
    return {{"count", count},   {"frames", frames}, {"height", height},
            {"width", width},   {"domain", domain}, {"id_prefix", id_prefix}};
}

ToyDatasetSpec ToyDatasetSpec::from_json(const nlohmann::json& j) {
    ToyDatasetSpec s;
    s.count = j.value("count", s.count);
    s.frames = j.value("frames", s.frames);
    s.height = j.value("height", s.height);
    s.width = j.value("width", s.width);
    s.domain = j.value("domain", s.domain);
    s.id_prefix = j.value("id_prefix", s.id_prefix);
    if (s.domain != "real" && s.domain != "synthetic")
        throw std::invalid_argument("toy dataset: domain must be real|synthetic");
    return s;
}

Manifest generate_toy_dataset(const ToyDatasetSpec& spec, uint64_t seed, const std::filesystem::path& out_root) {
    if (spec.height <= 0 || spec.width <= 0 || spec.frames < 1)
        throw std::invalid_argument("toy dataset: invalid dims");
    bool real = spec.domain == "real";
    std::string prefix = spec.id_prefix.empty() ? spec.domain : spec.id_prefix;
    Manifest manifest;
    Rng rng(seed);

    for (int vi = 0; vi < spec.count; ++vi) {
        Rng vrng = rng.fork(uint64_t(vi) + 1);
        Figure fig;
        fig.body_r = float(0.2 + 0.7 * vrng.uniform());
        fig.body_g = float(0.2 + 0.7 * vrng.uniform());
        fig.body_b = float(0.2 + 0.7 * vrng.uniform());
        fig.face_r = float(0.5 + 0.5 * vrng.uniform());
        fig.face_g = float(0.4 + 0.4 * vrng.uniform());
        fig.face_b = float(0.3 + 0.4 * vrng.uniform());
        fig.scale = 0.6 + 0.25 * vrng.uniform();
        fig.freq = 1.0 + 2.0 * vrng.uniform();
        fig.phase = 2.0 * M_PI * vrng.uniform();
        fig.amp = 0.3 + 0.5 * vrng.uniform();
        fig.sway = vrng.uniform();
        float bg_r = float(0.2 + 0.6 * vrng.uniform());
        float bg_g = float(0.2 + 0.6 * vrng.uniform());
        float bg_b = float(0.2 + 0.6 * vrng.uniform());
        uint64_t tex_seed = vrng.next_u64();
        uint64_t noise_seed = vrng.next_u64();

        int64_t H = spec.height, W = spec.width, F = spec.frames;

        // static background plate
        Tensorf bg({3, H, W});
        for (int64_t y = 0; y < H; ++y)
            for (int64_t x = 0; x < W; ++x) {
                float shade = 0.7f + 0.3f * float(y) / float(H);
                float tex = real ? 0.25f * (value_noise(tex_seed, y, x) - 0.5f) : 0.0f;
                put(bg, y, x, bg_r * shade + tex, bg_g * shade + tex, bg_b * shade + tex);
            }

        Tensorf video({F, 3, H, W}), smap({F, 3, H, W}), fmap({F, 3, H, W}), nmap({F, 3, H, W});
        Tensorf mask({F, 1, H, W});
        const float part_colors[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};  // torso/arm/leg

        for (int64_t f = 0; f < F; ++f) {
            auto segs = pose_at(fig, double(H), double(W), int(f), int(F));
            Tensorf frame = bg;
            Tensorf sm({3, H, W}), fm({3, H, W}), nm({3, H, W}), mk({1, H, W});
            for (int64_t y = 0; y < H; ++y)
                for (int64_t x = 0; x < W; ++x) {
                    const Segment* hit = nullptr;
                    double q = 2.0, ox = 0, oy = 0;  // q: 0 at axis, 1 at rim
                    for (const auto& s : segs) {
                        double tox, toy;
                        double d = seg_distance(s, double(x) + 0.5, double(y) + 0.5, &tox, &toy);
                        if (d <= s.radius && d / s.radius < q) {
                            q = d / s.radius;
                            ox = tox;
                            oy = toy;
                            hit = &s;
                        }
                    }
                    if (!hit) continue;
                    double nz = std::sqrt(std::max(0.0, 1.0 - q * q));
                    mk[y * W + x] = 1.0f;
                    // analytic tube/sphere normal, remapped to [0,1]
                    nm[(0 * H + y) * W + x] = float(0.5 + 0.5 * ox * q);
                    nm[(1 * H + y) * W + x] = float(0.5 + 0.5 * oy * q);
                    nm[(2 * H + y) * W + x] = float(0.5 + 0.5 * nz);
                    float shade = float(0.45 + 0.55 * nz);
                    if (hit->part == 3) {
                        put(frame, y, x, fig.face_r * shade, fig.face_g * shade, fig.face_b * shade);
                        fm[(0 * H + y) * W + x] = fig.face_r;
                        fm[(1 * H + y) * W + x] = fig.face_g;
                        fm[(2 * H + y) * W + x] = fig.face_b;
                    } else {
                        put(frame, y, x, fig.body_r * shade, fig.body_g * shade, fig.body_b * shade);
                        const float* pc = part_colors[hit->part];
                        sm[(0 * H + y) * W + x] = pc[0];
                        sm[(1 * H + y) * W + x] = pc[1];
                        sm[(2 * H + y) * W + x] = pc[2];
                    }
                }
            if (real) {
                Rng frng = Rng(noise_seed).fork(uint64_t(f) + 1);
                for (auto& v : frame.data) v += float(0.06 * (frng.uniform() - 0.5));
            }
            auto copy_into = [&](Tensorf& dst, const Tensorf& src) {
                std::copy(src.data.begin(), src.data.end(), dst.data.begin() + f * src.numel());
            };
            copy_into(video, frame);
            copy_into(smap, sm);
            copy_into(fmap, fm);
            copy_into(nmap, nm);
            copy_into(mask, mk);
        }

        char idbuf[64];
        std::snprintf(idbuf, sizeof(idbuf), "%s_%04d", prefix.c_str(), vi);
        std::filesystem::path root = out_root / idbuf;
        write_video_frames(root / "video", video);
        write_video_frames(root / "smpl", smap);
        write_video_frames(root / "face", fmap);
        write_video_frames(root / "normal", nmap);
        write_video_frames(root / "mask", mask);
        std::filesystem::create_directories(root);
        write_ppm(root / "background.ppm", bg);

        ManifestEntry e;
        e.id = idbuf;
        e.domain = spec.domain;
        e.locator = root.string();
        e.frame_count = F;
        manifest.push_back(std::move(e));
    }
    return manifest;
}

double pixel_variance_score(const Tensorf& video) {
    int64_t F = video.dim(0), H = video.dim(2), W = video.dim(3);
    // Median of green-channel 3x3 local variances. The median ignores the
    // sparse high-variance windows at figure edges (present in both domains)
    // and responds to the dense sensor-style noise of the "real" domain.
    std::vector<double> vars;
    vars.reserve(size_t(F * (H - 2) * (W - 2)));
    for (int64_t f = 0; f < F; ++f)
        for (int64_t y = 1; y + 1 < H; ++y)
            for (int64_t x = 1; x + 1 < W; ++x) {
                double m = 0, m2 = 0;
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        double v = video[((f * 3 + 1) * H + y + dy) * W + x + dx];
                        m += v;
                        m2 += v * v;
                    }
                m /= 9.0;
                vars.push_back(std::max(0.0, m2 / 9.0 - m * m));
            }
    size_t mid = vars.size() / 2;
    std::nth_element(vars.begin(), vars.begin() + int64_t(mid), vars.end());
    return vars[mid];
}

}  // namespace vidgen
