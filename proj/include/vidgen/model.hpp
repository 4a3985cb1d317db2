#ifndef VIDGEN_MODEL_HPP
#define VIDGEN_MODEL_HPP

#include <map>
#include <nlohmann/json.hpp>
#include <string>

#include "vidgen/nn.hpp"

namespace vidgen {

enum class Mode { Image2D, Video3D };

struct NetConfig {
    int image_size = 64;
    int levels = 3;
    int base_width = 32;
    int heads = 8;
    int clip_dim = 48;  // toy appearance embedding: 4x4 RGB thumbnail
    int cproj_dim = 32;
    int ffn_hidden = 32;
    int normal_dim = 512;
    int time_dim = 16;
    int temporal_max_len = 32;
    int pose_width = 16;
    int normal_width = 8;
    // downsample factors at which motion modules are inserted; factors deeper
    // than the network has levels share the bottleneck
    std::vector<int> motion_levels = {1, 2, 4, 8};

    int latent_size() const { return image_size / 8; }
    int width(int level) const { return base_width << level; }

    nlohmann::json to_json() const;
    static NetConfig from_json(const nlohmann::json& j);
};

// per-frame body map S, face map (the paper's H), normal map N, plus
// presence flags; dropped modalities are all-zeros with flag false
struct ControlBundle {
    Tensorf s_map;       // [F,3,H,W]
    Tensorf face_map;    // [F,3,H,W]
    Tensorf normal_map;  // [F,3,H,W]
    bool present_s = true;
    bool present_h = true;
    bool present_n = true;

    int64_t frames() const { return s_map.dim(0); }
};

// each of the three modalities independently zeroed with probability p_each
inline ControlBundle drop_controls(const ControlBundle& bundle, Rng& rng, double p_each = 0.01) {
    if (p_each < 0.0 || p_each > 1.0) throw std::invalid_argument("drop_controls: p out of [0,1]");
    ControlBundle out = bundle;
    if (rng.uniform() < p_each) {
        std::fill(out.s_map.data.begin(), out.s_map.data.end(), 0.0f);
        out.present_s = false;
    }
    if (rng.uniform() < p_each) {
        std::fill(out.face_map.data.begin(), out.face_map.data.end(), 0.0f);
        out.present_h = false;
    }
    if (rng.uniform() < p_each) {
        std::fill(out.normal_map.data.begin(), out.normal_map.data.end(), 0.0f);
        out.present_n = false;
    }
    return out;
}

// write-once per-block K/V store from the reference pass
template <class S>
struct MemoryBank {
    struct KV {
        Tensor<S> k;  // tokens x d
        Tensor<S> v;
    };
    std::map<std::string, KV> blocks;

    const KV& at(const std::string& id) const {
        auto it = blocks.find(id);
        if (it == blocks.end()) throw std::out_of_range("memory bank: missing block " + id);
        return it->second;
    }
};

// softmax(Q K_ref^T / sqrt(d)) V_ref
template <class S>
Tensor<S> reference_read(const Tensor<S>& q, const MemoryBank<S>& bank, const std::string& block_id) {
    const auto& kv = bank.at(block_id);
    if (q.ndim() != 2 || kv.k.ndim() != 2 || q.dim(1) != kv.k.dim(1))
        throw std::invalid_argument("reference_read: head dimension mismatch");
    int64_t tq = q.dim(0), tk = kv.k.dim(0), d = q.dim(1);
    Tensor<S> out({tq, kv.v.dim(1)});
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> scores =
        q.mat(tq, d) * kv.k.mat(tk, d).transpose() / S(std::sqrt(double(d)));
    for (int64_t r = 0; r < tq; ++r) {
        S mx = scores.row(r).maxCoeff();
        Eigen::Array<S, 1, Eigen::Dynamic> e = (scores.row(r).array() - mx).exp();
        e /= e.sum();
        out.mat(tq, kv.v.dim(1)).row(r) = e.matrix() * kv.v.mat(tk, kv.v.dim(1));
    }
    return out;
}

struct GuidanceSignals {
    Tensorf p_body;    // [F, base_width, h, w]
    Tensorf p_normal;  // [F, 1, normal_dim]
};

// channels [0..3] noisy latent, [4..7] background latent, [8..11] fg-mask latent
struct CompositeInput {
    Tensorf data;  // [F,12,h,w]
};

inline CompositeInput assemble_input(const Tensorf& z_t, const Tensorf& z_bg, const Tensorf& z_fg) {
    check_same_shape(z_t, z_bg, "assemble_input");
    check_same_shape(z_t, z_fg, "assemble_input");
    int64_t F = z_t.dim(0), C = z_t.dim(1), hw = z_t.dim(2) * z_t.dim(3);
    CompositeInput ci{Tensorf({F, 3 * C, z_t.dim(2), z_t.dim(3)})};
    for (int64_t f = 0; f < F; ++f)
        for (int64_t c = 0; c < C; ++c)
            for (int64_t p = 0; p < hw; ++p) {
                ci.data[(f * 3 * C + c) * hw + p] = z_t[(f * C + c) * hw + p];
                ci.data[(f * 3 * C + C + c) * hw + p] = z_bg[(f * C + c) * hw + p];
                ci.data[(f * 3 * C + 2 * C + c) * hw + p] = z_fg[(f * C + c) * hw + p];
            }
    return ci;
}

inline std::vector<double> sinusoidal_embedding(double t_norm, int dim) {
    std::vector<double> e(static_cast<size_t>(dim), 0.0);
    for (int i = 0; i < dim / 2; ++i) {
        double freq = std::pow(10000.0, -2.0 * double(i) / double(dim));
        e[size_t(2 * i)] = std::sin(t_norm * 1000.0 * freq);
        e[size_t(2 * i + 1)] = std::cos(t_norm * 1000.0 * freq);
    }
    return e;
}

// The conditioned denoiser plus its companion reference encoder, pose/normal
// guiders and appearance projector. All parameters live in one store; the
// spatial/temporal tag partition is exact and disjoint.
template <class S>
class Model {
public:
    NetConfig cfg;
    ParamStore<S> params;

    Model(const NetConfig& c, uint64_t seed) : cfg(c) {
        params.init_seed = seed;
        register_params();
    }

    // number of motion modules mapped to each level (deep factors clamp to bottleneck)
    int temporal_count(int level) const {
        int n = 0;
        for (int f : cfg.motion_levels) {
            int lv = 0;
            while ((1 << lv) < f) ++lv;
            if (lv > cfg.levels - 1) lv = cfg.levels - 1;
            if (lv == level) ++n;
        }
        return n;
    }

    // ---- graph builders (train + inference share these) ----

    // reference pass at timestep 0; returns per-block token nodes [1,HW,C]
    std::map<std::string, int> write_bank_nodes(Tape<S>& tp, const Bound<S>& p, int ref_latent) const {
        std::map<std::string, int> bank;
        int h = conv2d(tp, ref_latent, p("ref.conv_in.w"), p("ref.conv_in.b"), 1, 1);
        h = silu(tp, h);
        std::vector<int> skips;
        for (int l = 0; l < cfg.levels - 1; ++l) {
            std::string pre = "ref.enc" + std::to_string(l);
            h = silu(tp, conv2d(tp, h, p(pre + ".conv.w"), p(pre + ".conv.b"), 1, 1));
            int tok = spatial_tokens(tp, h);
            tok = add(tp, tok, mha(tp, p, pre + ".spatial", tok, tok, cfg.heads));
            bank["enc" + std::to_string(l)] = tok;
            h = spatial_tokens_to_map(tp, tok, tp.val(h).dim(2), tp.val(h).dim(3));
            skips.push_back(h);
            h = silu(tp, conv2d(tp, h, p("ref.down" + std::to_string(l) + ".w"),
                                p("ref.down" + std::to_string(l) + ".b"), 2, 1));
        }
        h = silu(tp, conv2d(tp, h, p("ref.bot.conv.w"), p("ref.bot.conv.b"), 1, 1));
        {
            int tok = spatial_tokens(tp, h);
            tok = add(tp, tok, mha(tp, p, "ref.bot.spatial", tok, tok, cfg.heads));
            bank["bot"] = tok;
            h = spatial_tokens_to_map(tp, tok, tp.val(h).dim(2), tp.val(h).dim(3));
        }
        for (int l = cfg.levels - 2; l >= 0; --l) {
            std::string pre = "ref.dec" + std::to_string(l);
            h = upsample_nearest2x(tp, h);
            h = silu(tp, conv2d(tp, h, p("ref.up" + std::to_string(l) + ".w"),
                                p("ref.up" + std::to_string(l) + ".b"), 1, 1));
            h = add(tp, h, skips[size_t(l)]);
            h = silu(tp, conv2d(tp, h, p(pre + ".conv.w"), p(pre + ".conv.b"), 1, 1));
            bank["dec" + std::to_string(l)] = spatial_tokens(tp, h);
        }
        return bank;
    }

    // g = sigmoid(Conv([S,H])) applied at latent resolution; p_body = g * Backbone([S,H])
    int pose_guide_nodes(Tape<S>& tp, const Bound<S>& p, int s_map, int face_map) const {
        if (tp.val(s_map).dim(0) != tp.val(face_map).dim(0))
            throw std::invalid_argument("pose_guide: frame-count mismatch");
        int x = concat_channels(tp, s_map, face_map);
        int b = silu(tp, conv2d(tp, x, p("pg.back0.w"), p("pg.back0.b"), 2, 1));
        b = silu(tp, conv2d(tp, b, p("pg.back1.w"), p("pg.back1.b"), 2, 1));
        b = conv2d(tp, b, p("pg.back2.w"), p("pg.back2.b"), 2, 1);
        int g = sigmoid(tp, conv2d(tp, x, p("pg.gate.w"), p("pg.gate.b"), 8, 0));
        return mul(tp, g, b);
    }

    // per-frame compact descriptor: Linear(Flatten(Backbone(N))) in R^{1 x normal_dim}
    int normal_guide_nodes(Tape<S>& tp, const Bound<S>& p, int n_map) const {
        const Tensor<S>& N = tp.val(n_map);
        if (N.dim(2) <= 0 || N.dim(3) <= 0) throw std::invalid_argument("normal_guide: nonpositive spatial dims");
        int64_t F = N.dim(0);
        int h = n_map;
        for (int k = 0; k < normal_backbone_depth(); ++k) {
            std::string pre = "ng.back" + std::to_string(k);
            h = silu(tp, conv2d(tp, h, p(pre + ".w"), p(pre + ".b"), 2, 1));
        }
        int64_t flat = tp.val(h).numel() / F;
        h = reshape(tp, h, {F, flat});
        h = linear(tp, h, p("ng.fc.w"), p("ng.fc.b"));
        return reshape(tp, h, {F, 1, int64_t(cfg.normal_dim)});
    }

    // c_proj = FFN_GEGLU(c_clip) + W c_clip
    int project_nodes(Tape<S>& tp, const Bound<S>& p, int c_clip) const {
        if (tp.val(c_clip).numel() != cfg.clip_dim)
            throw std::invalid_argument("project_appearance: clip dim mismatch");
        int x = reshape(tp, c_clip, {1, int64_t(cfg.clip_dim)});
        int u = linear(tp, x, p("proj.ffn1.w"), p("proj.ffn1.b"));  // [1, 2*ffn]
        int u4 = reshape(tp, u, {1, int64_t(2 * cfg.ffn_hidden), 1, 1});
        int a = slice_channels(tp, u4, 0, cfg.ffn_hidden);
        int b = slice_channels(tp, u4, cfg.ffn_hidden, 2 * cfg.ffn_hidden);
        int gated = mul(tp, a, gelu(tp, b));
        gated = reshape(tp, gated, {1, int64_t(cfg.ffn_hidden)});
        int ffn = linear(tp, gated, p("proj.ffn2.w"), p("proj.ffn2.b"));
        int skip = linear(tp, x, p("proj.skip.w"), p("proj.skip.b"));
        return reshape(tp, add(tp, ffn, skip), {int64_t(cfg.cproj_dim)});
    }

    // main denoiser; composite [F,12,h,w], bank nodes [1,HW_l,C_l],
    // c_proj [cproj], p_body [F,w0,h,w], p_normal [F,1,normal_dim]
    int main_forward_nodes(Tape<S>& tp, const Bound<S>& p, int composite, const std::map<std::string, int>& bank,
                           int c_proj, int p_body, int p_normal, int t, Mode mode) const {
        const Tensor<S>& X = tp.val(composite);
        int64_t F = X.dim(0);
        if (X.dim(1) != 12) throw std::invalid_argument("denoise: expected 12-channel composite input");
        if (mode == Mode::Image2D && F != 1) throw std::invalid_argument("denoise: 2D mode requires F=1");
        if (F > cfg.temporal_max_len)
            throw std::invalid_argument("denoise: F exceeds temporal position-encoding max length");

        auto t_emb = sinusoidal_embedding(double(t) / 1000.0, cfg.time_dim);
        Tensor<S> temb({int64_t(cfg.time_dim)});
        for (int i = 0; i < cfg.time_dim; ++i) temb[i] = S(t_emb[size_t(i)]);
        int temb_node = tp.input(temb.reshaped({1, int64_t(cfg.time_dim)}));

        int cproj_tok = reshape(tp, c_proj, {1, 1, int64_t(cfg.cproj_dim)});
        int pn_tok = reshape(tp, p_normal, {1, F, int64_t(cfg.normal_dim)});

        int h = silu(tp, conv2d(tp, composite, p("main.conv_in.w"), p("main.conv_in.b"), 1, 1));
        std::vector<int> skips;
        for (int l = 0; l < cfg.levels - 1; ++l) {
            std::string pre = "main.enc" + std::to_string(l);
            h = block(tp, p, pre, h, bank_at(bank, "enc" + std::to_string(l)), cproj_tok, pn_tok, temb_node,
                      l == 0 ? p_body : -1, mode, temporal_count(l));
            skips.push_back(h);
            h = silu(tp, conv2d(tp, h, p("main.down" + std::to_string(l) + ".w"),
                                p("main.down" + std::to_string(l) + ".b"), 2, 1));
        }
        h = block(tp, p, "main.bot", h, bank_at(bank, "bot"), cproj_tok, pn_tok, temb_node, -1, mode,
                  temporal_count(cfg.levels - 1));
        for (int l = cfg.levels - 2; l >= 0; --l) {
            std::string pre = "main.dec" + std::to_string(l);
            h = upsample_nearest2x(tp, h);
            h = silu(tp, conv2d(tp, h, p("main.up" + std::to_string(l) + ".w"),
                                p("main.up" + std::to_string(l) + ".b"), 1, 1));
            h = add(tp, h, skips[size_t(l)]);
            h = silu(tp, conv2d(tp, h, p(pre + ".conv.w"), p(pre + ".conv.b"), 1, 1));
            int tok = spatial_tokens(tp, h);
            tok = add(tp, tok, mha(tp, p, pre + ".ref", tok, bank_at(bank, "dec" + std::to_string(l)), cfg.heads));
            h = spatial_tokens_to_map(tp, tok, tp.val(h).dim(2), tp.val(h).dim(3));
        }
        return conv2d(tp, h, p("main.conv_out.w"), p("main.conv_out.b"), 1, 1);
    }

    // ---- value-level API (fresh tape, gradients discarded) ----

    MemoryBank<S> reference_write(const Tensor<S>& ref_latent) {
        if (ref_latent.ndim() != 3 || ref_latent.dim(0) != 4 || ref_latent.dim(1) != cfg.latent_size() ||
            ref_latent.dim(2) != cfg.latent_size())
            throw std::invalid_argument("reference_write: latent shape mismatch with network config");
        Tape<S> tp;
        Bound<S> p = bind_params(params, tp);
        int node = tp.input(ref_latent.reshaped({1, 4, ref_latent.dim(1), ref_latent.dim(2)}));
        auto bank_nodes = write_bank_nodes(tp, p, node);
        MemoryBank<S> bank;
        for (auto& [id, n] : bank_nodes) {
            const Tensor<S>& tok = tp.val(n);
            Tensor<S> flat = tok.reshaped({tok.dim(1), tok.dim(2)});
            bank.blocks[id] = {flat, flat};
        }
        return bank;
    }

    Tensor<S> pose_guide(const Tensor<S>& s_map, const Tensor<S>& face_map) {
        Tape<S> tp;
        Bound<S> p = bind_params(params, tp);
        int out = pose_guide_nodes(tp, p, tp.input(s_map), tp.input(face_map));
        return tp.val(out);
    }

    Tensor<S> normal_guide(const Tensor<S>& n_map) {
        Tape<S> tp;
        Bound<S> p = bind_params(params, tp);
        int out = normal_guide_nodes(tp, p, tp.input(n_map));
        return tp.val(out);
    }

    Tensor<S> project_appearance(const Tensor<S>& c_clip) {
        Tape<S> tp;
        Bound<S> p = bind_params(params, tp);
        int out = project_nodes(tp, p, tp.input(c_clip));
        return tp.val(out);
    }

    Tensor<S> denoise(const CompositeInput& input, const MemoryBank<S>& bank, const Tensor<S>& c_proj,
                      const GuidanceSignals& signals, int t, Mode mode) {
        Tape<S> tp;
        Bound<S> p = bind_params(params, tp);
        std::map<std::string, int> bank_nodes;
        for (const auto& [id, kv] : bank.blocks)
            bank_nodes[id] = tp.input(kv.k.reshaped({1, kv.k.dim(0), kv.k.dim(1)}));
        int out = main_forward_nodes(tp, p, tp.input(input.data), bank_nodes, tp.input(c_proj),
                                     tp.input(signals.p_body), tp.input(signals.p_normal), t, mode);
        return tp.val(out);
    }

    int normal_backbone_depth() const {
        int depth = 0, s = cfg.image_size;
        while (s > 4) {
            s /= 2;
            ++depth;
        }
        return depth;
    }

private:
    static int bank_at(const std::map<std::string, int>& bank, const std::string& id) {
        auto it = bank.find(id);
        if (it == bank.end()) throw std::out_of_range("denoise: missing bank entry " + id);
        return it->second;
    }

    // conv -> time bias -> (+p_body at latent res) -> reference read -> c_proj
    // cross-attn -> normal injection -> spatial attn -> temporal attn (3D)
    int block(Tape<S>& tp, const Bound<S>& p, const std::string& pre, int h, int bank_tok, int cproj_tok,
              int pn_tok, int temb, int p_body, Mode mode, int n_temporal) const {
        h = silu(tp, conv2d(tp, h, p(pre + ".conv.w"), p(pre + ".conv.b"), 1, 1));
        int tb = linear(tp, temb, p(pre + ".time.w"), p(pre + ".time.b"));
        h = add_channel_bias(tp, h, reshape(tp, tb, {tp.val(tb).dim(1)}));
        if (p_body >= 0) h = add(tp, h, p_body);
        int64_t H = tp.val(h).dim(2), W = tp.val(h).dim(3);
        int tok = spatial_tokens(tp, h);
        tok = add(tp, tok, mha(tp, p, pre + ".ref", tok, bank_tok, cfg.heads));
        tok = add(tp, tok, mha(tp, p, pre + ".cross", tok, cproj_tok, cfg.heads));
        h = spatial_tokens_to_map(tp, tok, H, W);
        {
            int ttok = temporal_tokens(tp, h);
            ttok = add(tp, ttok, mha(tp, p, pre + ".normal", ttok, pn_tok, cfg.heads));
            h = temporal_tokens_to_map(tp, ttok, H, W);
        }
        tok = spatial_tokens(tp, h);
        tok = add(tp, tok, mha(tp, p, pre + ".spatial", tok, tok, cfg.heads));
        h = spatial_tokens_to_map(tp, tok, H, W);
        if (mode == Mode::Video3D) {
            for (int k = 0; k < n_temporal; ++k) {
                std::string tpre = pre + ".temporal" + std::to_string(k);
                int ttok = temporal_tokens(tp, h);
                int pos = add_position_encoding(tp, ttok, p(tpre + ".pe"));
                ttok = add(tp, ttok, mha(tp, p, tpre, pos, pos, cfg.heads));
                h = temporal_tokens_to_map(tp, ttok, H, W);
            }
        }
        return h;
    }

    void register_params() {
        auto& c = cfg;
        auto conv = [&](const std::string& name, int64_t co, int64_t ci, int64_t k) {
            params.add(name + ".w", {co, ci, k, k}, 1.0 / std::sqrt(double(ci * k * k)));
            params.add(name + ".b", {co}, 0.0);
        };
        auto lin = [&](const std::string& name, int64_t in, int64_t out) {
            params.add(name + ".w", {in, out}, 1.0 / std::sqrt(double(in)));
            params.add(name + ".b", {out}, 0.0);
        };
        auto full_block = [&](const std::string& pre, int level) {
            int64_t w = c.width(level);
            conv(pre + ".conv", w, w, 3);
            lin(pre + ".time", c.time_dim, w);
            add_attention_params(params, pre + ".ref", w, w, w, false);
            add_attention_params(params, pre + ".cross", w, c.cproj_dim, w, false);
            add_attention_params(params, pre + ".normal", w, c.normal_dim, w, false);
            add_attention_params(params, pre + ".spatial", w, w, w, false);
            for (int k = 0; k < temporal_count(level); ++k) {
                std::string tpre = pre + ".temporal" + std::to_string(k);
                add_attention_params(params, tpre, w, w, w, true, /*zero_out=*/true);
                params.add(tpre + ".pe", {int64_t(c.temporal_max_len), w}, 0.02, true);
            }
        };

        conv("main.conv_in", c.base_width, 12, 3);
        for (int l = 0; l < c.levels - 1; ++l) {
            full_block("main.enc" + std::to_string(l), l);
            conv("main.down" + std::to_string(l), c.width(l + 1), c.width(l), 3);
        }
        full_block("main.bot", c.levels - 1);
        for (int l = c.levels - 2; l >= 0; --l) {
            conv("main.up" + std::to_string(l), c.width(l), c.width(l + 1), 3);
            conv("main.dec" + std::to_string(l) + ".conv", c.width(l), c.width(l), 3);
            add_attention_params(params, "main.dec" + std::to_string(l) + ".ref", c.width(l), c.width(l),
                                 c.width(l), false);
        }
        conv("main.conv_out", 4, c.base_width, 3);

        conv("ref.conv_in", c.base_width, 4, 3);
        for (int l = 0; l < c.levels - 1; ++l) {
            conv("ref.enc" + std::to_string(l) + ".conv", c.width(l), c.width(l), 3);
            add_attention_params(params, "ref.enc" + std::to_string(l) + ".spatial", c.width(l), c.width(l),
                                 c.width(l), false);
            conv("ref.down" + std::to_string(l), c.width(l + 1), c.width(l), 3);
        }
        conv("ref.bot.conv", c.width(c.levels - 1), c.width(c.levels - 1), 3);
        add_attention_params(params, "ref.bot.spatial", c.width(c.levels - 1), c.width(c.levels - 1),
                             c.width(c.levels - 1), false);
        for (int l = c.levels - 2; l >= 0; --l) {
            conv("ref.up" + std::to_string(l), c.width(l), c.width(l + 1), 3);
            conv("ref.dec" + std::to_string(l) + ".conv", c.width(l), c.width(l), 3);
        }

        conv("pg.back0", c.pose_width, 6, 3);
        conv("pg.back1", c.pose_width, c.pose_width, 3);
        conv("pg.back2", c.base_width, c.pose_width, 3);
        params.add("pg.gate.w", {int64_t(c.base_width), 6, 8, 8}, 1.0 / std::sqrt(6.0 * 64.0));
        params.add("pg.gate.b", {int64_t(c.base_width)}, 0.0);

        int depth = normal_backbone_depth();
        conv("ng.back0", c.normal_width, 3, 3);
        for (int k = 1; k < depth; ++k) conv("ng.back" + std::to_string(k), c.normal_width, c.normal_width, 3);
        lin("ng.fc", int64_t(c.normal_width) * 16, c.normal_dim);

        lin("proj.ffn1", c.clip_dim, 2 * c.ffn_hidden);
        lin("proj.ffn2", c.ffn_hidden, c.cproj_dim);
        lin("proj.skip", c.clip_dim, c.cproj_dim);
    }
};

inline nlohmann::json NetConfig::to_json() const {
    return {{"image_size", image_size}, {"levels", levels},         {"base_width", base_width},
            {"heads", heads},           {"clip_dim", clip_dim},     {"cproj_dim", cproj_dim},
            {"ffn_hidden", ffn_hidden}, {"normal_dim", normal_dim}, {"time_dim", time_dim},
            {"temporal_max_len", temporal_max_len}, {"pose_width", pose_width},
            {"normal_width", normal_width}, {"motion_levels", motion_levels}};
}

inline NetConfig NetConfig::from_json(const nlohmann::json& j) {
    NetConfig c;
    c.image_size = j.value("image_size", c.image_size);
    c.levels = j.value("levels", c.levels);
    c.base_width = j.value("base_width", c.base_width);
    c.heads = j.value("heads", c.heads);
    c.clip_dim = j.value("clip_dim", c.clip_dim);
    c.cproj_dim = j.value("cproj_dim", c.cproj_dim);
    c.ffn_hidden = j.value("ffn_hidden", c.ffn_hidden);
    c.normal_dim = j.value("normal_dim", c.normal_dim);
    c.time_dim = j.value("time_dim", c.time_dim);
    c.temporal_max_len = j.value("temporal_max_len", c.temporal_max_len);
    c.pose_width = j.value("pose_width", c.pose_width);
    c.normal_width = j.value("normal_width", c.normal_width);
    c.motion_levels = j.value("motion_levels", c.motion_levels);
    return c;
}

}  // namespace vidgen

#endif  // VIDGEN_MODEL_HPP
