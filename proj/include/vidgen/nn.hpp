#ifndef VIDGEN_NN_HPP
#define VIDGEN_NN_HPP

#include <map>
#include <memory>
#include <string>

#include "vidgen/tape.hpp"

namespace vidgen {

// Named parameter store. Every parameter is tagged spatial xor temporal; the
// tag drives the stage-2 freeze rule. std::map keeps iteration order (and so
// optimizer behaviour) deterministic.
template <class S>
struct ParamStore {
    struct Entry {
        Tensor<S> value;
        bool temporal = false;
        Tensor<S> m, v;  // Adam state, lazily sized
    };
    std::map<std::string, Entry> entries;
    uint64_t init_seed = 0;

    Tensor<S>& add(const std::string& name, std::vector<int64_t> shape, double stddev, bool temporal = false) {
        Entry e;
        if (stddev == 0.0) {
            e.value = Tensor<S>::zeros(std::move(shape));
        } else {
            Rng rng = Rng(init_seed).fork(hash_str(name.c_str()));
            e.value = Tensor<S>::randn(std::move(shape), rng, S(stddev));
        }
        e.temporal = temporal;
        auto [it, fresh] = entries.emplace(name, std::move(e));
        if (!fresh) throw std::invalid_argument("param store: duplicate name " + name);
        return it->second.value;
    }

    Tensor<S>& at(const std::string& name) {
        auto it = entries.find(name);
        if (it == entries.end()) throw std::out_of_range("param store: missing " + name);
        return it->second.value;
    }
    const Tensor<S>& at(const std::string& name) const { return const_cast<ParamStore*>(this)->at(name); }

    int64_t count() const {
        int64_t n = 0;
        for (const auto& [k, e] : entries) n += e.value.numel();
        return n;
    }
    int64_t count_temporal() const {
        int64_t n = 0;
        for (const auto& [k, e] : entries)
            if (e.temporal) n += e.value.numel();
        return n;
    }
};

// Parameters fed into a tape for one forward/backward pass.
template <class S>
struct Bound {
    Tape<S>* tape = nullptr;
    std::map<std::string, int> ids;

    int operator()(const std::string& name) const {
        auto it = ids.find(name);
        if (it == ids.end()) throw std::out_of_range("bound params: missing " + name);
        return it->second;
    }
};

template <class S>
Bound<S> bind_params(ParamStore<S>& store, Tape<S>& tape) {
    Bound<S> b;
    b.tape = &tape;
    for (auto& [name, e] : store.entries) b.ids[name] = tape.input(e.value);
    return b;
}

// grads keyed by name, read back after tape.backward()
template <class S>
std::map<std::string, Tensor<S>> collect_grads(const Bound<S>& b, Tape<S>& tape) {
    std::map<std::string, Tensor<S>> g;
    for (const auto& [name, id] : b.ids)
        if (tape.has_grad(id)) g[name] = tape.grad(id);
    return g;
}

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

enum class ParamFilter { All, TemporalOnly };

// One Adam step; step_index is 1-based. Parameters outside the filter are not
// touched at all (stage-2 spatial freeze is bit-exact, not just zero-gradient).
template <class S>
void adam_step(ParamStore<S>& store, const std::map<std::string, Tensor<S>>& grads, int64_t step_index,
               const AdamConfig& cfg, ParamFilter filter = ParamFilter::All) {
    double bc1 = 1.0 - std::pow(cfg.beta1, double(step_index));
    double bc2 = 1.0 - std::pow(cfg.beta2, double(step_index));
    for (auto& [name, e] : store.entries) {
        if (filter == ParamFilter::TemporalOnly && !e.temporal) continue;
        auto git = grads.find(name);
        if (git == grads.end()) continue;
        const Tensor<S>& g = git->second;
        if (e.m.numel() == 0) {
            e.m = Tensor<S>::zeros(e.value.shape);
            e.v = Tensor<S>::zeros(e.value.shape);
        }
        for (int64_t i = 0; i < e.value.numel(); ++i) {
            double gi = double(g[i]);
            if (cfg.weight_decay != 0.0) gi += cfg.weight_decay * double(e.value[i]);
            double m = cfg.beta1 * double(e.m[i]) + (1.0 - cfg.beta1) * gi;
            double v = cfg.beta2 * double(e.v[i]) + (1.0 - cfg.beta2) * gi * gi;
            e.m[i] = S(m);
            e.v[i] = S(v);
            double mhat = m / bc1, vhat = v / bc2;
            e.value[i] -= S(cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps));
        }
    }
}

// ---- attention ----

// Registers Wq [Cq,C], Wk [Ckv,C], Wv [Ckv,C], Wo [C,C] plus biases under
// prefix.  zero_out zero-initializes the output projection (temporal modules
// start as identity residuals).
template <class S>
void add_attention_params(ParamStore<S>& store, const std::string& prefix, int64_t q_dim, int64_t kv_dim,
                          int64_t model_dim, bool temporal, bool zero_out = false) {
    double sq = 1.0 / std::sqrt(double(q_dim));
    double skv = 1.0 / std::sqrt(double(kv_dim));
    double so = 1.0 / std::sqrt(double(model_dim));
    store.add(prefix + ".wq", {q_dim, model_dim}, sq, temporal);
    store.add(prefix + ".bq", {model_dim}, 0.0, temporal);
    store.add(prefix + ".wk", {kv_dim, model_dim}, skv, temporal);
    store.add(prefix + ".bk", {model_dim}, 0.0, temporal);
    store.add(prefix + ".wv", {kv_dim, model_dim}, skv, temporal);
    store.add(prefix + ".bv", {model_dim}, 0.0, temporal);
    store.add(prefix + ".wo", {model_dim, model_dim}, zero_out ? 0.0 : so, temporal);
    store.add(prefix + ".bo", {model_dim}, 0.0, temporal);
}

inline std::shared_ptr<std::vector<int64_t>> head_split_index(int64_t B, int64_t T, int64_t C, int64_t heads) {
    int64_t dh = C / heads;
    auto idx = std::make_shared<std::vector<int64_t>>(size_t(B * T * C));
    int64_t o = 0;
    for (int64_t b = 0; b < B; ++b)
        for (int64_t h = 0; h < heads; ++h)
            for (int64_t t = 0; t < T; ++t)
                for (int64_t e = 0; e < dh; ++e) (*idx)[size_t(o++)] = (b * T + t) * C + h * dh + e;
    return idx;
}

inline std::shared_ptr<std::vector<int64_t>> head_merge_index(int64_t B, int64_t T, int64_t C, int64_t heads) {
    int64_t dh = C / heads;
    auto idx = std::make_shared<std::vector<int64_t>>(size_t(B * T * C));
    int64_t o = 0;
    for (int64_t b = 0; b < B; ++b)
        for (int64_t t = 0; t < T; ++t)
            for (int64_t h = 0; h < heads; ++h)
                for (int64_t e = 0; e < dh; ++e) (*idx)[size_t(o++)] = ((b * heads + h) * T + t) * dh + e;
    return idx;
}

// tile [1,T,C] tokens across a batch of B
inline std::shared_ptr<std::vector<int64_t>> tile_index(int64_t B, int64_t TC) {
    auto idx = std::make_shared<std::vector<int64_t>>(size_t(B * TC));
    for (int64_t b = 0; b < B; ++b)
        for (int64_t i = 0; i < TC; ++i) (*idx)[size_t(b * TC + i)] = i;
    return idx;
}

// Multi-head softmax attention on token batches. q: [B,Tq,Cq], kv: [B,Tk,Ckv]
// (or [1,Tk,Ckv], tiled across the batch). Returns [B,Tq,C].
template <class S>
int mha(Tape<S>& tp, const Bound<S>& p, const std::string& prefix, int q, int kv, int64_t heads) {
    const Tensor<S>& Q = tp.val(q);
    int64_t B = Q.dim(0), Tq = Q.dim(1);
    int kv2 = kv;
    if (tp.val(kv).dim(0) == 1 && B > 1) {
        const Tensor<S>& K = tp.val(kv);
        kv2 = gather(tp, kv, tile_index(B, K.dim(1) * K.dim(2)), {B, K.dim(1), K.dim(2)});
    } else if (tp.val(kv).dim(0) != B) {
        throw std::invalid_argument("mha: batch mismatch");
    }
    int64_t Tk = tp.val(kv2).dim(1);
    int qh = linear(tp, q, p(prefix + ".wq"), p(prefix + ".bq"));
    int kh = linear(tp, kv2, p(prefix + ".wk"), p(prefix + ".bk"));
    int vh = linear(tp, kv2, p(prefix + ".wv"), p(prefix + ".bv"));
    int64_t C = tp.val(qh).dim(2);
    if (C % heads != 0) throw std::invalid_argument("mha: heads must divide model dim");
    int64_t dh = C / heads;
    qh = gather(tp, qh, head_split_index(B, Tq, C, heads), {B * heads, Tq, dh});
    kh = gather(tp, kh, head_split_index(B, Tk, C, heads), {B * heads, Tk, dh});
    vh = gather(tp, vh, head_split_index(B, Tk, C, heads), {B * heads, Tk, dh});
    int scores = scale(tp, bmm_nt(tp, qh, kh), S(1.0 / std::sqrt(double(dh))));
    int attn = softmax_lastdim(tp, scores);
    int out = bmm(tp, attn, vh);
    out = gather(tp, out, head_merge_index(B, Tq, C, heads), {B, Tq, C});
    return linear(tp, out, p(prefix + ".wo"), p(prefix + ".bo"));
}

// ---- token/layout helpers for [F,C,H,W] feature maps ----

inline std::shared_ptr<std::vector<int64_t>> fchw_to_spatial_tokens_index(int64_t F, int64_t C, int64_t H,
                                                                          int64_t W) {
    auto idx = std::make_shared<std::vector<int64_t>>(size_t(F * C * H * W));
    int64_t o = 0;
    for (int64_t f = 0; f < F; ++f)
        for (int64_t p = 0; p < H * W; ++p)
            for (int64_t c = 0; c < C; ++c) (*idx)[size_t(o++)] = (f * C + c) * H * W + p;
    return idx;
}

inline std::shared_ptr<std::vector<int64_t>> spatial_tokens_to_fchw_index(int64_t F, int64_t C, int64_t H,
                                                                          int64_t W) {
    auto idx = std::make_shared<std::vector<int64_t>>(size_t(F * C * H * W));
    int64_t o = 0;
    for (int64_t f = 0; f < F; ++f)
        for (int64_t c = 0; c < C; ++c)
            for (int64_t p = 0; p < H * W; ++p) (*idx)[size_t(o++)] = (f * H * W + p) * C + c;
    return idx;
}

inline std::shared_ptr<std::vector<int64_t>> fchw_to_temporal_tokens_index(int64_t F, int64_t C, int64_t H,
                                                                           int64_t W) {
    auto idx = std::make_shared<std::vector<int64_t>>(size_t(F * C * H * W));
    int64_t o = 0;
    for (int64_t p = 0; p < H * W; ++p)
        for (int64_t f = 0; f < F; ++f)
            for (int64_t c = 0; c < C; ++c) (*idx)[size_t(o++)] = (f * C + c) * H * W + p;
    return idx;
}

inline std::shared_ptr<std::vector<int64_t>> temporal_tokens_to_fchw_index(int64_t F, int64_t C, int64_t H,
                                                                           int64_t W) {
    auto idx = std::make_shared<std::vector<int64_t>>(size_t(F * C * H * W));
    int64_t o = 0;
    for (int64_t f = 0; f < F; ++f)
        for (int64_t c = 0; c < C; ++c)
            for (int64_t p = 0; p < H * W; ++p) (*idx)[size_t(o++)] = (p * F + f) * C + c;
    return idx;
}

// [F,C,H,W] -> spatial tokens [F, H*W, C]
template <class S>
int spatial_tokens(Tape<S>& tp, int x) {
    const Tensor<S>& X = tp.val(x);
    int64_t F = X.dim(0), C = X.dim(1), H = X.dim(2), W = X.dim(3);
    return gather(tp, x, fchw_to_spatial_tokens_index(F, C, H, W), {F, H * W, C});
}

template <class S>
int spatial_tokens_to_map(Tape<S>& tp, int tok, int64_t H, int64_t W) {
    const Tensor<S>& X = tp.val(tok);
    int64_t F = X.dim(0), C = X.dim(2);
    return gather(tp, tok, spatial_tokens_to_fchw_index(F, C, H, W), {F, C, H, W});
}

// [F,C,H,W] -> temporal tokens [H*W, F, C]
template <class S>
int temporal_tokens(Tape<S>& tp, int x) {
    const Tensor<S>& X = tp.val(x);
    int64_t F = X.dim(0), C = X.dim(1), H = X.dim(2), W = X.dim(3);
    return gather(tp, x, fchw_to_temporal_tokens_index(F, C, H, W), {H * W, F, C});
}

template <class S>
int temporal_tokens_to_map(Tape<S>& tp, int tok, int64_t H, int64_t W) {
    const Tensor<S>& X = tp.val(tok);
    int64_t F = X.dim(1), C = X.dim(2);
    return gather(tp, tok, temporal_tokens_to_fchw_index(F, C, H, W), {F, C, H, W});
}

}  // namespace vidgen

#endif  // VIDGEN_NN_HPP
