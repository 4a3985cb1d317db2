#include "vidgen/curation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "vidgen/image.hpp"

namespace vidgen {

namespace {
constexpr int kHistBins = 8;
}  // namespace

// Mean-pooling over all frames keeps the embedding exactly invariant to frame
// reversal (adjacent-difference energy sees the same multiset of pairs).
std::vector<double> toy_video_embedding(const Tensorf& video) {
    int64_t F = video.dim(0), H = video.dim(2), W = video.dim(3);
    int64_t dh = (H % 16 == 0) ? 16 : H, dw = (W % 16 == 0) ? 16 : W;
    std::vector<double> emb(size_t(3 * kHistBins + 1), 0.0);
    for (int64_t fi = 0; fi < F; ++fi) {
        Tensorf frame({3, H, W});
        std::copy(video.data.begin() + fi * 3 * H * W, video.data.begin() + (fi + 1) * 3 * H * W,
                  frame.data.begin());
        Tensorf small = downsample_box(frame, dh, dw);
        for (int64_t c = 0; c < 3; ++c)
            for (int64_t p = 0; p < dh * dw; ++p) {
                float v = small[c * dh * dw + p];
                int bin = std::min(kHistBins - 1, int(v * kHistBins));
                emb[size_t(c * kHistBins + bin)] += 1.0 / double(dh * dw * F);
            }
    }
    double diff = 0.0;
    for (int64_t fi = 1; fi < F; ++fi)
        for (int64_t p = 0; p < 3 * H * W; ++p)
            diff += std::abs(double(video[fi * 3 * H * W + p]) - double(video[(fi - 1) * 3 * H * W + p]));
    emb.back() = F > 1 ? diff / double(3 * H * W * (F - 1)) : 0.0;
    return emb;
}

std::vector<double> embed_video(const ManifestEntry& entry, const VideoEmbedder& embedder) {
    std::vector<int64_t> frames(size_t(entry.frame_count));
    std::iota(frames.begin(), frames.end(), 0);
    Tensorf video = load_video(entry, frames);
    return embedder(video);
}

void embed_manifest(Manifest& m, const VideoEmbedder& embedder) {
    for (auto& e : m)
        if (!e.embedding) e.embedding = embed_video(e, embedder);
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: dimension mismatch");
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

Manifest mix_datasets(const Manifest& real, const Manifest& synthetic, int ratio_syn, int ratio_real,
                      uint64_t seed) {
    if (ratio_real < 1) throw std::invalid_argument("mix_datasets: ratio_real must be >= 1");
    if (ratio_syn < 0) throw std::invalid_argument("mix_datasets: ratio_syn must be >= 0");
    size_t want = size_t(int64_t(ratio_syn) * int64_t(real.size()) / int64_t(ratio_real));
    if (want > synthetic.size())
        throw std::invalid_argument("mix_datasets: insufficient synthetic pool (" +
                                    std::to_string(synthetic.size()) + " < " + std::to_string(want) + ")");
    Rng rng(seed ^ 0x3141592653589793ull);
    // without-replacement sample via partial Fisher-Yates over indices
    std::vector<size_t> idx(synthetic.size());
    std::iota(idx.begin(), idx.end(), size_t(0));
    for (size_t i = 0; i < want; ++i) {
        size_t j = i + size_t(rng.uniform_int(uint64_t(idx.size() - i)));
        std::swap(idx[i], idx[j]);
    }
    Manifest out = real;
    for (size_t i = 0; i < want; ++i) out.push_back(synthetic[idx[i]]);
    // deterministic interleave
    for (size_t i = out.size(); i > 1; --i) {
        size_t j = size_t(rng.uniform_int(uint64_t(i)));
        std::swap(out[i - 1], out[j]);
    }
    return out;
}

SelectionResult select_top_n(const std::vector<std::vector<double>>& targets, const Manifest& candidates,
                             size_t n, TargetAggregation agg) {
    if (n > candidates.size()) throw std::invalid_argument("select_top_n: n exceeds candidate pool");
    struct Scored {
        double score;
        std::string id;
    };
    std::vector<Scored> scored;
    scored.reserve(candidates.size());
    for (const auto& e : candidates) {
        if (!e.embedding) throw std::invalid_argument("select_top_n: candidate " + e.id + " missing embedding");
        double s = agg == TargetAggregation::Max ? -2.0 : 0.0;
        for (const auto& t : targets) {
            double c = cosine_similarity(t, *e.embedding);
            if (agg == TargetAggregation::Max)
                s = std::max(s, c);
            else
                s += c / double(targets.size());
        }
        scored.push_back({s, e.id});
    }
    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
    SelectionResult r;
    r.strategy = "clip_sim";
    r.target_descriptor = std::to_string(targets.size()) + " target embeddings";
    for (size_t i = 0; i < n; ++i) {
        r.ids.push_back(scored[i].id);
        r.scores.push_back(scored[i].score);
    }
    return r;
}

SelectionResult select_random(const Manifest& candidates, size_t n, uint64_t seed) {
    if (n > candidates.size()) throw std::invalid_argument("select_random: n exceeds candidate pool");
    Rng rng(seed ^ 0x2718281828459045ull);
    std::vector<size_t> idx(candidates.size());
    std::iota(idx.begin(), idx.end(), size_t(0));
    for (size_t i = 0; i < n; ++i) {
        size_t j = i + size_t(rng.uniform_int(uint64_t(idx.size() - i)));
        std::swap(idx[i], idx[j]);
    }
    SelectionResult r;
    r.strategy = "random";
    for (size_t i = 0; i < n; ++i) r.ids.push_back(candidates[idx[i]].id);
    return r;
}

SelectionResult select_manual(const Manifest& candidates, const std::vector<std::string>& id_list) {
    std::set<std::string> pool;
    for (const auto& e : candidates) pool.insert(e.id);
    SelectionResult r;
    r.strategy = "manual";
    for (const auto& id : id_list) {
        if (!pool.count(id)) throw std::invalid_argument("select_manual: unknown id " + id);
        r.ids.push_back(id);
    }
    return r;
}

Manifest subset_by_ids(const Manifest& pool, const std::vector<std::string>& ids) {
    std::map<std::string, const ManifestEntry*> by_id;
    for (const auto& e : pool) by_id[e.id] = &e;
    Manifest out;
    for (const auto& id : ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw std::invalid_argument("subset_by_ids: unknown id " + id);
        out.push_back(*it->second);
    }
    return out;
}

}  // namespace vidgen
