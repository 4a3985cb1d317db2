#include "vidgen/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "vidgen/image.hpp"
#include "vidgen/schedule.hpp"

namespace vidgen {

namespace {

template <class S>
double psnr_impl(const Tensor<S>& a, const Tensor<S>& b) {
    check_same_shape(a, b, "psnr");
    double mse = 0.0;
    for (int64_t i = 0; i < a.numel(); ++i) {
        double d = double(a[i]) - double(b[i]);
        mse += d * d;
    }
    mse /= double(a.numel());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

}  // namespace

double psnr(const Tensorf& a, const Tensorf& b) { return psnr_impl(a, b); }
double psnr(const Tensord& a, const Tensord& b) { return psnr_impl(a, b); }

namespace {

std::vector<double> gaussian_window(int radius, double sigma) {
    std::vector<double> w(size_t(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        w[size_t(i + radius)] = std::exp(-0.5 * double(i * i) / (sigma * sigma));
        sum += w[size_t(i + radius)];
    }
    for (auto& v : w) v /= sum;
    return w;
}

// separable gaussian filter, 'valid' region only
Eigen::MatrixXd gauss_filter_valid(const Eigen::MatrixXd& img, const std::vector<double>& w) {
    int r = int(w.size() / 2);
    int64_t H = img.rows(), W = img.cols();
    Eigen::MatrixXd tmp(H, W - 2 * r);
    for (int64_t y = 0; y < H; ++y)
        for (int64_t x = r; x < W - r; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += w[size_t(i + r)] * img(y, x + i);
            tmp(y, x - r) = acc;
        }
    Eigen::MatrixXd out(H - 2 * r, W - 2 * r);
    for (int64_t y = r; y < H - r; ++y)
        for (int64_t x = 0; x < W - 2 * r; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += w[size_t(i + r)] * tmp(y + i, x);
            out(y - r, x) = acc;
        }
    return out;
}

double ssim_frame(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    constexpr double K1 = 0.01, K2 = 0.03, L = 1.0;
    constexpr double C1 = (K1 * L) * (K1 * L), C2 = (K2 * L) * (K2 * L);
    static const std::vector<double> w = gaussian_window(5, 1.5);
    Eigen::MatrixXd mx = gauss_filter_valid(x, w);
    Eigen::MatrixXd my = gauss_filter_valid(y, w);
    Eigen::MatrixXd mxx = gauss_filter_valid(x.cwiseProduct(x), w);
    Eigen::MatrixXd myy = gauss_filter_valid(y.cwiseProduct(y), w);
    Eigen::MatrixXd mxy = gauss_filter_valid(x.cwiseProduct(y), w);
    double acc = 0.0;
    for (int64_t i = 0; i < mx.rows(); ++i)
        for (int64_t j = 0; j < mx.cols(); ++j) {
            double mu_x = mx(i, j), mu_y = my(i, j);
            double sx = mxx(i, j) - mu_x * mu_x;
            double sy = myy(i, j) - mu_y * mu_y;
            double sxy = mxy(i, j) - mu_x * mu_y;
            acc += ((2 * mu_x * mu_y + C1) * (2 * sxy + C2)) /
                   ((mu_x * mu_x + mu_y * mu_y + C1) * (sx + sy + C2));
        }
    return acc / double(mx.rows() * mx.cols());
}

Eigen::MatrixXd luma_frame(const Tensorf& video, int64_t f) {
    int64_t H = video.dim(2), W = video.dim(3);
    Eigen::MatrixXd g(H, W);
    const float* base = video.data.data() + f * 3 * H * W;
    for (int64_t y = 0; y < H; ++y)
        for (int64_t x = 0; x < W; ++x)
            g(y, x) = 0.299 * base[y * W + x] + 0.587 * base[H * W + y * W + x] +
                      0.114 * base[2 * H * W + y * W + x];
    return g;
}

}  // namespace

double ssim(const Tensorf& a, const Tensorf& b) {
    check_same_shape(a, b, "ssim");
    if (a.dim(2) < 11 || a.dim(3) < 11) throw std::invalid_argument("ssim: frames smaller than 11x11 window");
    double acc = 0.0;
    for (int64_t f = 0; f < a.dim(0); ++f) acc += ssim_frame(luma_frame(a, f), luma_frame(b, f));
    return acc / double(a.dim(0));
}

namespace {

void mean_cov(const std::vector<std::vector<double>>& feats, Eigen::VectorXd& mu, Eigen::MatrixXd& sigma) {
    int64_t n = int64_t(feats.size()), k = int64_t(feats[0].size());
    mu = Eigen::VectorXd::Zero(k);
    for (const auto& f : feats)
        for (int64_t i = 0; i < k; ++i) mu(i) += f[size_t(i)];
    mu /= double(n);
    sigma = Eigen::MatrixXd::Zero(k, k);
    if (n > 1) {
        for (const auto& f : feats) {
            Eigen::VectorXd d(k);
            for (int64_t i = 0; i < k; ++i) d(i) = f[size_t(i)] - mu(i);
            sigma += d * d.transpose();
        }
        sigma /= double(n - 1);
    }
    if (n < k + 1) {
        constexpr double lambda = 0.01;
        double tr = sigma.trace();
        sigma = (1.0 - lambda) * sigma + lambda * (tr / double(k)) * Eigen::MatrixXd::Identity(k, k);
    }
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m, int* clamp_events) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    Eigen::VectorXd ev = es.eigenvalues();
    for (int64_t i = 0; i < ev.size(); ++i) {
        if (ev(i) < 0.0) {
            if (ev(i) < -1e-8 && clamp_events) ++(*clamp_events);
            ev(i) = 0.0;
        }
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const std::vector<std::vector<double>>& feats_a,
                        const std::vector<std::vector<double>>& feats_b, int* clamp_events) {
    if (feats_a.empty() || feats_b.empty()) throw std::invalid_argument("frechet_distance: empty feature set");
    if (feats_a[0].size() != feats_b[0].size())
        throw std::invalid_argument("frechet_distance: dimension mismatch");
    Eigen::VectorXd mu_a, mu_b;
    Eigen::MatrixXd sa, sb;
    mean_cov(feats_a, mu_a, sa);
    mean_cov(feats_b, mu_b, sb);
    Eigen::MatrixXd ra = spd_sqrt(sa, clamp_events);
    // tr((Sa Sb)^{1/2}) via the symmetric product Sa^{1/2} Sb Sa^{1/2}
    Eigen::MatrixXd prod = ra * sb * ra;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (prod + prod.transpose()));
    double tr_sqrt = 0.0;
    for (int64_t i = 0; i < es.eigenvalues().size(); ++i) {
        double ev = es.eigenvalues()(i);
        if (ev < 0.0) {
            if (ev < -1e-8 && clamp_events) ++(*clamp_events);
            ev = 0.0;
        }
        tr_sqrt += std::sqrt(ev);
    }
    double d = (mu_a - mu_b).squaredNorm() + sa.trace() + sb.trace() - 2.0 * tr_sqrt;
    return std::max(0.0, d);
}

double csim(const std::vector<double>& a, const std::vector<double>& b) { return cosine_similarity(a, b); }

std::vector<double> identity_embedding(const Tensorf& video, const Tensorf& face_map) {
    if (video.dim(0) != face_map.dim(0)) throw std::invalid_argument("identity_embedding: frame mismatch");
    int64_t F = video.dim(0), H = video.dim(2), W = video.dim(3);
    std::vector<double> emb(7, 0.0);
    for (int64_t f = 0; f < F; ++f) {
        double sum[3] = {0, 0, 0}, sum2[3] = {0, 0, 0};
        int64_t area = 0;
        for (int64_t p = 0; p < H * W; ++p) {
            float lum = face_map[(f * 3 + 0) * H * W + p] + face_map[(f * 3 + 1) * H * W + p] +
                        face_map[(f * 3 + 2) * H * W + p];
            if (lum < 0.1f) continue;
            ++area;
            for (int64_t c = 0; c < 3; ++c) {
                double v = video[(f * 3 + c) * H * W + p];
                sum[c] += v;
                sum2[c] += v * v;
            }
        }
        if (area == 0) continue;
        for (int64_t c = 0; c < 3; ++c) {
            emb[size_t(c)] += sum[c] / double(area) / double(F);
            emb[size_t(3 + c)] += sum2[c] / double(area) / double(F);
        }
        emb[6] += double(area) / double(H * W) / double(F);
    }
    return emb;
}

double perceptual_distance(const Tensorf& a, const Tensorf& b, const FrameEmbedder& embedder) {
    check_same_shape(a, b, "perceptual_distance");
    int64_t F = a.dim(0), H = a.dim(2), W = a.dim(3);
    double acc = 0.0;
    for (int64_t f = 0; f < F; ++f) {
        Tensorf fa({3, H, W}), fb({3, H, W});
        std::copy(a.data.begin() + f * 3 * H * W, a.data.begin() + (f + 1) * 3 * H * W, fa.data.begin());
        std::copy(b.data.begin() + f * 3 * H * W, b.data.begin() + (f + 1) * 3 * H * W, fb.data.begin());
        auto ea = embedder(fa), eb = embedder(fb);
        double d = 0.0;
        for (size_t i = 0; i < ea.size(); ++i) d += (ea[i] - eb[i]) * (ea[i] - eb[i]);
        acc += std::sqrt(d);
    }
    return acc / double(F);
}

nlohmann::json AggregateMetrics::to_json() const {
    nlohmann::json j{{"psnr", psnr}, {"ssim", ssim}, {"fvd", frechet}, {"csim", csim}};
    if (perceptual) j["lpips"] = *perceptual;  // absent when no embedder is plugged in
    return j;
}

AggregateMetrics AggregateMetrics::from_json(const nlohmann::json& j) {
    AggregateMetrics m;
    m.psnr = j.value("psnr", 0.0);
    m.ssim = j.value("ssim", 0.0);
    m.frechet = j.value("fvd", 0.0);
    m.csim = j.value("csim", 0.0);
    if (j.contains("lpips")) m.perceptual = j.at("lpips").get<double>();
    return m;
}

nlohmann::json MetricReport::to_json() const {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& v : per_video) {
        nlohmann::json j{{"id", v.id}, {"psnr", v.psnr}, {"ssim", v.ssim}, {"csim", v.csim}};
        if (v.perceptual) j["lpips"] = *v.perceptual;
        per.push_back(j);
    }
    return {{"per_video", per},
            {"aggregate", aggregate.to_json()},
            {"fvd_embedder", fvd_embedder_label},
            {"clamp_events", clamp_events}};
}

MetricReport evaluate(const VideoGenerator& generator, const Manifest& eval_manifest,
                      const VideoEmbedder& fvd_embedder, const std::optional<FrameEmbedder>& perceptual) {
    if (eval_manifest.empty()) throw std::invalid_argument("evaluate: empty eval manifest");
    MetricReport report;
    std::vector<std::vector<double>> feats_gt, feats_gen;
    double acc_psnr = 0, acc_ssim = 0, acc_csim = 0, acc_lpips = 0;
    for (const auto& e : eval_manifest) {
        std::vector<int64_t> frames(size_t(e.frame_count));
        std::iota(frames.begin(), frames.end(), 0);
        Tensorf gt = load_video(e, frames);
        Tensorf face = read_video_frames(std::filesystem::path(e.locator) / "face", frames);
        Tensorf gen = generator(e);
        check_same_shape(gt, gen, "evaluate: generated vs ground truth");

        PerVideoMetrics pv;
        pv.id = e.id;
        pv.psnr = psnr(gt, gen);
        pv.ssim = ssim(gt, gen);
        pv.csim = csim(identity_embedding(gt, face), identity_embedding(gen, face));
        if (perceptual) pv.perceptual = perceptual_distance(gt, gen, *perceptual);
        feats_gt.push_back(fvd_embedder(gt));
        feats_gen.push_back(fvd_embedder(gen));
        acc_psnr += pv.psnr;
        acc_ssim += pv.ssim;
        acc_csim += pv.csim;
        if (pv.perceptual) acc_lpips += *pv.perceptual;
        report.per_video.push_back(std::move(pv));
    }
    double n = double(eval_manifest.size());
    report.aggregate.psnr = acc_psnr / n;
    report.aggregate.ssim = acc_ssim / n;
    report.aggregate.csim = acc_csim / n;
    if (perceptual) report.aggregate.perceptual = acc_lpips / n;
    report.aggregate.frechet = frechet_distance(feats_gt, feats_gen, &report.clamp_events);
    return report;
}

std::string render_table(const std::vector<std::pair<std::string, AggregateMetrics>>& rows, bool include_fvd,
                         const std::string& label_header) {
    struct Col {
        const char* name;
        bool higher_better;
        std::function<std::optional<double>(const AggregateMetrics&)> get;
    };
    std::vector<Col> cols = {
        {"PSNR\xE2\x86\x91", true, [](const AggregateMetrics& m) { return std::optional<double>(m.psnr); }},
        {"SSIM\xE2\x86\x91", true, [](const AggregateMetrics& m) { return std::optional<double>(m.ssim); }},
        {"LPIPS\xE2\x86\x93", false, [](const AggregateMetrics& m) { return m.perceptual; }},
    };
    if (include_fvd)
        cols.push_back(
            {"FVD\xE2\x86\x93", false, [](const AggregateMetrics& m) { return std::optional<double>(m.frechet); }});
    cols.push_back(
        {"CSIM\xE2\x86\x91", true, [](const AggregateMetrics& m) { return std::optional<double>(m.csim); }});

    // best row per column for bolding
    std::vector<int> best(cols.size(), -1);
    for (size_t c = 0; c < cols.size(); ++c) {
        for (size_t r = 0; r < rows.size(); ++r) {
            auto v = cols[c].get(rows[r].second);
            if (!v) continue;
            if (best[c] < 0) {
                best[c] = int(r);
                continue;
            }
            auto bv = cols[c].get(rows[size_t(best[c])].second);
            if (cols[c].higher_better ? *v > *bv : *v < *bv) best[c] = int(r);
        }
    }
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        return std::string(buf);
    };
    std::string out = "| " + label_header + " |";
    for (const auto& c : cols) out += std::string(" ") + c.name + " |";
    out += "\n|" + std::string(label_header.size() + 2, '-') + "|";
    for (size_t c = 0; c < cols.size(); ++c) out += "---|";
    out += "\n";
    for (size_t r = 0; r < rows.size(); ++r) {
        out += "| " + rows[r].first + " |";
        for (size_t c = 0; c < cols.size(); ++c) {
            auto v = cols[c].get(rows[r].second);
            if (!v)
                out += " \xE2\x80\x94 |";
            else if (int(r) == best[c] && rows.size() > 1)
                out += " **" + fmt(*v) + "** |";
            else
                out += " " + fmt(*v) + " |";
        }
        out += "\n";
    }
    return out;
}

}  // namespace vidgen
