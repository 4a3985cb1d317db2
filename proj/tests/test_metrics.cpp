#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "vidgen/image.hpp"
#include "vidgen/metrics.hpp"
#include "vidgen/schedule.hpp"

using namespace vidgen;
using vidgen::testing::TempDir;
using vidgen::testing::make_dataset;

TEST_CASE("psnr: identity cap and exact-MSE oracle") {
    Tensorf a = Tensorf::full({1, 3, 16, 16}, 0.5f);
    CHECK(psnr(a, a) == kPsnrCap);
    // double precision: uniform difference 0.1 -> MSE 0.01 -> exactly 20 dB
    Tensord x = Tensord::zeros({1, 3, 16, 16});
    Tensord y = Tensord::full({1, 3, 16, 16}, 0.1);
    CHECK(std::abs(psnr(x, y) - 20.0) < 1e-9);
    CHECK_THROWS(psnr(a, Tensorf::zeros({1, 3, 8, 8})));
}

namespace {

// independent SSIM: direct per-window double loops, no separable filtering
double ssim_oracle(const Tensorf& va, const Tensorf& vb) {
    int64_t F = va.dim(0), H = va.dim(2), W = va.dim(3);
    const double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03, sigma = 1.5;
    double kernel[11][11], ksum = 0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            kernel[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * sigma * sigma));
            ksum += kernel[i][j];
        }
    for (auto& row : kernel)
        for (auto& v : row) v /= ksum;
    auto luma = [&](const Tensorf& v, int64_t f, int64_t y, int64_t x) {
        return 0.299 * v[(f * 3 + 0) * H * W + y * W + x] + 0.587 * v[(f * 3 + 1) * H * W + y * W + x] +
               0.114 * v[(f * 3 + 2) * H * W + y * W + x];
    };
    double total = 0;
    for (int64_t f = 0; f < F; ++f) {
        double facc = 0;
        int64_t count = 0;
        for (int64_t cy = 5; cy + 5 < H; ++cy)
            for (int64_t cx = 5; cx + 5 < W; ++cx) {
                double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
                for (int i = -5; i <= 5; ++i)
                    for (int j = -5; j <= 5; ++j) {
                        double wk = kernel[i + 5][j + 5];
                        double xv = luma(va, f, cy + i, cx + j), yv = luma(vb, f, cy + i, cx + j);
                        mx += wk * xv;
                        my += wk * yv;
                        sxx += wk * xv * xv;
                        syy += wk * yv * yv;
                        sxy += wk * xv * yv;
                    }
                sxx -= mx * mx;
                syy -= my * my;
                sxy -= mx * my;
                facc += (2 * mx * my + C1) * (2 * sxy + C2) / ((mx * mx + my * my + C1) * (sxx + syy + C2));
                ++count;
            }
        total += facc / double(count);
    }
    return total / double(F);
}

}  // namespace

TEST_CASE("ssim: self-identity, oracle agreement, window precondition") {
    TempDir dir("ssim");
    Manifest m = make_dataset(dir.path() / "d", "real", 1, 2, 31);
    Tensorf v = load_video(m[0], {0, 1});
    CHECK(ssim(v, v) == doctest::Approx(1.0).epsilon(1e-9));

    Rng rng(3);
    Tensorf noisy = v;
    for (auto& x : noisy.data) x = std::min(1.0f, std::max(0.0f, x + 0.05f * float(rng.gaussian())));
    double mine = ssim(v, noisy);
    double oracle = ssim_oracle(v, noisy);
    CHECK(mine == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(mine < 1.0);
    CHECK_THROWS(ssim(Tensorf::zeros({1, 3, 8, 8}), Tensorf::zeros({1, 3, 8, 8})));
}

TEST_CASE("frechet distance: identical sets, analytic Gaussian cases") {
    Rng rng(17);
    const int n = 10000, k = 4;
    auto draw = [&](double mean, double stddev) {
        std::vector<std::vector<double>> s;
        for (int i = 0; i < n; ++i) {
            std::vector<double> f(k);
            for (auto& v : f) v = mean + stddev * rng.gaussian();
            s.push_back(std::move(f));
        }
        return s;
    };
    auto base = draw(0.0, 1.0);
    CHECK(frechet_distance(base, base) <= 1e-6);

    // mean shift d=(1,1,1,1): FD = ||d||^2 = 4
    auto shifted = draw(1.0, 1.0);
    CHECK(frechet_distance(base, shifted) == doctest::Approx(4.0).epsilon(0.02));

    // variance case: N(0,I) vs N(0,4I): FD = k (1 + 4 - 2*2) = k
    auto wide = draw(0.0, 2.0);
    CHECK(frechet_distance(base, wide) == doctest::Approx(double(k)).epsilon(0.02));

    CHECK_THROWS(frechet_distance({}, base));
    CHECK_THROWS(frechet_distance(base, {{1.0, 2.0}}));
}

TEST_CASE("frechet shrinkage path for tiny sample counts") {
    // n < dim+1 triggers shrinkage; result must stay finite and >= 0
    std::vector<std::vector<double>> a = {{1, 2, 3, 4, 5}, {2, 3, 4, 5, 6}};
    std::vector<std::vector<double>> b = {{0, 0, 0, 0, 0}, {1, 1, 1, 1, 1}};
    int clamps = 0;
    double d = frechet_distance(a, b, &clamps);
    CHECK(std::isfinite(d));
    CHECK(d >= 0.0);
    CHECK(clamps >= 0);
}

TEST_CASE("toy identity embedding separates identities across motions") {
    TempDir dir("csim");
    int wins = 0;
    for (int trial = 0; trial < 20; ++trial) {
        Manifest m = make_dataset(dir.path() / ("t" + std::to_string(trial)), "real", 2, 8,
                                  1000 + uint64_t(trial));
        auto emb = [&](const ManifestEntry& e, std::vector<int64_t> frames) {
            Tensorf v = load_video(e, frames);
            Tensorf face = read_video_frames(std::filesystem::path(e.locator) / "face", frames);
            return identity_embedding(v, face);
        };
        auto a_early = emb(m[0], {0, 1, 2, 3});
        auto a_late = emb(m[0], {4, 5, 6, 7});  // same identity, different motion phase
        auto b = emb(m[1], {0, 1, 2, 3});
        if (csim(a_early, a_late) > csim(a_early, b)) ++wins;
    }
    CHECK(wins >= 19);  // frozen regression bound from the calibration run
}

TEST_CASE("evaluate with an oracle generator produces perfect scores") {
    TempDir dir("eval");
    Manifest m = make_dataset(dir.path() / "d", "real", 2, 2, 41);
    VideoGenerator oracle = [](const ManifestEntry& e) {
        std::vector<int64_t> frames(size_t(e.frame_count), 0);
        std::iota(frames.begin(), frames.end(), 0);
        return load_video(e, frames);
    };
    MetricReport r = evaluate(oracle, m);
    REQUIRE(r.per_video.size() == 2);
    for (const auto& pv : r.per_video) {
        CHECK(pv.psnr == kPsnrCap);
        CHECK(pv.ssim == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(pv.csim == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(!pv.perceptual.has_value());
    }
    CHECK(r.aggregate.frechet <= 1e-6);
    CHECK(r.fvd_embedder_label == "toy-histogram");
    CHECK_THROWS(evaluate(oracle, Manifest{}));

    // plugged-in perceptual embedder fills the LPIPS slot
    FrameEmbedder fe = [](const Tensorf& frame) {
        double mean = 0;
        for (float v : frame.data) mean += v;
        return std::vector<double>{mean / double(frame.numel())};
    };
    MetricReport r2 = evaluate(oracle, m, toy_video_embedding, fe);
    REQUIRE(r2.aggregate.perceptual.has_value());
    CHECK(*r2.aggregate.perceptual == doctest::Approx(0.0));
}

TEST_CASE("render_table: column order, bolding, absent LPIPS") {
    AggregateMetrics a;
    a.psnr = 20.0;
    a.ssim = 0.8;
    a.frechet = 5.0;
    a.csim = 0.9;
    AggregateMetrics b = a;
    b.psnr = 21.0;
    b.frechet = 4.0;
    std::string t = render_table({{"Baseline", a}, {"Finetuned", b}});
    CHECK(t.find("PSNR↑") != std::string::npos);
    CHECK(t.find("SSIM↑") != std::string::npos);
    CHECK(t.find("LPIPS↓") != std::string::npos);
    CHECK(t.find("FVD↓") != std::string::npos);
    CHECK(t.find("CSIM↑") != std::string::npos);
    CHECK(t.find("PSNR") < t.find("SSIM"));
    CHECK(t.find("SSIM") < t.find("LPIPS"));
    CHECK(t.find("LPIPS") < t.find("FVD"));
    CHECK(t.find("FVD") < t.find("CSIM"));
    CHECK(t.find("**21.0000**") != std::string::npos);  // best PSNR bolded
    CHECK(t.find("**4.0000**") != std::string::npos);   // best (lowest) FVD bolded
    CHECK(t.find("—") != std::string::npos);       // absent LPIPS renders as em dash
    // FVD-free variant (Table-3 shape)
    std::string t3 = render_table({{"Random", a}}, /*include_fvd=*/false, "Selection");
    CHECK(t3.find("FVD") == std::string::npos);
    CHECK(t3.find("Selection") != std::string::npos);
}

TEST_CASE("metrics JSON round-trip") {
    AggregateMetrics m;
    m.psnr = 1;
    m.ssim = 2;
    m.frechet = 3;
    m.csim = 4;
    m.perceptual = 5;
    AggregateMetrics r = AggregateMetrics::from_json(m.to_json());
    CHECK(r.psnr == 1);
    CHECK(r.frechet == 3);
    CHECK(r.perceptual.has_value());
    m.perceptual.reset();
    CHECK(!AggregateMetrics::from_json(m.to_json()).perceptual.has_value());
}
