// Acceptance harness: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria are property-based; experiment-protocol checks run with
// reduced step counts (the checked shapes are step-count independent).
#include <cstdio>
#include <functional>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "vidgen/experiments.hpp"

using namespace vidgen;
using vidgen::testing::TempDir;
using vidgen::testing::make_dataset;
using vidgen::testing::tiny_net;

namespace {

int g_failures = 0;

void criterion(int number, const char* description, const std::function<void()>& body) {
    std::string error;
    try {
        body();
    } catch (const std::exception& e) {
        error = e.what();
    } catch (...) {
        error = "unknown exception";
    }
    if (error.empty()) {
        std::printf("[PASS] criterion %2d: %s\n", number, description);
    } else {
        std::printf("[FAIL] criterion %2d: %s -- %s\n", number, description, error.c_str());
        ++g_failures;
    }
    std::fflush(stdout);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::runtime_error(msg);
}

Tensorf uniform_video(std::vector<int64_t> shape, uint64_t seed) {
    Rng rng(seed);
    Tensorf v(std::move(shape));
    for (auto& x : v.data) x = float(rng.uniform());
    return v;
}

}  // namespace

int main() {
    criterion(1, "zero-terminal-SNR schedule exact; linear schedule matches product oracle to 1e-12", [] {
        NoiseSchedule z = make_schedule(1000, 1e-4, 0.02, true);
        require(z.abar(1000) == 0.0, "abar(T) not exactly zero");
        require(snr(z, 1000) == 0.0, "SNR(T) not exactly zero");
        NoiseSchedule s = make_schedule(1000, 1e-4, 0.02, false);
        long double prod = 1.0L;
        for (int t = 1; t <= 1000; ++t) {
            long double beta = 1e-4L + (0.02L - 1e-4L) * (long double)(t - 1) / 999.0L;
            prod *= 1.0L - beta;
            require(std::abs(double(prod - (long double)s.abar(t))) < 1e-12,
                    "alpha_bar deviates from product oracle at t=" + std::to_string(t));
        }
    });

    criterion(2, "min-SNR weight matches direct evaluation at SNR {0,1,5,100} to 1e-12", [] {
        const double expected[4] = {0.0, 0.5, 5.0 / 6.0, 5.0 / 101.0};
        const double at[4] = {0.0, 1.0, 5.0, 100.0};
        for (int i = 0; i < 4; ++i)
            require(std::abs(loss_weight(at[i]) - expected[i]) < 1e-12, "weight mismatch at SNR=" + std::to_string(at[i]));
    });

    criterion(3, "v-parameterization round-trip over 1000 random triples within 1e-5 relative", [] {
        NoiseSchedule sch = make_schedule(1000, 1e-4, 0.02, true);
        Rng rng(101);
        for (int trial = 0; trial < 1000; ++trial) {
            int t = 1 + int(rng.uniform_int(999));  // terminal t has no eps information by design
            Tensorf x0 = Tensorf::randn({4, 2, 2}, rng, 1.0f);
            Tensorf eps = Tensorf::randn({4, 2, 2}, rng, 1.0f);
            Tensorf z = add_noise(x0, eps, sch, t);
            Tensorf v = v_target(x0, eps, sch, t);
            Tensorf eps_r = v_to_eps(v, z, sch, t);
            Tensorf x0_r = v_to_x0(v, z, sch, t);
            for (int64_t i = 0; i < x0.numel(); ++i) {
                double ee = std::abs(eps_r[i] - eps[i]) / std::max(1.0, double(std::abs(eps[i])));
                double ex = std::abs(x0_r[i] - x0[i]) / std::max(1.0, double(std::abs(x0[i])));
                require(ee < 1e-5 && ex < 1e-5, "round-trip error exceeds 1e-5");
            }
        }
    });

    criterion(4, "50-step DDIM with oracle predictor recovers the planted latent and decoded video", [] {
        LatentCodec codec(7);
        Tensorf video = uniform_video({2, 3, 32, 32}, 5);
        Tensorf x0 = codec.encode_video(video);
        NoiseSchedule sch = make_schedule(1000, 1e-4, 0.02, true);
        Rng rng(6);
        Tensorf z = Tensorf::randn(x0.shape, rng, 1.0f);  // at abar=0, z_T is pure noise
        std::vector<int> ts = ddim_timesteps(1000, 50);
        for (size_t k = 0; k + 1 < ts.size(); ++k) {
            int t = ts[k];
            float a = float(std::sqrt(sch.abar(t))), b = float(std::sqrt(1.0 - sch.abar(t)));
            Tensorf v = x0;
            for (int64_t i = 0; i < v.numel(); ++i) {
                float eps = (z[i] - a * x0[i]) / b;  // oracle: eps implied by the planted latent
                v[i] = a * eps - b * x0[i];
            }
            z = ddim_step_v(z, v, sch, t, ts[k + 1]);
        }
        double max_lat = 0, max_pix = 0;
        for (int64_t i = 0; i < z.numel(); ++i) max_lat = std::max(max_lat, double(std::abs(z[i] - x0[i])));
        Tensorf da = codec.decode_video(z), db = codec.decode_video(x0);
        for (int64_t i = 0; i < da.numel(); ++i) max_pix = std::max(max_pix, double(std::abs(da[i] - db[i])));
        require(max_lat < 1e-5, "latent max abs error " + std::to_string(max_lat));
        require(max_pix < 1e-4, "decoded pixel max abs error " + std::to_string(max_pix));
    });

    criterion(5, "analytic gradients of the weighted v-loss match finite differences per parameter group", [] {
        Model<double> model(tiny_net(), 31);
        require(model.params.count() <= 5000, "tiny instance exceeds the 5k parameter budget");
        Rng rng(32);
        const int64_t F = 2;
        Tensord ref_lat = Tensord::randn({4, 4, 4}, rng, 0.5);
        Tensord s_map = Tensord::randn({F, 3, 32, 32}, rng, 0.5);
        Tensord face_map = Tensord::randn({F, 3, 32, 32}, rng, 0.5);
        Tensord n_map = Tensord::randn({F, 3, 32, 32}, rng, 0.5);
        Tensord c_clip = Tensord::randn({3}, rng, 1.0);
        Tensord comp = Tensord::randn({F, 12, 4, 4}, rng, 1.0);
        Tensord vt = Tensord::randn({F, 4, 4, 4}, rng, 1.0);
        NoiseSchedule sch = make_schedule(1000, 1e-4, 0.02, true);
        const int t = 600;
        const double w = loss_weight(snr(sch, t));

        auto build = [&](Tape<double>& tp) {
            Bound<double> p = bind_params(model.params, tp);
            auto bank = model.write_bank_nodes(tp, p, tp.input(ref_lat.reshaped({1, 4, 4, 4})));
            int p_body = model.pose_guide_nodes(tp, p, tp.input(s_map), tp.input(face_map));
            int p_normal = model.normal_guide_nodes(tp, p, tp.input(n_map));
            int c_proj = model.project_nodes(tp, p, tp.input(c_clip));
            int v_pred =
                model.main_forward_nodes(tp, p, tp.input(comp), bank, c_proj, p_body, p_normal, t, Mode::Video3D);
            return std::pair<int, Bound<double>>(scale(tp, mse(tp, v_pred, tp.input(vt)), w), p);
        };
        Tape<double> tp;
        auto [loss, bound] = build(tp);
        tp.backward(loss);
        auto grads = collect_grads(bound, tp);

        const double h = 1e-5;
        bool checked_temporal = false;
        for (auto& [name, e] : model.params.entries) {
            checked_temporal = checked_temporal || e.temporal;
            std::set<int64_t> idx = {0, e.value.numel() - 1};
            for (int64_t i : idx) {
                double saved = e.value[i];
                auto eval = [&](double d) {
                    e.value[i] = saved + d;
                    Tape<double> t2;
                    return t2.val(build(t2).first)[0];
                };
                double fd = (eval(h) - eval(-h)) / (2.0 * h);
                e.value[i] = saved;
                double analytic = grads.count(name) ? grads.at(name)[i] : 0.0;
                double err = std::abs(fd - analytic) / std::max({1.0, std::abs(fd), std::abs(analytic)});
                require(err < 1e-3, "gradient mismatch in " + name + "[" + std::to_string(i) + "], rel err " +
                                        std::to_string(err));
            }
        }
        require(checked_temporal, "no temporal parameter group present");
    });

    criterion(6, "100-step stage-2 run leaves every spatial parameter bit-identical", [] {
        TempDir dir("acc_freeze");
        Manifest m = make_dataset(dir.path() / "d", "real", 2, 6, 61);
        LatentCodec codec(1);
        Model<float> model(tiny_net(), 62);
        TrainConfig cfg;
        cfg.T = 100;
        cfg.clip_length = 4;
        cfg.steps = 5;
        cfg.seed = 63;
        train_stage1(model, codec, m, cfg);
        std::map<std::string, Tensorf> snap;
        for (const auto& [name, e] : model.params.entries) snap[name] = e.value;
        cfg.steps = 100;
        cfg.seed = 64;
        train_stage2(model, codec, m, cfg);
        bool temporal_changed = false;
        for (const auto& [name, e] : model.params.entries) {
            for (int64_t i = 0; i < e.value.numel(); ++i) {
                if (e.temporal) {
                    temporal_changed = temporal_changed || e.value[i] != snap[name][i];
                } else {
                    require(e.value[i] == snap[name][i], "spatial parameter " + name + " changed");
                }
            }
        }
        require(temporal_changed, "no temporal parameter changed over 100 steps");
    });

    criterion(7, "200-step stage-1 runs reduce the 50-step moving-average loss for >=9/10 seeds", [] {
        TempDir dir("acc_progress");
        Manifest m = make_dataset(dir.path() / "d", "real", 4, 4, 71);
        LatentCodec codec(1);
        int improved = 0;
        for (uint64_t seed = 0; seed < 10; ++seed) {
            Model<float> model(tiny_net(), 700 + seed);
            TrainConfig cfg;
            cfg.T = 200;
            cfg.steps = 200;
            cfg.lr_stage1 = 3e-3;
            cfg.seed = seed;
            TrainRecord rec;
            train_stage1(model, codec, m, cfg, &rec);
            auto avg = [&](size_t lo, size_t hi) {
                double s = 0;
                for (size_t i = lo; i < hi; ++i) s += rec.rows[i].at("loss").get<double>();
                return s / double(hi - lo);
            };
            if (avg(150, 200) < avg(0, 50)) ++improved;
        }
        require(improved >= 9, "only " + std::to_string(improved) + "/10 seeds improved");
    });

    criterion(8, "top-n selection equals brute force on a 10^4 pool and is scale invariant", [] {
        Rng rng(81);
        Manifest pool;
        for (int i = 0; i < 10000; ++i) {
            ManifestEntry e;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "cand_%06d", i);
            e.id = buf;
            e.domain = "synthetic";
            e.frame_count = 1;
            std::vector<double> emb(8);
            for (auto& v : emb) v = rng.gaussian();
            e.embedding = emb;
            pool.push_back(std::move(e));
        }
        std::vector<std::vector<double>> targets;
        for (int k = 0; k < 3; ++k) {
            std::vector<double> t(8);
            for (auto& v : t) v = rng.gaussian();
            targets.push_back(t);
        }
        SelectionResult sel = select_top_n(targets, pool, 50);
        std::vector<std::pair<double, std::string>> scored;
        for (const auto& e : pool) {
            double best = -2;
            for (const auto& t : targets) best = std::max(best, cosine_similarity(t, *e.embedding));
            scored.push_back({best, e.id});
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (size_t i = 0; i < 50; ++i)
            require(sel.ids[i] == scored[i].second, "rank " + std::to_string(i) + " differs from brute force");
        Manifest scaled = pool;
        for (auto& e : scaled)
            for (auto& v : *e.embedding) v *= 4.2;
        std::vector<std::vector<double>> tscaled = targets;
        for (auto& t : tscaled)
            for (auto& v : t) v *= 0.3;
        require(select_top_n(tscaled, scaled, 50).ids == sel.ids, "selection not invariant to positive rescaling");
    });

    criterion(9, "ratios {0,1,2,4,8}:1 with |real|=10 produce exact synthetic counts, all real retained", [] {
        Rng rng(91);
        Manifest real, synth;
        for (int i = 0; i < 10; ++i) {
            ManifestEntry e;
            e.id = "real_" + std::to_string(i);
            e.domain = "real";
            e.frame_count = 1;
            real.push_back(e);
        }
        for (int i = 0; i < 100; ++i) {
            ManifestEntry e;
            e.id = "syn_" + std::to_string(i);
            e.domain = "synthetic";
            e.frame_count = 1;
            synth.push_back(e);
        }
        for (int ratio : {0, 1, 2, 4, 8}) {
            Manifest mixed = mix_datasets(real, synth, ratio, 1, 92);
            int nr = 0, ns = 0;
            std::set<std::string> ids;
            for (const auto& e : mixed) {
                (e.domain == "real" ? nr : ns)++;
                ids.insert(e.id);
            }
            require(nr == 10, "real count wrong at ratio " + std::to_string(ratio));
            require(ns == ratio * 10, "synthetic count wrong at ratio " + std::to_string(ratio));
            require(ids.size() == mixed.size(), "duplicate entries at ratio " + std::to_string(ratio));
            for (const auto& e : real) require(ids.count(e.id) == 1, "real entry dropped: " + e.id);
        }
    });

    criterion(10, "metric oracles: SSIM identity, Frechet analytic Gaussians, PSNR 20 dB", [] {
        Tensorf v = uniform_video({1, 3, 16, 16}, 103);
        require(std::abs(ssim(v, v) - 1.0) < 1e-9, "SSIM(a,a) != 1");

        Rng rng(104);
        const int n = 10000, k = 4;
        auto draw = [&](double mean, double stddev) {
            std::vector<std::vector<double>> s;
            for (int i = 0; i < n; ++i) {
                std::vector<double> f(k);
                for (auto& x : f) x = mean + stddev * rng.gaussian();
                s.push_back(std::move(f));
            }
            return s;
        };
        auto base = draw(0, 1);
        require(frechet_distance(base, base) <= 1e-6, "Frechet of identical sets > 1e-6");
        double shift = frechet_distance(base, draw(1, 1));
        require(std::abs(shift - 4.0) < 0.08, "mean-shift case off by >2%: " + std::to_string(shift));
        double wide = frechet_distance(base, draw(0, 2));
        require(std::abs(wide - double(k)) < 0.08, "variance case off by >2%: " + std::to_string(wide));

        Tensord x = Tensord::zeros({1, 3, 16, 16});
        Tensord y = Tensord::full({1, 3, 16, 16}, 0.1);
        require(std::abs(psnr(x, y) - 20.0) < 1e-9, "PSNR of MSE=0.01 pair not 20 dB");
    });

    // shared setup for the experiment-protocol criteria
    TempDir exp_dir("acc_experiments");
    Manifest real = make_dataset(exp_dir.path() / "real", "real", 4, 6, 111);
    Manifest synth = make_dataset(exp_dir.path() / "synth", "synthetic", 40, 6, 112);
    Manifest eval_set = make_dataset(exp_dir.path() / "eval", "real", 2, 4, 113);
    save_manifest(exp_dir.path() / "real.jsonl", real);
    save_manifest(exp_dir.path() / "synth.jsonl", synth);
    save_manifest(exp_dir.path() / "eval.jsonl", eval_set);

    auto toy_plan = [&](const std::string& kind, const std::string& out) {
        ExperimentPlan p;
        p.kind = kind;
        p.real_manifest = exp_dir.path() / "real.jsonl";
        p.synthetic_manifest = exp_dir.path() / "synth.jsonl";
        p.eval_manifest = exp_dir.path() / "eval.jsonl";
        p.out_dir = exp_dir.path() / out;
        p.net = tiny_net();
        p.train.T = 100;
        p.train.clip_length = 4;
        p.stage1_steps = 6;
        p.stage2_steps = 4;
        p.finetune_steps = 3;
        p.sample_steps = 4;
        p.select_n = 3;
        p.seed = 114;
        return p;
    };

    criterion(11, "experiment runner reproduces the three table layouts and the radar normalization rule", [&] {
        ExperimentReport t1 = run_experiment(toy_plan("finetune", "t1"));
        require(t1.rows.size() == 2 && t1.rows[0].first == "Baseline" && t1.rows[1].first == "Finetuned",
                "finetune rows are not Baseline/Finetuned");
        require(t1.include_fvd && t1.label_header == "Model", "finetune table header wrong");
        std::string md1 = t1.to_markdown();
        for (const char* col : {"PSNR↑", "SSIM↑", "LPIPS↓", "FVD↓", "CSIM↑"})
            require(md1.find(col) != std::string::npos, std::string("finetune table missing column ") + col);

        ExperimentReport t2 = run_experiment(toy_plan("ratio_scale", "t2"));
        std::vector<std::string> want = {"0:1", "1:1", "2:1", "4:1", "8:1"};
        require(t2.rows.size() == want.size(), "ratio_scale row count wrong");
        for (size_t i = 0; i < want.size(); ++i)
            require(t2.rows[i].first == want[i], "ratio label mismatch: " + t2.rows[i].first);
        require(t2.label_header == "Sim:real distribution", "ratio_scale table header wrong");
        require(!t2.radar.is_null(), "ratio_scale report missing radar data");
        bool saw_zero_row = false;
        for (const auto& row : t2.radar.at("rows")) {
            saw_zero_row = saw_zero_row || row.at("label") == "0:1";
            for (const auto& [name, v] : row.at("values").items()) {
                double d = v.get<double>();
                require(d >= 0.0 && d <= 1.0, "radar value out of [0,1] for " + name);
            }
        }
        require(saw_zero_row, "radar lost the 0:1 normalization row");

        ExperimentReport t3 = run_experiment(toy_plan("targeted_select", "t3"));
        require(t3.rows.size() == 3 && t3.rows[0].first == "Random" && t3.rows[1].first == "Manual" &&
                    t3.rows[2].first == "CLIP-sim",
                "targeted_select rows are not Random/Manual/CLIP-sim");
        require(!t3.include_fvd, "targeted_select table must omit FVD");
        require(t3.to_markdown().find("FVD") == std::string::npos, "targeted_select markdown contains FVD");
    });

    criterion(12, "re-running a plan with the same seed reproduces every metric within 1e-5", [&] {
        ExperimentReport a = run_experiment(toy_plan("finetune", "det_a"));
        ExperimentReport b = run_experiment(toy_plan("finetune", "det_b"));
        require(a.rows.size() == b.rows.size(), "row count differs across reruns");
        for (size_t i = 0; i < a.rows.size(); ++i) {
            const auto& ma = a.rows[i].second;
            const auto& mb = b.rows[i].second;
            require(std::abs(ma.psnr - mb.psnr) < 1e-5 && std::abs(ma.ssim - mb.ssim) < 1e-5 &&
                        std::abs(ma.frechet - mb.frechet) < 1e-5 && std::abs(ma.csim - mb.csim) < 1e-5,
                    "metrics differ for row " + a.rows[i].first);
        }
    });

    std::printf("%s: %d/12 criteria passed\n", g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL",
                12 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
