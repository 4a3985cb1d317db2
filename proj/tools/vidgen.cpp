// vidgen: one binary, subcommand style, orchestrating data generation,
// curation, training, sampling, evaluation and the three paper-shaped
// experiments.
//
// Exit codes: 0 success, 2 config/schema error (bad JSON, bad plan, bad
// flags), 3 runtime failure (I/O, numerical aborts).

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <numeric>

#include "vidgen/experiments.hpp"
#include "vidgen/image.hpp"
#include "vidgen/toydata.hpp"

using namespace vidgen;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

nlohmann::json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open " + path);
    return nlohmann::json::parse(is);
}

Model<float> load_model(const std::string& path, Checkpoint& meta) { return load_checkpoint(path, &meta); }

std::vector<int64_t> all_frames(const ManifestEntry& e, int64_t cap) {
    std::vector<int64_t> f(size_t(std::min(e.frame_count, cap)));
    std::iota(f.begin(), f.end(), int64_t(0));
    return f;
}

const ManifestEntry& find_entry(const Manifest& m, const std::string& id) {
    for (const auto& e : m)
        if (e.id == id) return e;
    throw std::invalid_argument("id " + id + " not found in manifest");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toy controllable human-video diffusion harness"};
    app.require_subcommand(1);

    // ---- gen-data ----
    auto* gen = app.add_subcommand("gen-data", "generate a toy dataset from a spec file");
    std::string gen_spec, gen_out;
    uint64_t gen_seed = 0;
    gen->add_option("--spec", gen_spec, "dataset spec JSON")->required();
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--seed", gen_seed, "RNG seed");

    // ---- mix ----
    auto* mix = app.add_subcommand("mix", "mix real and synthetic manifests at a sim:real ratio");
    std::string mix_real, mix_syn, mix_out;
    int mix_rs = 0, mix_rr = 1;
    uint64_t mix_seed = 0;
    mix->add_option("--real", mix_real)->required();
    mix->add_option("--synthetic", mix_syn)->required();
    mix->add_option("--ratio-syn", mix_rs)->required();
    mix->add_option("--ratio-real", mix_rr);
    mix->add_option("--out", mix_out)->required();
    mix->add_option("--seed", mix_seed);

    // ---- select ----
    auto* sel = app.add_subcommand("select", "select synthetic entries (random/manual/clip_sim)");
    std::string sel_strategy, sel_cands, sel_targets, sel_out;
    std::vector<std::string> sel_ids;
    size_t sel_n = 5;
    uint64_t sel_seed = 0;
    sel->add_option("--strategy", sel_strategy, "random|manual|clip_sim")->required();
    sel->add_option("--candidates", sel_cands)->required();
    sel->add_option("--n", sel_n);
    sel->add_option("--targets", sel_targets, "target manifest (clip_sim)");
    sel->add_option("--ids", sel_ids, "manual id list");
    sel->add_option("--out", sel_out, "output manifest path")->required();
    sel->add_option("--seed", sel_seed);

    // ---- train ----
    auto* tr = app.add_subcommand("train", "run stage1/stage2/finetune training");
    std::string tr_stage, tr_data, tr_cfg, tr_net, tr_in, tr_out, tr_record;
    uint64_t tr_seed = 0;
    int tr_steps = -1;
    tr->add_option("--stage", tr_stage, "stage1|stage2|finetune")->required();
    tr->add_option("--data", tr_data, "training manifest")->required();
    tr->add_option("--config", tr_cfg, "TrainConfig JSON");
    tr->add_option("--net", tr_net, "NetConfig JSON (stage1 only)");
    tr->add_option("--checkpoint-in", tr_in, "input checkpoint (stage2/finetune)");
    tr->add_option("--checkpoint-out", tr_out)->required();
    tr->add_option("--record", tr_record, "JSONL loss record path");
    tr->add_option("--seed", tr_seed);
    tr->add_option("--steps", tr_steps, "override config step count");

    // ---- sample ----
    auto* sa = app.add_subcommand("sample", "DDIM-sample one manifest entry");
    std::string sa_ckpt, sa_manifest, sa_id, sa_out;
    int sa_steps = 50;
    uint64_t sa_seed = 0;
    sa->add_option("--checkpoint", sa_ckpt)->required();
    sa->add_option("--manifest", sa_manifest)->required();
    sa->add_option("--id", sa_id)->required();
    sa->add_option("--steps", sa_steps);
    sa->add_option("--out", sa_out, "output frame directory")->required();
    sa->add_option("--seed", sa_seed);

    // ---- evaluate ----
    auto* ev = app.add_subcommand("evaluate", "evaluate a checkpoint on an eval manifest");
    std::string ev_ckpt, ev_manifest, ev_out;
    int ev_steps = 50;
    uint64_t ev_seed = 0;
    ev->add_option("--checkpoint", ev_ckpt)->required();
    ev->add_option("--eval", ev_manifest)->required();
    ev->add_option("--steps", ev_steps);
    ev->add_option("--out", ev_out, "metrics JSON path")->required();
    ev->add_option("--seed", ev_seed);

    // ---- run-experiment ----
    auto* rx = app.add_subcommand("run-experiment", "run a plan file end to end");
    std::string rx_plan;
    uint64_t rx_seed = 0;
    bool rx_seed_set = false;
    rx->add_option("--plan", rx_plan, "ExperimentPlan JSON")->required();
    rx->add_option("--seed", rx_seed, "override plan seed")->each([&](const std::string&) { rx_seed_set = true; });

    // ---- report ----
    auto* rp = app.add_subcommand("report", "merge run reports into one table (+ radar data)");
    std::vector<std::string> rp_dirs;
    std::string rp_out;
    rp->add_option("dirs", rp_dirs, "run directories containing report.json")->required();
    rp->add_option("--out", rp_out, "write merged report JSON here (table prints to stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gen) {
            ToyDatasetSpec spec = ToyDatasetSpec::from_json(read_json(gen_spec));
            Manifest m = generate_toy_dataset(spec, gen_seed, gen_out);
            save_manifest(std::filesystem::path(gen_out) / "manifest.jsonl", m);
            std::cout << "wrote " << m.size() << " entries under " << gen_out << "\n";
        } else if (*mix) {
            Manifest m = mix_datasets(load_manifest(mix_real), load_manifest(mix_syn), mix_rs, mix_rr, mix_seed);
            save_manifest(mix_out, m);
            std::cout << "wrote " << m.size() << " entries to " << mix_out << "\n";
        } else if (*sel) {
            Manifest cands = load_manifest(sel_cands);
            SelectionResult r;
            if (sel_strategy == "random") {
                r = select_random(cands, sel_n, sel_seed);
            } else if (sel_strategy == "manual") {
                r = select_manual(cands, sel_ids);
            } else if (sel_strategy == "clip_sim") {
                if (sel_targets.empty()) throw std::invalid_argument("clip_sim requires --targets");
                embed_manifest(cands);
                std::vector<std::vector<double>> targets;
                for (const auto& e : load_manifest(sel_targets)) targets.push_back(embed_video(e));
                r = select_top_n(targets, cands, sel_n);
            } else {
                throw std::invalid_argument("unknown strategy " + sel_strategy);
            }
            save_manifest(sel_out, subset_by_ids(cands, r.ids));
            nlohmann::json j{{"strategy", r.strategy}, {"ids", r.ids}, {"scores", r.scores}};
            std::cout << j.dump(2) << "\n";
        } else if (*tr) {
            TrainConfig cfg = tr_cfg.empty() ? TrainConfig{} : TrainConfig::from_json(read_json(tr_cfg));
            cfg.seed = tr_seed;
            if (tr_steps >= 0) cfg.steps = tr_steps;
            Manifest data = load_manifest(tr_data);
            Checkpoint meta;
            TrainRecord rec;
            if (tr_stage == "stage1") {
                NetConfig net = tr_net.empty() ? NetConfig{} : NetConfig::from_json(read_json(tr_net));
                Model<float> model(net, tr_seed);
                LatentCodec codec(meta.codec_seed);
                train_stage1(model, codec, data, cfg, &rec);
                meta.stage = "stage1";
                meta.net = net;
                meta.schedule = make_schedule(cfg.T, cfg.beta_lo, cfg.beta_hi, cfg.zero_terminal_snr);
                save_checkpoint(tr_out, model, meta);
            } else if (tr_stage == "stage2" || tr_stage == "finetune") {
                if (tr_in.empty()) throw std::invalid_argument(tr_stage + " requires --checkpoint-in");
                Model<float> model = load_checkpoint(tr_in, &meta);
                LatentCodec codec(meta.codec_seed);
                if (tr_stage == "stage2")
                    train_stage2(model, codec, data, cfg, &rec);
                else
                    finetune(model, codec, data, cfg, &rec);
                meta.stage = tr_stage;
                save_checkpoint(tr_out, model, meta);
            } else {
                throw std::invalid_argument("unknown stage " + tr_stage);
            }
            if (!tr_record.empty()) rec.save(tr_record);
            std::cout << "wrote " << tr_out << "\n";
        } else if (*sa) {
            Checkpoint meta;
            Model<float> model = load_model(sa_ckpt, meta);
            LatentCodec codec(meta.codec_seed);
            Manifest m = load_manifest(sa_manifest);
            const ManifestEntry& e = find_entry(m, sa_id);
            Mode mode = meta.stage == "stage1" ? Mode::Image2D : Mode::Video3D;
            Tensorf video = sample_video(model, codec, meta.schedule, e,
                                         all_frames(e, meta.net.temporal_max_len), sa_steps, sa_seed, mode);
            write_video_frames(sa_out, video);
            std::cout << "wrote " << video.dim(0) << " frames to " << sa_out << "\n";
        } else if (*ev) {
            Checkpoint meta;
            Model<float> model = load_model(ev_ckpt, meta);
            LatentCodec codec(meta.codec_seed);
            Manifest eval_set = load_manifest(ev_manifest);
            Mode mode = meta.stage == "stage1" ? Mode::Image2D : Mode::Video3D;
            for (auto& e : eval_set) e.frame_count = std::min<int64_t>(e.frame_count, meta.net.temporal_max_len);
            VideoGenerator gen_fn = [&](const ManifestEntry& e) {
                return sample_video(model, codec, meta.schedule, e, all_frames(e, meta.net.temporal_max_len),
                                    ev_steps, ev_seed ^ hash_str(e.id.c_str()), mode);
            };
            MetricReport r = evaluate(gen_fn, eval_set);
            if (std::filesystem::path(ev_out).has_parent_path())
                std::filesystem::create_directories(std::filesystem::path(ev_out).parent_path());
            std::ofstream(ev_out) << r.to_json().dump(2) << "\n";
            std::cout << render_table({{"model", r.aggregate}});
        } else if (*rx) {
            ExperimentPlan plan = load_plan(rx_plan);
            if (rx_seed_set) plan.seed = rx_seed;
            ExperimentReport rep = run_experiment(plan);
            std::cout << rep.to_markdown();
        } else if (*rp) {
            std::vector<std::filesystem::path> dirs(rp_dirs.begin(), rp_dirs.end());
            ExperimentReport rep = merge_reports(dirs);
            if (!rp_out.empty()) std::ofstream(rp_out) << rep.to_json().dump(2) << "\n";
            std::cout << rep.to_markdown();
            if (!rep.radar.is_null()) std::cout << "\nradar:\n" << rep.radar.dump(2) << "\n";
        }
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
