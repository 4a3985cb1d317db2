#include "vidgen/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>

namespace vidgen {

nlohmann::json ExperimentPlan::to_json() const {
    return {{"kind", kind},
            {"real_manifest", real_manifest.string()},
            {"synthetic_manifest", synthetic_manifest.string()},
            {"eval_manifest", eval_manifest.string()},
            {"out_dir", out_dir.string()},
            {"net", net.to_json()},
            {"train", train.to_json()},
            {"stage1_steps", stage1_steps},
            {"stage2_steps", stage2_steps},
            {"finetune_steps", finetune_steps},
            {"sample_steps", sample_steps},
            {"select_n", select_n},
            {"ratios", ratios},
            {"manual_ids", manual_ids},
            {"seed", seed},
            {"codec_seed", codec_seed}};
}

ExperimentPlan ExperimentPlan::from_json(const nlohmann::json& j) {
    ExperimentPlan p;
    p.kind = j.at("kind").get<std::string>();
    if (p.kind != "finetune" && p.kind != "ratio_scale" && p.kind != "targeted_select")
        throw std::invalid_argument("plan: unknown kind \"" + p.kind +
                                    "\" (expected finetune|ratio_scale|targeted_select)");
    p.real_manifest = j.at("real_manifest").get<std::string>();
    p.synthetic_manifest = j.at("synthetic_manifest").get<std::string>();
    p.eval_manifest = j.at("eval_manifest").get<std::string>();
    p.out_dir = j.at("out_dir").get<std::string>();
    if (j.contains("net")) p.net = NetConfig::from_json(j.at("net"));
    if (j.contains("train")) p.train = TrainConfig::from_json(j.at("train"));
    p.stage1_steps = j.value("stage1_steps", p.stage1_steps);
    p.stage2_steps = j.value("stage2_steps", p.stage2_steps);
    p.finetune_steps = j.value("finetune_steps", p.finetune_steps);
    p.sample_steps = j.value("sample_steps", p.sample_steps);
    p.select_n = j.value("select_n", p.select_n);
    p.ratios = j.value("ratios", p.ratios);
    p.manual_ids = j.value("manual_ids", p.manual_ids);
    p.seed = j.value("seed", p.seed);
    p.codec_seed = j.value("codec_seed", p.codec_seed);
    if (p.stage1_steps < 0 || p.stage2_steps < 0 || p.finetune_steps < 0 || p.sample_steps < 1 || p.select_n < 1)
        throw std::invalid_argument("plan: negative step count or nonpositive sample_steps/select_n");
    return p;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("plan: cannot open " + path.string());
    return ExperimentPlan::from_json(nlohmann::json::parse(is));
}

nlohmann::json ExperimentReport::to_json() const {
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& [label, m] : rows) jr.push_back({{"label", label}, {"metrics", m.to_json()}});
    nlohmann::json j{{"kind", kind}, {"label_header", label_header}, {"include_fvd", include_fvd}, {"rows", jr}};
    if (!radar.is_null()) j["radar"] = radar;
    return j;
}

std::string ExperimentReport::to_markdown() const { return render_table(rows, include_fvd, label_header); }

nlohmann::json normalize_radar(const std::vector<std::pair<std::string, AggregateMetrics>>& rows) {
    const AggregateMetrics* base = nullptr;
    for (const auto& [label, m] : rows)
        if (label == "0:1") base = &m;
    if (!base)
        throw std::invalid_argument(
            "radar: missing 0:1 row; sim:real=0:1 values are used as the normalization minimum");

    struct Metric {
        const char* name;
        bool invert;
        std::function<std::optional<double>(const AggregateMetrics&)> get;
    };
    std::vector<Metric> metrics = {
        {"psnr", false, [](const AggregateMetrics& m) { return std::optional<double>(m.psnr); }},
        {"ssim", false, [](const AggregateMetrics& m) { return std::optional<double>(m.ssim); }},
        {"lpips", true, [](const AggregateMetrics& m) { return m.perceptual; }},
        {"fvd", true, [](const AggregateMetrics& m) { return std::optional<double>(m.frechet); }},
        {"csim", false, [](const AggregateMetrics& m) { return std::optional<double>(m.csim); }},
    };

    nlohmann::json out;
    out["rule"] = "0:1 row as normalization min; LPIPS and FVD inverted after normalization";
    nlohmann::json jrows = nlohmann::json::array();
    for (const auto& [label, m] : rows) {
        nlohmann::json vals;
        for (const auto& mt : metrics) {
            auto v = mt.get(m), lo = mt.get(*base);
            if (!v || !lo) continue;  // LPIPS slot may be unplugged
            double hi = *lo;
            for (const auto& [l2, m2] : rows)
                if (auto v2 = mt.get(m2)) hi = std::max(hi, *v2);
            double n = hi > *lo ? (*v - *lo) / (hi - *lo) : 0.0;
            n = std::min(1.0, std::max(0.0, n));
            vals[mt.name] = mt.invert ? 1.0 - n : n;
        }
        jrows.push_back({{"label", label}, {"values", vals}});
    }
    out["rows"] = jrows;
    return out;
}

namespace {

std::string sanitize(const std::string& label) {
    std::string s = label;
    for (auto& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
    return s;
}

template <class F>
auto with_stage(const std::string& stage, F&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw std::runtime_error("[stage " + stage + "] " + e.what());
    }
}

struct Harness {
    const ExperimentPlan& plan;
    LatentCodec codec;
    NoiseSchedule schedule;

    explicit Harness(const ExperimentPlan& p)
        : plan(p),
          codec(p.codec_seed),
          schedule(make_schedule(p.train.T, p.train.beta_lo, p.train.beta_hi, p.train.zero_terminal_snr)) {}

    TrainConfig cfg_with(int steps, const std::string& label) const {
        TrainConfig c = plan.train;
        c.steps = steps;
        c.seed = plan.seed ^ hash_str(label.c_str());
        return c;
    }

    Model<float> train_model(const Manifest& data, const std::string& label) const {
        std::filesystem::path dir = plan.out_dir / sanitize(label);
        std::filesystem::create_directories(dir);
        Model<float> model(plan.net, plan.seed ^ hash_str(("init." + label).c_str()));
        TrainRecord rec;
        with_stage("stage1/" + label, [&] {
            train_stage1(model, codec, data, cfg_with(plan.stage1_steps, label + ".s1"), &rec);
        });
        with_stage("stage2/" + label, [&] {
            train_stage2(model, codec, data, cfg_with(plan.stage2_steps, label + ".s2"), &rec);
        });
        rec.save(dir / "record.jsonl");
        save_model(model, dir, "stage2");
        return model;
    }

    void save_model(const Model<float>& model, const std::filesystem::path& dir, const std::string& stage) const {
        Checkpoint meta;
        meta.stage = stage;
        meta.codec_seed = plan.codec_seed;
        meta.net = plan.net;
        meta.schedule = schedule;
        save_checkpoint(dir / "checkpoint.ckpt", model, meta);
    }

    AggregateMetrics eval_model(Model<float>& model, const std::string& label) const {
        return with_stage("evaluate/" + label, [&] {
            Manifest eval_set = load_manifest(plan.eval_manifest);
            uint64_t eseed = plan.seed ^ hash_str(("eval." + label).c_str());
            VideoGenerator gen = [&](const ManifestEntry& e) {
                int64_t F = std::min<int64_t>(e.frame_count, plan.net.temporal_max_len);
                std::vector<int64_t> frames(static_cast<size_t>(F), 0);
                std::iota(frames.begin(), frames.end(), int64_t(0));
                return sample_video(model, codec, schedule, e, frames, plan.sample_steps,
                                    eseed ^ hash_str(e.id.c_str()), Mode::Video3D);
            };
            // eval entries are truncated to the sampler's frame budget
            for (auto& e : eval_set) e.frame_count = std::min<int64_t>(e.frame_count, plan.net.temporal_max_len);
            MetricReport r = evaluate(gen, eval_set);
            std::filesystem::path dir = plan.out_dir / sanitize(label);
            std::filesystem::create_directories(dir);
            std::ofstream(dir / "metrics.json") << r.to_json().dump(2) << "\n";
            return r.aggregate;
        });
    }
};

ExperimentReport run_finetune(Harness& h) {
    const ExperimentPlan& plan = h.plan;
    Manifest real = load_manifest(plan.real_manifest);
    Manifest synth = load_manifest(plan.synthetic_manifest);
    ExperimentReport rep;
    rep.kind = "finetune";
    rep.label_header = "Model";
    Model<float> baseline = h.train_model(real, "baseline");
    rep.rows.emplace_back("Baseline", h.eval_model(baseline, "baseline"));
    Model<float> tuned = baseline;  // finetune continues from the baseline weights
    TrainRecord rec;
    with_stage("finetune", [&] {
        finetune(tuned, h.codec, synth, h.cfg_with(plan.finetune_steps, "finetune"), &rec);
    });
    std::filesystem::path dir = plan.out_dir / "finetuned";
    std::filesystem::create_directories(dir);
    rec.save(dir / "record.jsonl");
    h.save_model(tuned, dir, "finetune");
    rep.rows.emplace_back("Finetuned", h.eval_model(tuned, "finetuned"));
    return rep;
}

ExperimentReport run_ratio_scale(Harness& h) {
    const ExperimentPlan& plan = h.plan;
    Manifest real = load_manifest(plan.real_manifest);
    Manifest synth = load_manifest(plan.synthetic_manifest);
    ExperimentReport rep;
    rep.kind = "ratio_scale";
    rep.label_header = "Sim:real distribution";
    for (int r : plan.ratios) {
        std::string label = std::to_string(r) + ":1";
        Manifest mixed = with_stage("mix/" + label,
                                    [&] { return mix_datasets(real, synth, r, 1, plan.seed); });
        Model<float> model = h.train_model(mixed, "ratio_" + std::to_string(r));
        rep.rows.emplace_back(label, h.eval_model(model, "ratio_" + std::to_string(r)));
    }
    rep.radar = normalize_radar(rep.rows);
    return rep;
}

ExperimentReport run_targeted_select(Harness& h) {
    const ExperimentPlan& plan = h.plan;
    Manifest real = load_manifest(plan.real_manifest);
    Manifest synth = load_manifest(plan.synthetic_manifest);
    with_stage("embed", [&] { embed_manifest(synth); return 0; });

    std::vector<std::vector<double>> targets;
    with_stage("embed-targets", [&] {
        Manifest eval_set = load_manifest(plan.eval_manifest);
        for (const auto& e : eval_set) targets.push_back(embed_video(e));
        return 0;
    });

    std::vector<std::string> manual = plan.manual_ids;
    if (manual.empty()) {
        // deterministic stand-in for human inspection: first n ids
        std::vector<std::string> ids;
        for (const auto& e : synth) ids.push_back(e.id);
        std::sort(ids.begin(), ids.end());
        manual.assign(ids.begin(), ids.begin() + std::min<size_t>(size_t(plan.select_n), ids.size()));
    }

    struct Group {
        std::string label;
        SelectionResult sel;
    };
    std::vector<Group> groups;
    with_stage("select", [&] {
        groups.push_back({"Random", select_random(synth, size_t(plan.select_n), plan.seed)});
        groups.push_back({"Manual", select_manual(synth, manual)});
        groups.push_back({"CLIP-sim", select_top_n(targets, synth, size_t(plan.select_n))});
        return 0;
    });

    ExperimentReport rep;
    rep.kind = "targeted_select";
    rep.label_header = "Selection";
    rep.include_fvd = false;  // Table 3 omits FVD
    for (const auto& g : groups) {
        Manifest data = real;
        for (const auto& e : subset_by_ids(synth, g.sel.ids)) data.push_back(e);
        std::string dir_label = "select_" + sanitize(g.label);
        Model<float> model = h.train_model(data, dir_label);
        std::ofstream(plan.out_dir / sanitize(dir_label) / "selection.json")
            << nlohmann::json({{"strategy", g.sel.strategy}, {"ids", g.sel.ids}, {"scores", g.sel.scores}}).dump(2)
            << "\n";
        rep.rows.emplace_back(g.label, h.eval_model(model, dir_label));
    }
    return rep;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentPlan& plan) {
    std::filesystem::create_directories(plan.out_dir);
    Harness h(plan);
    ExperimentReport rep;
    if (plan.kind == "finetune")
        rep = run_finetune(h);
    else if (plan.kind == "ratio_scale")
        rep = run_ratio_scale(h);
    else if (plan.kind == "targeted_select")
        rep = run_targeted_select(h);
    else
        throw std::invalid_argument("run_experiment: unknown kind " + plan.kind);

    nlohmann::json j = rep.to_json();
    j["plan"] = plan.to_json();
    std::ofstream(plan.out_dir / "report.json") << j.dump(2) << "\n";
    std::ofstream(plan.out_dir / "report.md") << rep.to_markdown();
    return rep;
}

ExperimentReport merge_reports(const std::vector<std::filesystem::path>& run_dirs) {
    if (run_dirs.empty()) throw std::invalid_argument("merge_reports: no run dirs");
    ExperimentReport merged;
    merged.kind = "merged";
    merged.label_header = "Model";
    bool any_ratio = false;
    for (const auto& dir : run_dirs) {
        std::ifstream is(dir / "report.json");
        if (!is) throw std::invalid_argument("merge_reports: missing report.json in " + dir.string());
        nlohmann::json j = nlohmann::json::parse(is);
        if (j.at("kind") == "ratio_scale") any_ratio = true;
        if (!j.value("include_fvd", true)) merged.include_fvd = false;
        for (const auto& row : j.at("rows"))
            merged.rows.emplace_back(row.at("label").get<std::string>(),
                                     AggregateMetrics::from_json(row.at("metrics")));
    }
    if (run_dirs.size() == 1) {
        std::ifstream is(run_dirs[0] / "report.json");
        nlohmann::json j = nlohmann::json::parse(is);
        merged.kind = j.at("kind").get<std::string>();
        merged.label_header = j.value("label_header", merged.label_header);
    }
    if (any_ratio) merged.radar = normalize_radar(merged.rows);
    return merged;
}

}  // namespace vidgen
