#include "vidgen/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace vidgen {

namespace {

constexpr char kMagic[8] = {'V', 'G', 'C', 'K', 'P', 'T', '1', '\0'};

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return v;
}

void put_floats(std::ostream& os, const std::vector<float>& v) {
    os.write(reinterpret_cast<const char*>(v.data()), std::streamsize(v.size() * sizeof(float)));
}

void get_floats(std::istream& is, std::vector<float>& v) {
    is.read(reinterpret_cast<char*>(v.data()), std::streamsize(v.size() * sizeof(float)));
    if (!is) throw std::runtime_error("checkpoint: truncated tensor payload");
}

nlohmann::json meta_to_json(const Checkpoint& m) {
    return {{"stage", m.stage},           {"step", m.step},
            {"codec_seed", m.codec_seed}, {"net", m.net.to_json()},
            {"schedule", m.schedule.to_json()}, {"extra", m.extra}};
}

Checkpoint meta_from_json(const nlohmann::json& j) {
    Checkpoint m;
    m.stage = j.at("stage").get<std::string>();
    m.step = j.at("step").get<int64_t>();
    m.codec_seed = j.at("codec_seed").get<uint64_t>();
    m.net = NetConfig::from_json(j.at("net"));
    m.schedule = NoiseSchedule::from_json(j.at("schedule"));
    m.extra = j.value("extra", nlohmann::json::object());
    return m;
}

nlohmann::json read_header(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("checkpoint: bad magic");
    uint64_t len = get<uint64_t>(is);
    std::string buf(len, '\0');
    is.read(buf.data(), std::streamsize(len));
    if (!is) throw std::runtime_error("checkpoint: truncated metadata");
    return nlohmann::json::parse(buf);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model<float>& model, const Checkpoint& meta) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
    os.write(kMagic, 8);
    nlohmann::json j = meta_to_json(meta);
    j["init_seed"] = model.params.init_seed;
    std::string buf = j.dump();
    put<uint64_t>(os, buf.size());
    os.write(buf.data(), std::streamsize(buf.size()));
    put<uint64_t>(os, model.params.entries.size());
    for (const auto& [name, e] : model.params.entries) {
        put<uint32_t>(os, uint32_t(name.size()));
        os.write(name.data(), std::streamsize(name.size()));
        put<uint8_t>(os, e.temporal ? 1 : 0);
        uint8_t has_adam = e.m.numel() > 0 ? 1 : 0;
        put<uint8_t>(os, has_adam);
        put<uint32_t>(os, uint32_t(e.value.ndim()));
        for (int64_t d : e.value.shape) put<int64_t>(os, d);
        put_floats(os, e.value.data);
        if (has_adam) {
            put_floats(os, e.m.data);
            put_floats(os, e.v.data);
        }
    }
    if (!os) throw std::runtime_error("checkpoint: write failure at " + path.string());
}

Checkpoint load_checkpoint_meta(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
    return meta_from_json(read_header(is));
}

Model<float> load_checkpoint(const std::filesystem::path& path, Checkpoint* meta_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path.string());
    nlohmann::json j = read_header(is);
    Checkpoint meta = meta_from_json(j);
    Model<float> model(meta.net, j.value("init_seed", uint64_t(0)));

    uint64_t n = get<uint64_t>(is);
    if (n != model.params.entries.size())
        throw std::runtime_error("checkpoint: tensor count mismatch with network config");
    for (uint64_t i = 0; i < n; ++i) {
        uint32_t name_len = get<uint32_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), std::streamsize(name_len));
        bool temporal = get<uint8_t>(is) != 0;
        bool has_adam = get<uint8_t>(is) != 0;
        uint32_t ndim = get<uint32_t>(is);
        std::vector<int64_t> shape(ndim);
        for (auto& d : shape) d = get<int64_t>(is);

        auto it = model.params.entries.find(name);
        if (it == model.params.entries.end()) throw std::runtime_error("checkpoint: unknown tensor " + name);
        auto& e = it->second;
        if (e.temporal != temporal) throw std::runtime_error("checkpoint: temporal tag mismatch for " + name);
        if (e.value.shape != shape) throw std::runtime_error("checkpoint: shape mismatch for " + name);
        get_floats(is, e.value.data);
        if (has_adam) {
            e.m = Tensorf::zeros(shape);
            e.v = Tensorf::zeros(shape);
            get_floats(is, e.m.data);
            get_floats(is, e.v.data);
        }
    }
    if (meta_out) *meta_out = std::move(meta);
    return model;
}

}  // namespace vidgen
