#include "vidgen/image.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vidgen {

namespace {

uint8_t quantize(float v) {
    float c = std::min(1.0f, std::max(0.0f, v));
    return uint8_t(std::lround(c * 255.0f));
}

void write_pnm(const std::filesystem::path& path, const Tensorf& image, int channels, const char* magic) {
    if (image.ndim() != 3 || image.dim(0) != channels)
        throw std::invalid_argument("write_pnm: bad shape " + image.shape_str());
    int64_t H = image.dim(1), W = image.dim(2);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_pnm: cannot open " + path.string());
    f << magic << "\n" << W << " " << H << "\n255\n";
    std::vector<uint8_t> row(size_t(W * channels));
    for (int64_t y = 0; y < H; ++y) {
        for (int64_t x = 0; x < W; ++x)
            for (int64_t c = 0; c < channels; ++c) row[size_t(x * channels + c)] = quantize(image[(c * H + y) * W + x]);
        f.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size()));
    }
}

Tensorf read_pnm(const std::filesystem::path& path, int channels, const char* magic) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_pnm: cannot open " + path.string());
    std::string m;
    int64_t W = 0, H = 0, maxv = 0;
    f >> m >> W >> H >> maxv;
    if (m != magic || maxv != 255) throw std::runtime_error("read_pnm: unsupported format in " + path.string());
    f.get();  // single whitespace after header
    Tensorf image({channels, H, W});
    std::vector<uint8_t> row(size_t(W * channels));
    for (int64_t y = 0; y < H; ++y) {
        f.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size()));
        if (!f) throw std::runtime_error("read_pnm: truncated file " + path.string());
        for (int64_t x = 0; x < W; ++x)
            for (int64_t c = 0; c < channels; ++c)
                image[(c * H + y) * W + x] = float(row[size_t(x * channels + c)]) / 255.0f;
    }
    return image;
}

std::filesystem::path frame_path(const std::filesystem::path& dir, int64_t f) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03lld.ppm", (long long)f);
    return dir / buf;
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const Tensorf& image) { write_pnm(path, image, 3, "P6"); }
Tensorf read_ppm(const std::filesystem::path& path) { return read_pnm(path, 3, "P6"); }
void write_pgm(const std::filesystem::path& path, const Tensorf& image) { write_pnm(path, image, 1, "P5"); }
Tensorf read_pgm(const std::filesystem::path& path) { return read_pnm(path, 1, "P5"); }

Tensorf to_gray(const Tensorf& image) {
    int64_t H = image.dim(1), W = image.dim(2);
    Tensorf g({1, H, W});
    for (int64_t p = 0; p < H * W; ++p)
        g[p] = 0.299f * image[p] + 0.587f * image[H * W + p] + 0.114f * image[2 * H * W + p];
    return g;
}

Tensorf downsample_box(const Tensorf& image, int64_t out_h, int64_t out_w) {
    int64_t C = image.dim(0), H = image.dim(1), W = image.dim(2);
    if (H % out_h != 0 || W % out_w != 0) throw std::invalid_argument("downsample_box: dims must divide");
    int64_t by = H / out_h, bx = W / out_w;
    Tensorf out({C, out_h, out_w});
    for (int64_t c = 0; c < C; ++c)
        for (int64_t oy = 0; oy < out_h; ++oy)
            for (int64_t ox = 0; ox < out_w; ++ox) {
                float acc = 0.0f;
                for (int64_t y = 0; y < by; ++y)
                    for (int64_t x = 0; x < bx; ++x) acc += image[(c * H + oy * by + y) * W + ox * bx + x];
                out[(c * out_h + oy) * out_w + ox] = acc / float(by * bx);
            }
    return out;
}

void write_video_frames(const std::filesystem::path& dir, const Tensorf& video) {
    std::filesystem::create_directories(dir);
    int64_t F = video.dim(0), C = video.dim(1), H = video.dim(2), W = video.dim(3);
    for (int64_t f = 0; f < F; ++f) {
        Tensorf frame({C, H, W});
        std::copy(video.data.begin() + f * C * H * W, video.data.begin() + (f + 1) * C * H * W,
                  frame.data.begin());
        if (C == 3)
            write_ppm(frame_path(dir, f), frame);
        else
            write_pgm(dir / (frame_path(dir, f).stem().string() + ".pgm"), frame);
    }
}

Tensorf read_video_frames(const std::filesystem::path& dir, const std::vector<int64_t>& frame_indices) {
    Tensorf out;
    for (size_t i = 0; i < frame_indices.size(); ++i) {
        std::filesystem::path p = frame_path(dir, frame_indices[i]);
        Tensorf frame = std::filesystem::exists(p) ? read_ppm(p)
                                                   : read_pgm(dir / (p.stem().string() + ".pgm"));
        if (i == 0) out = Tensorf({int64_t(frame_indices.size()), frame.dim(0), frame.dim(1), frame.dim(2)});
        std::copy(frame.data.begin(), frame.data.end(), out.data.begin() + int64_t(i) * frame.numel());
    }
    return out;
}

Tensorf read_video_frames(const std::filesystem::path& dir, int64_t frame_count) {
    std::vector<int64_t> idx(static_cast<size_t>(frame_count), 0);
    for (int64_t i = 0; i < frame_count; ++i) idx[size_t(i)] = i;
    return read_video_frames(dir, idx);
}

}  // namespace vidgen
