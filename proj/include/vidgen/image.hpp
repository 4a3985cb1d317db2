#ifndef VIDGEN_IMAGE_HPP
#define VIDGEN_IMAGE_HPP

#include <filesystem>
#include <string>

#include "vidgen/tensor.hpp"

namespace vidgen {

// Images are Tensorf [3,H,W] (or [1,H,W] for masks) with values in [0,1].
// Media on disk is 8-bit binary PPM/PGM, one file per frame, so generated
// datasets are byte-identical across runs.

void write_ppm(const std::filesystem::path& path, const Tensorf& image);
Tensorf read_ppm(const std::filesystem::path& path);

void write_pgm(const std::filesystem::path& path, const Tensorf& image);  // [1,H,W]
Tensorf read_pgm(const std::filesystem::path& path);

// ITU-R 601 luma
Tensorf to_gray(const Tensorf& image);

// box-filter downsample to out_h x out_w (dims must divide)
Tensorf downsample_box(const Tensorf& image, int64_t out_h, int64_t out_w);

// video helpers: frames stored as <dir>/000.ppm, 001.ppm, ...
void write_video_frames(const std::filesystem::path& dir, const Tensorf& video);
Tensorf read_video_frames(const std::filesystem::path& dir, int64_t frame_count);
Tensorf read_video_frames(const std::filesystem::path& dir, const std::vector<int64_t>& frame_indices);

}  // namespace vidgen

#endif  // VIDGEN_IMAGE_HPP
