#ifndef VIDGEN_CODEC_HPP
#define VIDGEN_CODEC_HPP

#include <Eigen/Dense>
#include <stdexcept>

#include "vidgen/rng.hpp"
#include "vidgen/tensor.hpp"

namespace vidgen {

// Toy latent codec: a fixed, seeded orthonormal linear map from each 8x8x3
// image patch (192 values) to 4 latent channels at the corresponding grid
// cell. Decoding is the transpose, so decode-then-encode is the identity on
// the codec's range and the downsampling factor is exactly 8.
class LatentCodec {
public:
    static constexpr int kPatch = 8;
    static constexpr int kLatentChannels = 4;
    static constexpr int kPatchDim = kPatch * kPatch * 3;

    explicit LatentCodec(uint64_t seed = 0x1234abcd) : seed_(seed) {
        Rng rng(seed ^ 0xc0dec0dec0dec0deull);
        Eigen::MatrixXd g(kPatchDim, kLatentChannels);
        for (int i = 0; i < kPatchDim; ++i)
            for (int j = 0; j < kLatentChannels; ++j) g(i, j) = rng.gaussian();
        // orthonormal columns via thin QR
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(kPatchDim, kLatentChannels);
        basis_ = q.cast<float>();
    }

    uint64_t seed() const { return seed_; }

    // image [3,H,W] -> latent [4,H/8,W/8]
    Tensorf encode(const Tensorf& image) const {
        if (image.ndim() != 3 || image.dim(0) != 3) throw std::invalid_argument("encode: expected [3,H,W]");
        int64_t H = image.dim(1), W = image.dim(2);
        if (H % kPatch != 0 || W % kPatch != 0) throw std::invalid_argument("encode: dims must be divisible by 8");
        int64_t h = H / kPatch, w = W / kPatch;
        Tensorf z({kLatentChannels, h, w});
        Eigen::VectorXf patch(kPatchDim);
        for (int64_t gy = 0; gy < h; ++gy)
            for (int64_t gx = 0; gx < w; ++gx) {
                int k = 0;
                for (int64_t c = 0; c < 3; ++c)
                    for (int64_t py = 0; py < kPatch; ++py)
                        for (int64_t px = 0; px < kPatch; ++px)
                            patch(k++) = image[(c * H + gy * kPatch + py) * W + gx * kPatch + px];
                Eigen::VectorXf lat = basis_.transpose() * patch;
                for (int64_t c = 0; c < kLatentChannels; ++c) z[(c * h + gy) * w + gx] = lat(int(c));
            }
        return z;
    }

    // latent [4,h,w] -> image [3,8h,8w]
    Tensorf decode(const Tensorf& latent) const {
        if (latent.ndim() != 3 || latent.dim(0) != kLatentChannels)
            throw std::invalid_argument("decode: expected [4,h,w]");
        int64_t h = latent.dim(1), w = latent.dim(2);
        int64_t H = h * kPatch, W = w * kPatch;
        Tensorf img({3, H, W});
        Eigen::VectorXf lat(kLatentChannels);
        for (int64_t gy = 0; gy < h; ++gy)
            for (int64_t gx = 0; gx < w; ++gx) {
                for (int64_t c = 0; c < kLatentChannels; ++c) lat(int(c)) = latent[(c * h + gy) * w + gx];
                Eigen::VectorXf patch = basis_ * lat;
                int k = 0;
                for (int64_t c = 0; c < 3; ++c)
                    for (int64_t py = 0; py < kPatch; ++py)
                        for (int64_t px = 0; px < kPatch; ++px)
                            img[(c * H + gy * kPatch + py) * W + gx * kPatch + px] = patch(k++);
            }
        return img;
    }

    // video [F,3,H,W] -> [F,4,h,w]
    Tensorf encode_video(const Tensorf& video) const {
        int64_t F = video.dim(0), H = video.dim(2), W = video.dim(3);
        Tensorf out({F, kLatentChannels, H / kPatch, W / kPatch});
        for (int64_t f = 0; f < F; ++f) {
            Tensorf frame({3, H, W});
            std::copy(video.data.begin() + f * 3 * H * W, video.data.begin() + (f + 1) * 3 * H * W,
                      frame.data.begin());
            Tensorf z = encode(frame);
            std::copy(z.data.begin(), z.data.end(), out.data.begin() + f * z.numel());
        }
        return out;
    }

    Tensorf decode_video(const Tensorf& latents) const {
        int64_t F = latents.dim(0), h = latents.dim(2), w = latents.dim(3);
        Tensorf out({F, 3, h * kPatch, w * kPatch});
        for (int64_t f = 0; f < F; ++f) {
            Tensorf z({kLatentChannels, h, w});
            std::copy(latents.data.begin() + f * z.numel(), latents.data.begin() + (f + 1) * z.numel(),
                      z.data.begin());
            Tensorf img = decode(z);
            std::copy(img.data.begin(), img.data.end(), out.data.begin() + f * img.numel());
        }
        return out;
    }

private:
    uint64_t seed_;
    Eigen::MatrixXf basis_;  // kPatchDim x kLatentChannels, orthonormal columns
};

}  // namespace vidgen

#endif  // VIDGEN_CODEC_HPP
