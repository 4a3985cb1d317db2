#ifndef VIDGEN_RNG_HPP
#define VIDGEN_RNG_HPP

#include <cmath>
#include <cstdint>

namespace vidgen {

// Deterministic, platform-independent RNG. std::normal_distribution is
// implementation-defined, so gaussians are drawn via Box-Muller on top of a
// splitmix64 stream.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() {
        return double(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // integer in [0, n)
    uint64_t uniform_int(uint64_t n) {
        // rejection-free modulo is fine here; n is tiny compared to 2^64
        return next_u64() % n;
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    // fork a decorrelated child stream (used for per-name parameter init)
    Rng fork(uint64_t salt) const {
        Rng r(state_ ^ (salt * 0x9e3779b97f4a7c15ull + 0x632be59bd9b4e019ull));
        r.next_u64();
        return r;
    }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// FNV-1a, used to salt per-parameter init streams by name
inline uint64_t hash_str(const char* s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (; *s; ++s) h = (h ^ uint64_t(uint8_t(*s))) * 0x100000001b3ull;
    return h;
}

}  // namespace vidgen

#endif  // VIDGEN_RNG_HPP
