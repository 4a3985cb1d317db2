#ifndef VIDGEN_SCHEDULE_HPP
#define VIDGEN_SCHEDULE_HPP

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <vector>

#include "vidgen/tensor.hpp"

namespace vidgen {

// SNR reported at alpha_bar == 1 instead of infinity, keeps weight tables finite
inline constexpr double kSnrCap = 1e12;
// PSNR reported for identical inputs
inline constexpr double kPsnrCap = 99.0;

struct NoiseSchedule {
    int T = 0;
    std::vector<double> alpha_bar;  // indexed 0..T, alpha_bar[0] == 1
    bool zero_terminal_snr = false;

    double abar(int t) const {
        if (t < 0 || t > T) throw std::out_of_range("schedule: t out of range");
        return alpha_bar[size_t(t)];
    }

    nlohmann::json to_json() const {
        return {{"T", T}, {"alpha_bar", alpha_bar}, {"zero_terminal_snr", zero_terminal_snr}};
    }
    static NoiseSchedule from_json(const nlohmann::json& j) {
        NoiseSchedule s;
        s.T = j.at("T").get<int>();
        s.alpha_bar = j.at("alpha_bar").get<std::vector<double>>();
        s.zero_terminal_snr = j.at("zero_terminal_snr").get<bool>();
        if (int(s.alpha_bar.size()) != s.T + 1) throw std::invalid_argument("schedule: bad alpha_bar length");
        return s;
    }
};

struct WeightConfig {
    double gamma = 5.0;
};

// Linear betas; the zero-terminal-SNR variant rescales sqrt(alpha_bar) affinely
// so sqrt(abar_T) hits 0 while sqrt(abar_1) is preserved.
inline NoiseSchedule make_schedule(int T, double beta_lo, double beta_hi, bool zero_terminal_snr) {
    if (T < 1) throw std::invalid_argument("make_schedule: T must be >= 1");
    if (!(beta_lo > 0.0 && beta_lo <= beta_hi && beta_hi < 1.0))
        throw std::invalid_argument("make_schedule: betas must satisfy 0 < lo <= hi < 1");
    NoiseSchedule s;
    s.T = T;
    s.zero_terminal_snr = zero_terminal_snr;
    s.alpha_bar.resize(size_t(T) + 1);
    s.alpha_bar[0] = 1.0;
    double prod = 1.0;
    for (int t = 1; t <= T; ++t) {
        double beta = (T == 1) ? beta_lo : beta_lo + (beta_hi - beta_lo) * double(t - 1) / double(T - 1);
        prod *= 1.0 - beta;
        s.alpha_bar[size_t(t)] = prod;
    }
    if (zero_terminal_snr) {
        double s1 = std::sqrt(s.alpha_bar[1]);
        double sT = std::sqrt(s.alpha_bar[size_t(T)]);
        if (T == 1) {
            s.alpha_bar[1] = 0.0;
        } else {
            for (int t = 1; t <= T; ++t) {
                double sq = std::sqrt(s.alpha_bar[size_t(t)]);
                sq = (sq - sT) * s1 / (s1 - sT);
                s.alpha_bar[size_t(t)] = sq * sq;
            }
            s.alpha_bar[size_t(T)] = 0.0;  // exact, not just to rounding
        }
    }
    return s;
}

inline double snr(const NoiseSchedule& s, int t) {
    if (t < 1 || t > s.T) throw std::out_of_range("snr: t out of range");
    double ab = s.abar(t);
    if (ab <= 0.0) return 0.0;
    if (ab >= 1.0) return kSnrCap;
    return ab / (1.0 - ab);
}

// w = min(snr, gamma) / (snr + 1)
inline double loss_weight(double snr_value, const WeightConfig& cfg = {}) {
    if (snr_value < 0.0) throw std::invalid_argument("loss_weight: negative snr");
    if (cfg.gamma <= 0.0) throw std::invalid_argument("loss_weight: gamma must be positive");
    return std::min(snr_value, cfg.gamma) / (snr_value + 1.0);
}

// ---- latent-space forward/reverse algebra ----

template <class S>
Tensor<S> add_noise(const Tensor<S>& x0, const Tensor<S>& eps, const NoiseSchedule& sch, int t) {
    check_same_shape(x0, eps, "add_noise");
    if (t < 1 || t > sch.T) throw std::out_of_range("add_noise: t out of range");
    S a = S(std::sqrt(sch.abar(t))), b = S(std::sqrt(1.0 - sch.abar(t)));
    Tensor<S> z = x0;
    for (int64_t i = 0; i < z.numel(); ++i) z[i] = a * x0[i] + b * eps[i];
    return z;
}

template <class S>
Tensor<S> v_target(const Tensor<S>& x0, const Tensor<S>& eps, const NoiseSchedule& sch, int t) {
    check_same_shape(x0, eps, "v_target");
    S a = S(std::sqrt(sch.abar(t))), b = S(std::sqrt(1.0 - sch.abar(t)));
    Tensor<S> v = x0;
    for (int64_t i = 0; i < v.numel(); ++i) v[i] = a * eps[i] - b * x0[i];
    return v;
}

template <class S>
Tensor<S> v_to_eps(const Tensor<S>& v, const Tensor<S>& z_t, const NoiseSchedule& sch, int t) {
    check_same_shape(v, z_t, "v_to_eps");
    S a = S(std::sqrt(sch.abar(t))), b = S(std::sqrt(1.0 - sch.abar(t)));
    Tensor<S> eps = v;
    for (int64_t i = 0; i < eps.numel(); ++i) eps[i] = a * v[i] + b * z_t[i];
    return eps;
}

template <class S>
Tensor<S> v_to_x0(const Tensor<S>& v, const Tensor<S>& z_t, const NoiseSchedule& sch, int t) {
    check_same_shape(v, z_t, "v_to_x0");
    S a = S(std::sqrt(sch.abar(t))), b = S(std::sqrt(1.0 - sch.abar(t)));
    Tensor<S> x0 = v;
    for (int64_t i = 0; i < x0.numel(); ++i) x0[i] = a * z_t[i] - b * v[i];
    return x0;
}

// Deterministic (eta = 0) step. Requires abar(t) > 0; the zero-SNR terminal
// step goes through ddim_step_v, which reconstructs x0 from v instead.
template <class S>
Tensor<S> ddim_step(const Tensor<S>& z_t, const Tensor<S>& eps_pred, const NoiseSchedule& sch, int t, int t_prev) {
    check_same_shape(z_t, eps_pred, "ddim_step");
    if (t < 1 || t > sch.T) throw std::out_of_range("ddim_step: t out of range");
    if (t_prev >= t || t_prev < 0) throw std::invalid_argument("ddim_step: require t > t_prev >= 0");
    double ab_t = sch.abar(t);
    if (ab_t <= 0.0) throw std::invalid_argument("ddim_step: abar(t)=0, use ddim_step_v");
    S a = S(std::sqrt(ab_t)), b = S(std::sqrt(1.0 - ab_t));
    S ap = S(std::sqrt(sch.abar(t_prev))), bp = S(std::sqrt(1.0 - sch.abar(t_prev)));
    Tensor<S> out = z_t;
    for (int64_t i = 0; i < out.numel(); ++i) {
        S x0 = (z_t[i] - b * eps_pred[i]) / a;
        out[i] = ap * x0 + bp * eps_pred[i];
    }
    return out;
}

// v-parameterized step; well-defined at abar(t) = 0
template <class S>
Tensor<S> ddim_step_v(const Tensor<S>& z_t, const Tensor<S>& v_pred, const NoiseSchedule& sch, int t, int t_prev) {
    check_same_shape(z_t, v_pred, "ddim_step_v");
    if (t < 1 || t > sch.T) throw std::out_of_range("ddim_step_v: t out of range");
    if (t_prev >= t || t_prev < 0) throw std::invalid_argument("ddim_step_v: require t > t_prev >= 0");
    S a = S(std::sqrt(sch.abar(t))), b = S(std::sqrt(1.0 - sch.abar(t)));
    S ap = S(std::sqrt(sch.abar(t_prev))), bp = S(std::sqrt(1.0 - sch.abar(t_prev)));
    Tensor<S> out = z_t;
    for (int64_t i = 0; i < out.numel(); ++i) {
        S x0 = a * z_t[i] - b * v_pred[i];
        S eps = a * v_pred[i] + b * z_t[i];
        out[i] = ap * x0 + bp * eps;
    }
    return out;
}

// evenly spaced timesteps rounded down: T = t_0 > t_1 > ... > t_steps = 0
inline std::vector<int> ddim_timesteps(int T, int steps) {
    if (steps < 1 || steps > T) throw std::invalid_argument("ddim_timesteps: need 1 <= steps <= T");
    std::vector<int> ts(size_t(steps) + 1);
    for (int k = 0; k <= steps; ++k) ts[size_t(k)] = int(int64_t(T) * (steps - k) / steps);
    return ts;
}

}  // namespace vidgen

#endif  // VIDGEN_SCHEDULE_HPP
