#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <noteval/image.hpp>

namespace noteval {

/// Deterministic uniform helpers over mt19937_64. Distributions are derived
/// from raw 64-bit draws only, so sequences are identical across standard
/// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], inclusive.
    int uniform_int(int lo, int hi) {
        if (hi <= lo) return lo;
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

struct AugmentConfig {
    double crop_scale_lo = 0.8;  // area fraction of the random resized crop
    double crop_scale_hi = 1.0;
    double rotation_deg = 15.0;  // +- range
    double hflip_prob = 0.5;
    double jitter_brightness = 0.2;
    double jitter_contrast = 0.2;
    double jitter_saturation = 0.2;
    double jitter_hue = 0.1;  // fraction of the hue circle
    double affine_translate = 0.10;  // fraction of each dimension
    double affine_scale_lo = 0.9;
    double affine_scale_hi = 1.1;
    double affine_shear_deg = 10.0;
    double erase_prob = 0.5;
    double erase_area_lo = 0.02;
    double erase_area_hi = 0.15;
    int output_size = 224;
    std::uint64_t seed = 0;

    void validate() const;
};

struct EraseRect {
    int x = 0, y = 0, w = 0, h = 0;
};

/// Draws the erasing rectangle (or nothing, with probability 1 - erase_prob).
/// The returned rectangle's area is guaranteed to fall inside
/// [erase_area_lo, erase_area_hi] x (image area).
std::optional<EraseRect> sample_erase_rect(Rng& rng, const AugmentConfig& cfg, int width,
                                           int height);

/// Stochastic training-time transform chain, applied in order: random resized
/// crop, rotation, horizontal flip, color jitter, affine, random erasing, then
/// a resize to output_size x output_size. Collapsed parameter ranges reproduce
/// the plain resized input.
RasterImage augment(const RasterImage& img, const AugmentConfig& cfg, Rng& rng);

}  // namespace noteval
