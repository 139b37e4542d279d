#include <noteval/augment.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <noteval/transform.hpp>

namespace noteval {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

RasterImage crop(const RasterImage& img, int x0, int y0, int cw, int ch) {
    RasterImage out(cw, ch, img.channels());
    const int ch_n = img.channels();
    for (int y = 0; y < ch; ++y) {
        const std::uint8_t* src = img.row(y0 + y) + static_cast<std::size_t>(x0) * ch_n;
        std::copy(src, src + static_cast<std::size_t>(cw) * ch_n, out.row(y));
    }
    return out;
}

RasterImage hflip(const RasterImage& img) {
    RasterImage out(img.width(), img.height(), img.channels());
    const int w = img.width(), c = img.channels();
    for (int y = 0; y < img.height(); ++y) {
        const std::uint8_t* src = img.row(y);
        std::uint8_t* dst = out.row(y);
        for (int x = 0; x < w; ++x)
            for (int k = 0; k < c; ++k) dst[x * c + k] = src[(w - 1 - x) * c + k];
    }
    return out;
}

/// Rotation of the content about the image centre; canvas size is preserved
/// and uncovered pixels become white.
RasterImage rotate(const RasterImage& img, double deg) {
    const double a = deg * kDegToRad;
    const double cx = (img.width() - 1) / 2.0, cy = (img.height() - 1) / 2.0;
    const double c = std::cos(a), s = std::sin(a);
    const Mat3 m{c, -s, cx - c * cx + s * cy, s, c, cy - s * cx - c * cy, 0, 0, 1};
    return warp_image(img, m, img.width(), img.height(), 255);
}

double luma(const std::uint8_t* px, int channels) {
    if (channels == 1) return px[0];
    return 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
}

void apply_brightness(RasterImage& img, double f) {
    std::uint8_t* p = img.data();
    const std::size_t n = img.sample_count();
    for (std::size_t i = 0; i < n; ++i) p[i] = clamp_u8(p[i] * f);
}

void apply_contrast(RasterImage& img, double f) {
    // Blend towards the mean grayscale level of the whole image.
    double mean = 0.0;
    const int c = img.channels();
    const std::size_t npx = static_cast<std::size_t>(img.width()) * img.height();
    for (std::size_t i = 0; i < npx; ++i) mean += luma(img.data() + i * c, c);
    mean /= static_cast<double>(npx);
    std::uint8_t* p = img.data();
    const std::size_t n = img.sample_count();
    for (std::size_t i = 0; i < n; ++i) p[i] = clamp_u8(mean + f * (p[i] - mean));
}

void apply_saturation(RasterImage& img, double f) {
    if (img.channels() != 3) return;
    std::uint8_t* p = img.data();
    const std::size_t npx = static_cast<std::size_t>(img.width()) * img.height();
    for (std::size_t i = 0; i < npx; ++i) {
        std::uint8_t* px = p + i * 3;
        const double g = luma(px, 3);
        for (int k = 0; k < 3; ++k) px[k] = clamp_u8(g + f * (px[k] - g));
    }
}

void apply_hue(RasterImage& img, double shift_frac) {
    if (img.channels() != 3) return;
    std::uint8_t* p = img.data();
    const std::size_t npx = static_cast<std::size_t>(img.width()) * img.height();
    const double shift = shift_frac * 360.0;
    for (std::size_t i = 0; i < npx; ++i) {
        std::uint8_t* px = p + i * 3;
        const double r = px[0] / 255.0, g = px[1] / 255.0, b = px[2] / 255.0;
        const double maxc = std::max({r, g, b}), minc = std::min({r, g, b});
        const double delta = maxc - minc;
        if (delta == 0.0) continue;  // achromatic: hue shift is a no-op
        double h;
        if (maxc == r)
            h = 60.0 * std::fmod((g - b) / delta, 6.0);
        else if (maxc == g)
            h = 60.0 * ((b - r) / delta + 2.0);
        else
            h = 60.0 * ((r - g) / delta + 4.0);
        h = std::fmod(h + shift + 720.0, 360.0);
        const double s = maxc == 0.0 ? 0.0 : delta / maxc;
        const double v = maxc;
        const double chroma = v * s;
        const double hp = h / 60.0;
        const double xval = chroma * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
        double r1 = 0, g1 = 0, b1 = 0;
        if (hp < 1) {
            r1 = chroma; g1 = xval;
        } else if (hp < 2) {
            r1 = xval; g1 = chroma;
        } else if (hp < 3) {
            g1 = chroma; b1 = xval;
        } else if (hp < 4) {
            g1 = xval; b1 = chroma;
        } else if (hp < 5) {
            r1 = xval; b1 = chroma;
        } else {
            r1 = chroma; b1 = xval;
        }
        const double m = v - chroma;
        px[0] = clamp_u8((r1 + m) * 255.0);
        px[1] = clamp_u8((g1 + m) * 255.0);
        px[2] = clamp_u8((b1 + m) * 255.0);
    }
}

RasterImage affine(const RasterImage& img, double tx, double ty, double scale, double shear_deg) {
    const double cx = (img.width() - 1) / 2.0, cy = (img.height() - 1) / 2.0;
    const double sh = std::tan(shear_deg * kDegToRad);
    // Scale and shear about the centre, then translate.
    const double a = scale, b = scale * sh;
    const Mat3 m{a, b, tx + cx - a * cx - b * cy, 0, a, ty + cy - a * cy, 0, 0, 1};
    return warp_image(img, m, img.width(), img.height(), 255);
}

}  // namespace

void AugmentConfig::validate() const {
    if (crop_scale_lo <= 0.0 || crop_scale_hi > 1.0 || crop_scale_lo > crop_scale_hi)
        throw Error("augment: crop scale range must satisfy 0 < lo <= hi <= 1");
    if (rotation_deg < 0.0 || affine_shear_deg < 0.0 || affine_translate < 0.0)
        throw Error("augment: ranges must be non-negative");
    if (hflip_prob < 0.0 || hflip_prob > 1.0 || erase_prob < 0.0 || erase_prob > 1.0)
        throw Error("augment: probabilities must lie in [0, 1]");
    if (erase_area_lo <= 0.0 || erase_area_lo > erase_area_hi || erase_area_hi >= 1.0)
        throw Error("augment: erase area range must satisfy 0 < lo <= hi < 1");
    if (affine_scale_lo <= 0.0 || affine_scale_lo > affine_scale_hi)
        throw Error("augment: affine scale range must satisfy 0 < lo <= hi");
    if (output_size <= 0) throw Error("augment: output size must be positive");
}

std::optional<EraseRect> sample_erase_rect(Rng& rng, const AugmentConfig& cfg, int width,
                                           int height) {
    if (!rng.bernoulli(cfg.erase_prob)) return std::nullopt;
    const double npx = static_cast<double>(width) * height;
    const double lo = cfg.erase_area_lo * npx, hi = cfg.erase_area_hi * npx;
    const double area = rng.uniform(cfg.erase_area_lo, cfg.erase_area_hi) * npx;
    const double ratio = rng.uniform(0.3, 1.0 / 0.3);  // h / w aspect
    int h = std::clamp(static_cast<int>(std::lround(std::sqrt(area * ratio))), 1, height);
    int w = std::clamp(static_cast<int>(std::lround(area / h)), 1, width);
    // Rounding can push the realised area just outside the sampled bounds;
    // nudge the width back in.
    if (static_cast<double>(h) * w < lo) w = std::min(width, static_cast<int>(std::ceil(lo / h)));
    if (static_cast<double>(h) * w > hi) w = std::max(1, static_cast<int>(std::floor(hi / h)));
    if (static_cast<double>(h) * w < lo) h = std::min(height, static_cast<int>(std::ceil(lo / w)));
    if (static_cast<double>(h) * w > hi) h = std::max(1, static_cast<int>(std::floor(hi / w)));
    EraseRect r;
    r.w = w;
    r.h = h;
    r.x = rng.uniform_int(0, width - w);
    r.y = rng.uniform_int(0, height - h);
    return r;
}

RasterImage augment(const RasterImage& img, const AugmentConfig& cfg, Rng& rng) {
    cfg.validate();
    RasterImage cur;
    if (img.channels() == 3) {
        cur = img;
    } else if (img.channels() == 1) {
        // Model-bound outputs are always 3-channel.
        cur = RasterImage(img.width(), img.height(), 3);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                for (int c = 0; c < 3; ++c)
                    cur.at(x, y, c) = img.at(x, y, 0);
    } else {
        throw Error("augment: expected 1- or 3-channel input");
    }

    // Random resized crop. The scale draw fixes the crop area; the aspect is
    // kept so the later square resize applies the same distortion every time.
    const double scale = rng.uniform(cfg.crop_scale_lo, cfg.crop_scale_hi);
    const double side = std::sqrt(scale);
    const int cw = std::max(1, static_cast<int>(std::lround(cur.width() * side)));
    const int ch = std::max(1, static_cast<int>(std::lround(cur.height() * side)));
    const int x0 = rng.uniform_int(0, cur.width() - cw);
    const int y0 = rng.uniform_int(0, cur.height() - ch);
    if (cw != cur.width() || ch != cur.height()) cur = crop(cur, x0, y0, cw, ch);

    const double angle = rng.uniform(-cfg.rotation_deg, cfg.rotation_deg);
    if (angle != 0.0) cur = rotate(cur, angle);

    if (rng.bernoulli(cfg.hflip_prob)) cur = hflip(cur);

    const double fb = rng.uniform(1.0 - cfg.jitter_brightness, 1.0 + cfg.jitter_brightness);
    const double fc = rng.uniform(1.0 - cfg.jitter_contrast, 1.0 + cfg.jitter_contrast);
    const double fs = rng.uniform(1.0 - cfg.jitter_saturation, 1.0 + cfg.jitter_saturation);
    const double fh = rng.uniform(-cfg.jitter_hue, cfg.jitter_hue);
    if (fb != 1.0) apply_brightness(cur, fb);
    if (fc != 1.0) apply_contrast(cur, fc);
    if (fs != 1.0) apply_saturation(cur, fs);
    if (fh != 0.0) apply_hue(cur, fh);

    const double tx = rng.uniform(-cfg.affine_translate, cfg.affine_translate) * cur.width();
    const double ty = rng.uniform(-cfg.affine_translate, cfg.affine_translate) * cur.height();
    const double asc = rng.uniform(cfg.affine_scale_lo, cfg.affine_scale_hi);
    const double ash = rng.uniform(-cfg.affine_shear_deg, cfg.affine_shear_deg);
    if (tx != 0.0 || ty != 0.0 || asc != 1.0 || ash != 0.0) cur = affine(cur, tx, ty, asc, ash);

    if (const auto rect = sample_erase_rect(rng, cfg, cur.width(), cur.height())) {
        for (int y = rect->y; y < rect->y + rect->h; ++y) {
            std::uint8_t* row = cur.row(y) + static_cast<std::size_t>(rect->x) * cur.channels();
            std::fill(row, row + static_cast<std::size_t>(rect->w) * cur.channels(),
                      std::uint8_t{0});
        }
    }

    return resize_bilinear(cur, cfg.output_size, cfg.output_size);
}

}  // namespace noteval
