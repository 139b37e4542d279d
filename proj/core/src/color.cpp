#include <noteval/color.hpp>

#include <algorithm>
#include <cmath>

namespace noteval {

namespace {

void require_rgb(const RasterImage& img, const char* op) {
    if (img.channels() == 1)
        throw Error(std::string(op) + ": already grayscale");
    if (img.channels() != 3)
        throw Error(std::string(op) + ": 3-channel input required");
}

// sRGB 8-bit -> linear, exact per code value.
struct SrgbLut {
    double v[256];
    SrgbLut() {
        for (int i = 0; i < 256; ++i) {
            const double c = i / 255.0;
            v[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
        }
    }
};

double linear_to_srgb(double c) {
    c = std::clamp(c, 0.0, 1.0);
    return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

constexpr double kXn = 0.95047;
constexpr double kYn = 1.00000;
constexpr double kZn = 1.08883;
constexpr double kLabDelta = 6.0 / 29.0;

double lab_f(double t) {
    return t > kLabDelta * kLabDelta * kLabDelta
               ? std::cbrt(t)
               : t / (3.0 * kLabDelta * kLabDelta) + 4.0 / 29.0;
}

double lab_f_inv(double t) {
    return t > kLabDelta ? t * t * t : 3.0 * kLabDelta * kLabDelta * (t - 4.0 / 29.0);
}

}  // namespace

RasterImage to_grayscale(const RasterImage& img) {
    require_rgb(img, "to_grayscale");
    RasterImage out(img.width(), img.height(), 1);
    const std::uint8_t* src = img.data();
    std::uint8_t* dst = out.data();
    const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
    for (std::size_t i = 0; i < n; ++i, src += 3)
        dst[i] = clamp_u8(0.299 * src[0] + 0.587 * src[1] + 0.114 * src[2]);
    return out;
}

RasterImage rgb_to_hsv(const RasterImage& img) {
    require_rgb(img, "rgb_to_hsv");
    RasterImage out(img.width(), img.height(), 3);
    const std::uint8_t* src = img.data();
    std::uint8_t* dst = out.data();
    const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
    for (std::size_t i = 0; i < n; ++i, src += 3, dst += 3) {
        const int r = src[0], g = src[1], b = src[2];
        const int maxc = std::max({r, g, b});
        const int minc = std::min({r, g, b});
        const int delta = maxc - minc;
        dst[2] = static_cast<std::uint8_t>(maxc);
        if (delta == 0) {
            dst[0] = 0;
            dst[1] = 0;
            continue;
        }
        dst[1] = clamp_u8(255.0 * delta / maxc);
        double h;
        if (maxc == r)
            h = 60.0 * std::fmod((g - b) / static_cast<double>(delta) + 6.0, 6.0);
        else if (maxc == g)
            h = 60.0 * ((b - r) / static_cast<double>(delta) + 2.0);
        else
            h = 60.0 * ((r - g) / static_cast<double>(delta) + 4.0);
        dst[0] = clamp_u8(h / 360.0 * 255.0);
    }
    return out;
}

RasterImage rgb_to_lab(const RasterImage& img) {
    require_rgb(img, "rgb_to_lab");
    static const SrgbLut lut;
    RasterImage out(img.width(), img.height(), 3);
    const std::uint8_t* src = img.data();
    std::uint8_t* dst = out.data();
    const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
    for (std::size_t i = 0; i < n; ++i, src += 3, dst += 3) {
        const double r = lut.v[src[0]], g = lut.v[src[1]], b = lut.v[src[2]];
        const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
        const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
        const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
        const double fx = lab_f(x / kXn), fy = lab_f(y / kYn), fz = lab_f(z / kZn);
        const double L = 116.0 * fy - 16.0;
        const double a = 500.0 * (fx - fy);
        const double bb = 200.0 * (fy - fz);
        dst[0] = clamp_u8(L * 255.0 / 100.0);
        dst[1] = clamp_u8(a + 128.0);
        dst[2] = clamp_u8(bb + 128.0);
    }
    return out;
}

RasterImage lab_to_rgb(const RasterImage& img) {
    require_rgb(img, "lab_to_rgb");
    RasterImage out(img.width(), img.height(), 3);
    const std::uint8_t* src = img.data();
    std::uint8_t* dst = out.data();
    const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
    for (std::size_t i = 0; i < n; ++i, src += 3, dst += 3) {
        const double L = src[0] * 100.0 / 255.0;
        const double a = src[1] - 128.0;
        const double b = src[2] - 128.0;
        const double fy = (L + 16.0) / 116.0;
        const double fx = fy + a / 500.0;
        const double fz = fy - b / 200.0;
        const double x = kXn * lab_f_inv(fx);
        const double y = kYn * lab_f_inv(fy);
        const double z = kZn * lab_f_inv(fz);
        const double r = 3.2404542 * x - 1.5371385 * y - 0.4985314 * z;
        const double g = -0.9692660 * x + 1.8760108 * y + 0.0415560 * z;
        const double bl = 0.0556434 * x - 0.2040259 * y + 1.0572252 * z;
        dst[0] = clamp_u8(linear_to_srgb(r) * 255.0);
        dst[1] = clamp_u8(linear_to_srgb(g) * 255.0);
        dst[2] = clamp_u8(linear_to_srgb(bl) * 255.0);
    }
    return out;
}

}  // namespace noteval
