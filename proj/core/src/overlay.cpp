#include <noteval/damage.hpp>

#include <algorithm>
#include <cmath>

namespace noteval {
namespace {

RasterImage to_rgb(const RasterImage& img) {
    if (img.channels() == 3) return img;
    RasterImage out(img.width(), img.height(), 3);
    for (int y = 0; y < img.height(); ++y) {
        const std::uint8_t* src = img.row(y);
        std::uint8_t* dst = out.row(y);
        for (int x = 0; x < img.width(); ++x) dst[x * 3] = dst[x * 3 + 1] = dst[x * 3 + 2] = src[x];
    }
    return out;
}

void put(RasterImage& img, int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || x >= img.width() || y < 0 || y >= img.height()) return;
    img.at(x, y, 0) = r;
    img.at(x, y, 1) = g;
    img.at(x, y, 2) = b;
}

}  // namespace

RasterImage render_damage_overlay(const RasterImage& base, const BinaryMask& damage_mask) {
    if (base.width() != damage_mask.width() || base.height() != damage_mask.height())
        throw Error("render_damage_overlay: shape mismatch");
    RasterImage out = to_rgb(base);
    for (int y = 0; y < out.height(); ++y) {
        const std::uint8_t* m = damage_mask.row(y);
        std::uint8_t* px = out.row(y);
        for (int x = 0; x < out.width(); ++x) {
            if (!m[x]) continue;
            px[x * 3] = clamp_u8(0.4 * px[x * 3] + 0.6 * 255.0);
            px[x * 3 + 1] = clamp_u8(0.4 * px[x * 3 + 1]);
            px[x * 3 + 2] = clamp_u8(0.4 * px[x * 3 + 2]);
        }
    }
    return out;
}

RasterImage render_heatmap(const RasterImage& heatmap) {
    if (heatmap.channels() != 1) throw Error("render_heatmap: expected a grayscale heatmap");
    RasterImage out(heatmap.width(), heatmap.height(), 3);
    for (int y = 0; y < out.height(); ++y) {
        const std::uint8_t* src = heatmap.row(y);
        std::uint8_t* dst = out.row(y);
        for (int x = 0; x < out.width(); ++x) {
            const double t = src[x] / 255.0;  // 0 = cold (blue), 1 = hot (red)
            dst[x * 3] = clamp_u8(255.0 * std::min(1.0, 2.0 * t));
            dst[x * 3 + 1] = clamp_u8(255.0 * (1.0 - std::abs(2.0 * t - 1.0)));
            dst[x * 3 + 2] = clamp_u8(255.0 * std::min(1.0, 2.0 * (1.0 - t)) * (1.0 - t));
        }
    }
    return out;
}

RasterImage render_cluster_overlay(const RasterImage& base,
                                   const std::vector<ClusterMatch>& matches) {
    RasterImage out = to_rgb(base);
    constexpr int kArm = 6;
    for (const ClusterMatch& m : matches) {
        if (m.missing) {
            for (int d = -kArm; d <= kArm; ++d) {
                put(out, m.peak_x + d, m.peak_y - kArm, 255, 0, 0);
                put(out, m.peak_x + d, m.peak_y + kArm, 255, 0, 0);
                put(out, m.peak_x - kArm, m.peak_y + d, 255, 0, 0);
                put(out, m.peak_x + kArm, m.peak_y + d, 255, 0, 0);
            }
        } else {
            for (int d = -kArm; d <= kArm; ++d) {
                put(out, m.peak_x + d, m.peak_y, 0, 200, 0);
                put(out, m.peak_x, m.peak_y + d, 0, 200, 0);
            }
        }
    }
    return out;
}

}  // namespace noteval
