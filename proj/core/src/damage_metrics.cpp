/// @file damage_metrics.cpp
/// @brief Pixel-level damage measures: ink-mass loss, chromatic deviation,
///        structural region overlap and damage-zone counting.

#include <noteval/damage.hpp>

#include <algorithm>
#include <cmath>

#include <noteval/morph.hpp>

namespace noteval {

void DamageConfig::validate() const {
    if (dbscan_eps <= 0.0 || dbscan_eps >= 1.0)
        throw Error("damage: dbscan eps fraction out of (0, 1)");
    if (dbscan_min_samples < 1) throw Error("damage: dbscan min samples must be >= 1");
    if (ncc_missing_threshold <= 0.0 || ncc_missing_threshold >= 1.0)
        throw Error("damage: ncc threshold out of (0, 1)");
    if (overlap_threshold <= 0.0 || overlap_threshold >= 1.0)
        throw Error("damage: overlap threshold out of (0, 1)");
    if (edge_strip_fraction <= 0.0 || edge_strip_fraction >= 0.5)
        throw Error("damage: edge strip fraction out of (0, 0.5)");
    if (corner_square_fraction <= 0.0 || corner_square_fraction >= 0.5)
        throw Error("damage: corner square fraction out of (0, 0.5)");
    if (region_min_area_fraction <= 0.0 || region_min_area_fraction >= 0.5)
        throw Error("damage: region area floor out of (0, 0.5)");
    if (ncc_window_fraction <= 0.0) throw Error("damage: ncc window fraction must be positive");
    if (adaptive_block < 3 || adaptive_block % 2 == 0)
        throw Error("damage: adaptive block must be odd, >= 3");
    if (max_contour_points < 1) throw Error("damage: contour point cap must be >= 1");
    if (patch_pad < 0) throw Error("damage: patch pad must be non-negative");
}

BinaryDamageResult binary_damage(const BinaryMask& ref_mask, const BinaryMask& dmg_mask) {
    if (!ref_mask.same_shape(dmg_mask)) throw Error("binary_damage: mask shapes differ");
    const long ref_sum = ref_mask.count();
    if (ref_sum == 0) throw Error("binary_damage: empty reference mask");

    BinaryDamageResult res;
    // Per-pixel (ref - damaged) clamped at zero is exactly ref AND NOT damaged.
    res.damage_mask = mask_diff(ref_mask, dmg_mask);
    res.percent = 100.0 * static_cast<double>(res.damage_mask.count()) / ref_sum;
    return res;
}

RgbDamageResult rgb_damage(const RasterImage& ref, const RasterImage& warped,
                           const BinaryMask& valid, const EnhanceConfig& enh) {
    if (!ref.same_shape(warped)) throw Error("rgb_damage: image shapes differ");
    if (ref.channels() != 3) throw Error("rgb_damage: expected 3-channel images");
    if (ref.width() != valid.width() || ref.height() != valid.height())
        throw Error("rgb_damage: mask shape differs");
    const long n = valid.count();
    if (n == 0) throw Error("rgb_damage: empty mask");

    // Both frames get the identical enhancement so illumination and sensor
    // differences don't read as damage.
    RasterImage a = ref, b = warped;
    if (enh.clahe_enabled) {
        a = clahe(a, enh);
        b = clahe(b, enh);
    }
    if (enh.bilateral_enabled) {
        a = bilateral_filter(a, enh);
        b = bilateral_filter(b, enh);
    }

    RgbDamageResult res;
    res.heatmap = RasterImage(ref.width(), ref.height(), 1);
    double sum = 0.0;
    for (int y = 0; y < ref.height(); ++y) {
        const std::uint8_t* pa = a.row(y);
        const std::uint8_t* pb = b.row(y);
        const std::uint8_t* pm = valid.row(y);
        std::uint8_t* ph = res.heatmap.row(y);
        for (int x = 0; x < ref.width(); ++x) {
            const int d0 = std::abs(static_cast<int>(pa[x * 3]) - pb[x * 3]);
            const int d1 = std::abs(static_cast<int>(pa[x * 3 + 1]) - pb[x * 3 + 1]);
            const int d2 = std::abs(static_cast<int>(pa[x * 3 + 2]) - pb[x * 3 + 2]);
            const double mean = (d0 + d1 + d2) / 3.0;
            ph[x] = clamp_u8(mean);
            if (pm[x]) sum += mean;
        }
    }
    res.percent = 100.0 * sum / (255.0 * static_cast<double>(n));
    return res;
}

RegionMasks make_region_masks(int width, int height, const DamageConfig& cfg) {
    cfg.validate();
    if (width < 1 || height < 1) throw Error("make_region_masks: empty frame");
    const int m = std::min(width, height);
    const int strip = std::max(1, static_cast<int>(std::lround(cfg.edge_strip_fraction * m)));
    const int square = std::max(1, static_cast<int>(std::lround(cfg.corner_square_fraction * m)));

    RegionMasks rm;
    const auto fill_rect = [&](BinaryMask& mask, int x0, int y0, int x1, int y1) {
        mask = BinaryMask(width, height);
        for (int y = y0; y < y1; ++y) {
            std::uint8_t* row = mask.row(y);
            std::fill(row + x0, row + x1, std::uint8_t{1});
        }
    };
    fill_rect(rm.edges[0], 0, 0, width, strip);                   // top
    fill_rect(rm.edges[1], 0, height - strip, width, height);     // bottom
    fill_rect(rm.edges[2], 0, 0, strip, height);                  // left
    fill_rect(rm.edges[3], width - strip, 0, width, height);      // right
    fill_rect(rm.corners[0], 0, 0, square, square);               // tl
    fill_rect(rm.corners[1], width - square, 0, width, square);   // tr
    fill_rect(rm.corners[2], 0, height - square, square, height); // bl
    fill_rect(rm.corners[3], width - square, height - square, width, height);  // br
    return rm;
}

StructuralResult structural_overlap(const BinaryMask& damage_mask, const RegionMasks& regions,
                                    double overlap_threshold) {
    const auto overlap = [&](const BinaryMask& region) {
        if (!region.same_shape(damage_mask))
            throw Error("structural_overlap: region shape differs from damage mask");
        long inter = 0, total = 0;
        const std::uint8_t* d = damage_mask.data();
        const std::uint8_t* r = region.data();
        const std::size_t n = static_cast<std::size_t>(region.width()) * region.height();
        for (std::size_t i = 0; i < n; ++i) {
            total += r[i];
            inter += d[i] & r[i];
        }
        if (total == 0) throw Error("structural_overlap: empty region");
        return static_cast<double>(inter) / static_cast<double>(total);
    };

    StructuralResult res;
    for (int k = 0; k < 4; ++k) {
        res.edge_overlap[k] = overlap(regions.edges[k]);
        if (res.edge_overlap[k] > overlap_threshold) ++res.edges_damaged;
        res.corner_overlap[k] = overlap(regions.corners[k]);
        if (res.corner_overlap[k] > overlap_threshold) ++res.corners_damaged;
    }
    return res;
}

int count_damage_regions(const BinaryMask& damage_mask, long ref_foreground_area,
                         const DamageConfig& cfg) {
    cfg.validate();
    if (ref_foreground_area < 0) throw Error("count_damage_regions: negative reference area");
    const long floor_area = static_cast<long>(
        std::ceil(cfg.region_min_area_fraction * static_cast<double>(ref_foreground_area)));
    return connected_component_count(damage_mask, floor_area);
}

}  // namespace noteval
