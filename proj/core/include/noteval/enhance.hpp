#pragma once

#include <array>

#include <noteval/image.hpp>

namespace noteval {

/// Settings for the enhancement chain (median -> sharpen -> stretch -> CLAHE)
/// and for the CLAHE + bilateral pair used ahead of the chromatic comparison.
struct EnhanceConfig {
    bool median_enabled = true;
    int median_kernel = 3;  // odd, >= 3

    bool sharpen_enabled = true;

    bool stretch_enabled = true;
    double stretch_low_pct = 2.0;
    double stretch_high_pct = 98.0;

    bool clahe_enabled = true;
    double clahe_clip = 2.0;  // relative clip limit
    int clahe_tiles_x = 8;
    int clahe_tiles_y = 8;

    bool bilateral_enabled = true;
    int bilateral_diameter = 9;
    double bilateral_sigma_color = 75.0;
    double bilateral_sigma_space = 75.0;

    void validate() const;
};

/// Per-channel k x k window median with replicate-edge padding. k must be odd, >= 3.
RasterImage median_blur(const RasterImage& img, int kernel);

/// Fixed 3x3 kernel {-1 ... 9 ... -1} (sums to 1), replicate padding, clamped.
RasterImage sharpen(const RasterImage& img);

/// Per-channel linear stretch of [p_low, p_high] onto [0, 255]. A channel whose
/// two percentiles coincide is returned unchanged.
RasterImage contrast_stretch(const RasterImage& img, double low_pct = 2.0,
                             double high_pct = 98.0);

/// Histogram clipping with single-pass uniform excess redistribution:
/// h'(i) = min(h(i), clip) + excess / bins.
std::array<double, 256> clahe_clip_histogram(const std::array<int, 256>& hist, double clip);

/// Contrast-limited adaptive histogram equalization on a single channel.
/// clip is relative (absolute count = clip * tile_area / 256, floored at 1);
/// tile mappings are blended bilinearly. Throws if the image is smaller than
/// the tile grid.
RasterImage clahe_gray(const RasterImage& gray, double clip, int tiles_x, int tiles_y);

/// CLAHE applied to the L channel in LAB space; chroma passes through.
RasterImage clahe(const RasterImage& rgb, const EnhanceConfig& cfg);

/// Edge-preserving smoothing with Gaussian spatial and range weights. The range
/// distance for RGB is the summed absolute difference across channels.
RasterImage bilateral_filter(const RasterImage& img, const EnhanceConfig& cfg);

/// The full enhancement chain in order: median blur, sharpen, contrast
/// stretch, CLAHE. Stages respect their individual enable flags.
RasterImage enhance_pipeline(const RasterImage& img, const EnhanceConfig& cfg);

}  // namespace noteval
