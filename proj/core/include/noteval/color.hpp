#pragma once

#include <noteval/image.hpp>

namespace noteval {

/// Rec.601 luma: round(0.299 R + 0.587 G + 0.114 B). Throws on 1-channel input.
RasterImage to_grayscale(const RasterImage& img);

/// Hexcone HSV with every channel scaled to 0-255 (H maps 0-360 degrees onto 0-255).
/// Achromatic pixels get S = 0 and H = 0.
RasterImage rgb_to_hsv(const RasterImage& img);

/// CIELAB under D65, 8-bit encoded: L in 0-255 (L* * 255/100), a and b offset by 128.
RasterImage rgb_to_lab(const RasterImage& img);
RasterImage lab_to_rgb(const RasterImage& img);

}  // namespace noteval
