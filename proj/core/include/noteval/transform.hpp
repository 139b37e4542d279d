#pragma once

#include <array>

#include <noteval/image.hpp>

namespace noteval {

/// Row-major 3x3 projective transform.
using Mat3 = std::array<double, 9>;

/// Box resampling with exact fractional pixel coverage. The right choice for
/// downscaling (no aliasing); degenerates to sub-pixel box averaging upward.
RasterImage resize_area(const RasterImage& img, int out_w, int out_h);

/// Bilinear resampling with pixel centers aligned to (i + 0.5) / n.
RasterImage resize_bilinear(const RasterImage& img, int out_w, int out_h);

/// out(p) = src(M^-1 p) with bilinear sampling; M maps source coordinates to
/// output coordinates (row-major 3x3, projective). Samples falling outside the
/// source are set to `fill`.
RasterImage warp_image(const RasterImage& src, const std::array<double, 9>& m_src_to_out,
                       int out_w, int out_h, std::uint8_t fill);

/// Nearest-neighbor variant for masks; out-of-source pixels are cleared.
BinaryMask warp_mask(const BinaryMask& src, const std::array<double, 9>& m_src_to_out,
                     int out_w, int out_h);

std::array<double, 9> mat3_mul(const std::array<double, 9>& a, const std::array<double, 9>& b);
std::array<double, 9> mat3_inverse(const std::array<double, 9>& m);
std::array<double, 2> mat3_apply(const std::array<double, 9>& m, double x, double y);

}  // namespace noteval
