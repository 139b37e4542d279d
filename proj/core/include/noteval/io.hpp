#pragma once

#include <noteval/image.hpp>

namespace noteval {

/// Loads a PNG or JPEG file (format sniffed from the magic bytes).
/// Palette and RGBA inputs are expanded/flattened to plain RGB; 16-bit is
/// reduced to 8-bit. Throws Error on unreadable or unsupported files.
RasterImage load_image(const std::string& path);

void save_png(const RasterImage& img, const std::string& path);
void save_jpeg(const RasterImage& img, const std::string& path, int quality = 95);

/// Dispatches on the file extension (.png, .jpg, .jpeg).
void save_image(const RasterImage& img, const std::string& path);

/// Masks serialize as 1-bit grayscale PNG.
void save_mask_png(const BinaryMask& mask, const std::string& path);
BinaryMask load_mask_png(const std::string& path);

}  // namespace noteval
