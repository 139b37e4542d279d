#pragma once

#include <noteval/image.hpp>

namespace noteval {

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value (1-indexed,
/// rank clamped to at least 1). Throws on an empty sample set.
double percentile(std::vector<double> values, double p);

/// Nearest-rank percentile over 8-bit samples taken with a stride
/// (stride = channel count to walk one channel of an interleaved image).
std::uint8_t percentile_u8(const std::uint8_t* data, std::size_t count, std::size_t stride,
                           double p);

}  // namespace noteval
