#include <noteval/stats.hpp>

#include <algorithm>
#include <array>
#include <cmath>

namespace noteval {

namespace {

std::size_t nearest_rank(double p, std::size_t n) {
    if (n == 0)
        throw Error("percentile: empty sample set");
    if (p < 0.0 || p > 100.0)
        throw Error("percentile: p must be in [0, 100]");
    const auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
    return std::clamp<std::size_t>(rank, 1, n);
}

}  // namespace

double percentile(std::vector<double> values, double p) {
    const std::size_t rank = nearest_rank(p, values.size());
    std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
    return values[rank - 1];
}

std::uint8_t percentile_u8(const std::uint8_t* data, std::size_t count, std::size_t stride,
                           double p) {
    const std::size_t rank = nearest_rank(p, count);
    std::array<std::size_t, 256> hist{};
    for (std::size_t i = 0; i < count; ++i)
        ++hist[data[i * stride]];
    std::size_t seen = 0;
    for (int v = 0; v < 256; ++v) {
        seen += hist[v];
        if (seen >= rank)
            return static_cast<std::uint8_t>(v);
    }
    return 255;
}

}  // namespace noteval
