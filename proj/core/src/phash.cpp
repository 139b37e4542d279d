#include <noteval/dataprep.hpp>

#include <algorithm>
#include <bit>
#include <cmath>

#include <noteval/color.hpp>
#include <noteval/transform.hpp>

namespace noteval {

namespace {

constexpr int kHashSide = 32;  // resample target
constexpr int kBlock = 8;      // retained low-frequency block

// Orthonormal DCT-II basis for one 32-point axis: basis[u][x].
struct DctBasis {
    double b[kHashSide][kHashSide];
    DctBasis() {
        const double norm0 = std::sqrt(1.0 / kHashSide);
        const double norm = std::sqrt(2.0 / kHashSide);
        for (int u = 0; u < kHashSide; ++u)
            for (int x = 0; x < kHashSide; ++x)
                b[u][x] = (u == 0 ? norm0 : norm) *
                          std::cos((2.0 * x + 1.0) * u * M_PI / (2.0 * kHashSide));
    }
};

}  // namespace

std::uint64_t phash64(const RasterImage& img) {
    if (img.width() < 1 || img.height() < 1 || img.empty())
        throw Error("phash64: degenerate image");
    static const DctBasis basis;

    const RasterImage gray = img.channels() == 3 ? to_grayscale(img) : img;
    const RasterImage small = resize_area(gray, kHashSide, kHashSide);

    // Separable DCT-II: rows, then the 8 needed output columns.
    double rows[kHashSide][kHashSide];
    for (int y = 0; y < kHashSide; ++y) {
        for (int u = 0; u < kHashSide; ++u) {
            double acc = 0.0;
            for (int x = 0; x < kHashSide; ++x)
                acc += basis.b[u][x] * small.at(x, y);
            rows[y][u] = acc;
        }
    }
    double block[kBlock][kBlock];
    for (int v = 0; v < kBlock; ++v) {
        for (int u = 0; u < kBlock; ++u) {
            double acc = 0.0;
            for (int y = 0; y < kHashSide; ++y)
                acc += basis.b[v][y] * rows[y][u];
            block[v][u] = acc;
        }
    }

    // Median of the 63 AC coefficients.
    std::array<double, kBlock * kBlock - 1> ac;
    int n = 0;
    for (int v = 0; v < kBlock; ++v)
        for (int u = 0; u < kBlock; ++u)
            if (u != 0 || v != 0)
                ac[n++] = block[v][u];
    std::array<double, ac.size()> sorted = ac;
    std::nth_element(sorted.begin(), sorted.begin() + ac.size() / 2, sorted.end());
    const double median = sorted[ac.size() / 2];

    // The slack keeps exact ties (and the fp residue of a flat image) on the
    // zero side regardless of summation order.
    constexpr double kTieSlack = 1e-6;
    std::uint64_t hash = 0;
    for (int k = 1; k < kBlock * kBlock; ++k) {
        const double coeff = block[k / kBlock][k % kBlock];
        if (coeff > median + kTieSlack)
            hash |= std::uint64_t{1} << (63 - k);
    }
    return hash;
}

int hamming(std::uint64_t a, std::uint64_t b) { return std::popcount(a ^ b); }

}  // namespace noteval
