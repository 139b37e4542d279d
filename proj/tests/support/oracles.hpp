#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include <noteval/align.hpp>
#include <noteval/enhance.hpp>
#include <noteval/image.hpp>

/// Deliberately naive reference implementations. Each mirrors the documented
/// contract with the most direct construction available (full sorts, O(n^2)
/// scans, direct transform sums) so the production code has an independent
/// target to agree with. Do not optimize these.
namespace oracles {

/// Window median by materializing and sorting every k x k neighbourhood.
noteval::RasterImage median_naive(const noteval::RasterImage& img, int kernel);

/// Bilateral filter evaluated directly in doubles, no LUTs.
noteval::RasterImage bilateral_naive(const noteval::RasterImage& img, int diameter,
                                     double sigma_color, double sigma_space);

/// Histogram clip + uniform redistribution, written as the two-step loop.
std::array<double, 256> clahe_clip_naive(const std::array<int, 256>& hist, double clip);

/// DBSCAN by exhaustive neighbourhood scans; same label/noise conventions as
/// the library (inclusive eps, self counted, ascending expansion).
std::vector<int> dbscan_naive(const std::vector<std::pair<double, double>>& pts, double eps,
                              int min_samples);

/// 8-connected component count via per-component flood fill.
int components_naive(const noteval::BinaryMask& mask, long min_area);

/// Ratio-test + mutual-consistency matching as a literal O(n^2) double scan.
std::vector<noteval::Match> match_naive(const std::vector<noteval::Keypoint>& a,
                                        const std::vector<noteval::Keypoint>& b, double ratio);

/// Nearest-rank percentile via a full sort.
double percentile_naive(std::vector<double> values, double p);

/// 64-bit DCT hash computed with the textbook O(N^2) cosine sums per
/// coefficient (no separable factorization).
std::uint64_t phash_naive(const noteval::RasterImage& img);

/// Grayscale 32x32 area-average used by the hash oracle, spelled out with
/// double loops over fractional coverage.
noteval::RasterImage resize_area_naive(const noteval::RasterImage& img, int out_w, int out_h);

}  // namespace oracles
