#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include <noteval/align.hpp>
#include <noteval/image.hpp>
#include <noteval/transform.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace noteval;

namespace {

RasterImage rot90_cw(const RasterImage& img) {
    RasterImage out(img.height(), img.width(), img.channels());
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x)
            for (int c = 0; c < img.channels(); ++c)
                out.at(x, y, c) = img.at(y, img.height() - 1 - x, c);
    return out;
}

std::vector<Keypoint> random_descriptors(int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Keypoint> kps(n);
    for (Keypoint& kp : kps) {
        kp.descriptor.resize(128);
        double norm = 0.0;
        for (float& v : kp.descriptor) {
            v = static_cast<float>(rng.uniform());
            norm += double(v) * v;
        }
        norm = std::sqrt(norm);
        for (float& v : kp.descriptor)
            v = static_cast<float>(v / norm);
    }
    return kps;
}

double mae(const RasterImage& a, const RasterImage& b) {
    REQUIRE(a.sample_count() == b.sample_count());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.sample_count(); ++i)
        acc += std::abs(int(a.data()[i]) - int(b.data()[i]));
    return acc / double(a.sample_count());
}

std::vector<Correspondence> synthetic_correspondences(const Mat3& h, int n_inliers,
                                                      int n_outliers, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Correspondence> corr;
    for (int i = 0; i < n_inliers; ++i) {
        const double x = rng.uniform(0.0, 640.0), y = rng.uniform(0.0, 480.0);
        const auto p = mat3_apply(h, x, y);
        corr.push_back({x, y, p[0], p[1]});
    }
    for (int i = 0; i < n_outliers; ++i) {
        const double x = rng.uniform(0.0, 640.0), y = rng.uniform(0.0, 480.0);
        const auto p = mat3_apply(h, x, y);
        // Push the target well past the inlier threshold.
        const double dx = (rng.bernoulli(0.5) ? 1 : -1) * rng.uniform(20.0, 80.0);
        const double dy = (rng.bernoulli(0.5) ? 1 : -1) * rng.uniform(20.0, 80.0);
        corr.push_back({x, y, p[0] + dx, p[1] + dy});
    }
    return corr;
}

}  // namespace

// ---------------------------------------------------------------------------
// detect_keypoints
// ---------------------------------------------------------------------------

TEST_CASE("detect_keypoints: blank image has no structure") {
    RasterImage blank(128, 128, 1);
    std::fill(blank.data(), blank.data() + blank.sample_count(), std::uint8_t{140});
    CHECK_THROWS_WITH_AS(detect_keypoints(blank), "featureless image", Error);
}

TEST_CASE("detect_keypoints: rejects small or colour input") {
    CHECK_THROWS_AS(detect_keypoints(fixtures::textured(63, 63, 1)), Error);
    CHECK_THROWS_AS(detect_keypoints(fixtures::synthetic_note(128, 64, 1)), Error);  // 3ch
}

TEST_CASE("detect_keypoints: checkerboard yields a stable crowd of corners") {
    const auto kps = detect_keypoints(fixtures::checkerboard(256, 256, 32));
    // Recorded 636 on this fixture; hold the count within +-20%.
    CHECK(kps.size() >= 509);
    CHECK(kps.size() <= 763);
}

TEST_CASE("detect_keypoints: well-formed, sorted, in-bounds output") {
    const RasterImage img = fixtures::textured(320, 240, 77);
    const auto kps = detect_keypoints(img);
    REQUIRE(!kps.empty());
    for (std::size_t i = 0; i < kps.size(); ++i) {
        const Keypoint& kp = kps[i];
        CHECK(kp.x >= 0.0);
        CHECK(kp.x < img.width());
        CHECK(kp.y >= 0.0);
        CHECK(kp.y < img.height());
        CHECK(kp.scale > 0.0);
        CHECK(kp.descriptor.size() == 128);
        const double norm = std::sqrt(std::inner_product(
            kp.descriptor.begin(), kp.descriptor.end(), kp.descriptor.begin(), 0.0));
        CHECK(norm > 0.0);
        if (i > 0)
            CHECK(kps[i - 1].response >= kp.response);
    }
}

TEST_CASE("detect_keypoints: deterministic run to run") {
    const RasterImage img = fixtures::textured(256, 192, 5);
    const auto a = detect_keypoints(img);
    const auto b = detect_keypoints(img);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        CHECK(a[i].scale == b[i].scale);
        CHECK(a[i].orientation == b[i].orientation);
        CHECK(a[i].descriptor == b[i].descriptor);
    }
}

TEST_CASE("detect_keypoints: cap keeps the strongest responses") {
    const RasterImage img = fixtures::textured(320, 240, 8);
    const auto full = detect_keypoints(img);
    AlignConfig cfg;
    cfg.max_keypoints = 30;
    const auto capped = detect_keypoints(img, cfg);
    REQUIRE(full.size() > 30);
    REQUIRE(capped.size() == 30);
    for (std::size_t i = 0; i < capped.size(); ++i) {
        CHECK(capped[i].x == full[i].x);
        CHECK(capped[i].response == full[i].response);
    }
}

TEST_CASE("detect_keypoints: quarter-turn keeps most descriptors matchable") {
    const RasterImage img = fixtures::textured(256, 256, 21);
    const RasterImage turned = rot90_cw(img);
    const auto a = detect_keypoints(img);
    const auto b = detect_keypoints(turned);
    REQUIRE(a.size() >= 10);
    REQUIRE(b.size() >= 10);
    const auto matches = match_descriptors(a, b);
    const double rate = double(matches.size()) / double(std::min(a.size(), b.size()));
    MESSAGE("quarter-turn match rate: " << rate << " (" << matches.size() << " matches)");
    CHECK(rate >= 0.6);
}

// ---------------------------------------------------------------------------
// match_descriptors
// ---------------------------------------------------------------------------

TEST_CASE("match_descriptors: a list matched to itself is the identity") {
    const auto kps = random_descriptors(50, 13);
    const auto matches = match_descriptors(kps, kps);
    REQUIRE(matches.size() == 50);
    for (const Match& m : matches) {
        CHECK(m.a == m.b);
        CHECK(m.distance == 0.0);
    }
}

TEST_CASE("match_descriptors: disjoint random descriptors fail the ratio test") {
    const auto a = random_descriptors(30, 17);
    const auto b = random_descriptors(30, 18);
    CHECK_THROWS_WITH_AS(match_descriptors(a, b), "insufficient matches", Error);
}

TEST_CASE("match_descriptors: empty list is an error") {
    const auto kps = random_descriptors(5, 2);
    CHECK_THROWS_AS(match_descriptors({}, kps), Error);
    CHECK_THROWS_AS(match_descriptors(kps, {}), Error);
}

TEST_CASE("match_descriptors: equals the exhaustive oracle on detector output") {
    const RasterImage img = fixtures::textured(256, 256, 33);
    const auto a = detect_keypoints(img);
    const auto b = detect_keypoints(rot90_cw(img));
    AlignConfig cfg;
    const auto got = match_descriptors(a, b, cfg);
    const auto want = oracles::match_naive(a, b, cfg.ratio_test);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].a == want[i].a);
        CHECK(got[i].b == want[i].b);
        CHECK(got[i].distance == want[i].distance);
    }
}

TEST_CASE("match_descriptors: single-candidate list skips the ratio test") {
    auto a = random_descriptors(6, 40);
    const std::vector<Keypoint> b = {a[2]};  // exact copy: distance 0
    const AlignConfig cfg = [] {
        AlignConfig c;
        c.min_matches = 4;
        return c;
    }();
    // Only one mutual pair can exist, so this must throw for min_matches = 4 ...
    CHECK_THROWS_AS(match_descriptors(a, b, cfg), Error);
    // ... but the pair itself survives when the floor allows it.
    AlignConfig loose = cfg;
    loose.min_matches = 4;
    std::vector<Keypoint> b4 = {a[0], a[1], a[2], a[3]};
    const auto matches = match_descriptors(a, b4, loose);
    REQUIRE(matches.size() >= 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(matches[i].a == i);
        CHECK(matches[i].b == i);
    }
}

// ---------------------------------------------------------------------------
// estimate_homography
// ---------------------------------------------------------------------------

TEST_CASE("estimate_homography: identity correspondences give the identity") {
    Rng rng(3);
    std::vector<Correspondence> corr;
    for (int i = 0; i < 24; ++i) {
        const double x = rng.uniform(0.0, 500.0), y = rng.uniform(0.0, 300.0);
        corr.push_back({x, y, x, y});
    }
    const HomographyResult res = estimate_homography(corr);
    const Mat3 eye{1, 0, 0, 0, 1, 0, 0, 0, 1};
    for (int i = 0; i < 9; ++i)
        CHECK(std::abs(res.h[i] - eye[i]) < 1e-6);
    CHECK(res.inlier_count == 24);
    CHECK(res.mean_reproj_error < 1e-6);
}

TEST_CASE("estimate_homography: recovers a synthetic map through 30% outliers") {
    const Mat3 truth{0.95, -0.18, 40.0, 0.17, 0.92, -12.0, 1e-5, -2e-5, 1.0};
    const auto corr = synthetic_correspondences(truth, 100, 43, 99);
    const HomographyResult res = estimate_homography(corr);
    REQUIRE(res.inlier_count == 100);
    for (int i = 0; i < 100; ++i)
        CHECK(res.inliers[i] == 1);
    for (int i = 100; i < 143; ++i)
        CHECK(res.inliers[i] == 0);
    // Max reprojection error over the true inliers.
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto p = mat3_apply(res.h, corr[i].x0, corr[i].y0);
        worst = std::max(worst, std::hypot(p[0] - corr[i].x1, p[1] - corr[i].y1));
    }
    CHECK(worst < 1.0);
    CHECK(res.mean_reproj_error < 1.0);
}

TEST_CASE("estimate_homography: under-determined and consensus-free inputs fail") {
    Rng rng(7);
    std::vector<Correspondence> three;
    for (int i = 0; i < 3; ++i)
        three.push_back({rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0),
                         rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)});
    CHECK_THROWS_AS(estimate_homography(three), Error);

    std::vector<Correspondence> garbage;
    for (int i = 0; i < 14; ++i)
        garbage.push_back({rng.uniform(0.0, 600.0), rng.uniform(0.0, 400.0),
                           rng.uniform(0.0, 600.0), rng.uniform(0.0, 400.0)});
    CHECK_THROWS_WITH_AS(estimate_homography(garbage), "alignment failed", Error);
}

TEST_CASE("estimate_homography: collinear points cannot fix a frame") {
    std::vector<Correspondence> corr;
    for (int i = 0; i < 20; ++i) {
        const double x = 10.0 * i, y = 3.0 * i + 5.0;  // one line
        corr.push_back({x, y, x + 4.0, y - 2.0});
    }
    CHECK_THROWS_AS(estimate_homography(corr), Error);
}

TEST_CASE("estimate_homography: result ignores correspondence order") {
    const Mat3 truth{1.05, 0.08, -20.0, -0.06, 0.98, 14.0, 2e-5, 1e-5, 1.0};
    auto corr = synthetic_correspondences(truth, 60, 25, 1234);
    const HomographyResult base = estimate_homography(corr);

    Rng rng(555);
    for (int round = 0; round < 3; ++round) {
        for (std::size_t i = corr.size(); i > 1; --i)
            std::swap(corr[i - 1], corr[rng.uniform_int(0, int(i) - 1)]);
        const HomographyResult shuffled = estimate_homography(corr);
        CHECK(shuffled.inlier_count == base.inlier_count);
        for (int k = 0; k < 9; ++k)
            CHECK(std::abs(shuffled.h[k] - base.h[k]) < 1e-4);
    }
}

TEST_CASE("estimate_homography: noisy targets still fit below a pixel") {
    const Mat3 truth{1.0, 0.05, 10.0, -0.04, 1.0, -6.0, 0.0, 0.0, 1.0};
    auto corr = synthetic_correspondences(truth, 80, 0, 31);
    Rng rng(32);
    for (auto& c : corr) {
        c.x1 += rng.uniform(-0.5, 0.5);
        c.y1 += rng.uniform(-0.5, 0.5);
    }
    const HomographyResult res = estimate_homography(corr);
    CHECK(res.inlier_count >= 75);
    CHECK(res.mean_reproj_error < 1.0);
}

// ---------------------------------------------------------------------------
// warp_to_reference
// ---------------------------------------------------------------------------

TEST_CASE("warp_to_reference: identity is lossless") {
    const RasterImage img = fixtures::synthetic_note(120, 60, 2);
    const Mat3 eye{1, 0, 0, 0, 1, 0, 0, 0, 1};
    const RasterImage out = warp_to_reference(img, eye, img.width(), img.height());
    CHECK(out == img);
}

TEST_CASE("warp_to_reference: pure translation shifts content, vacates white") {
    const RasterImage img = fixtures::synthetic_note(100, 50, 4);
    const Mat3 shift{1, 0, 10, 0, 1, 0, 0, 0, 1};
    const RasterImage out = warp_to_reference(img, shift, img.width(), img.height());
    REQUIRE(out.width() == img.width());
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            for (int c = 0; c < 3; ++c) {
                if (x < 10)
                    CHECK(out.at(x, y, c) == 255);
                else
                    CHECK(out.at(x, y, c) == img.at(x - 10, y, c));
            }
        }
    }
}

TEST_CASE("warp_to_reference: output matches the requested frame") {
    const RasterImage img = fixtures::synthetic_note(90, 45, 6);
    const Mat3 eye{1, 0, 0, 0, 1, 0, 0, 0, 1};
    const RasterImage out = warp_to_reference(img, eye, 130, 70);
    CHECK(out.width() == 130);
    CHECK(out.height() == 70);
}

TEST_CASE("warp_to_reference: mild round trip loses little") {
    // Band-limited field: bilinear loss stays bounded by the curvature, so a
    // tight round-trip budget is justified (hard edges would not allow one).
    constexpr double tau = 6.283185307179586;
    RasterImage img(256, 128, 1);
    for (int y = 0; y < 128; ++y)
        for (int x = 0; x < 256; ++x)
            img.at(x, y) = clamp_u8(128.0 + 60.0 * std::sin(x * (tau / 48.0)) *
                                                std::sin(y * (tau / 40.0)) +
                                    30.0 * std::sin((x + y) * (tau / 64.0)));
    const double a = 2.0 * 3.14159265358979 / 180.0;
    const Mat3 h{std::cos(a), -std::sin(a), 3.7, std::sin(a), std::cos(a), -2.1, 0, 0, 1};
    const RasterImage warped = warp_to_reference(img, h, img.width(), img.height());
    const RasterImage back = warp_to_reference(warped, mat3_inverse(h), img.width(), img.height());
    // Skip the frame edge: that strip leaves the canvas on the way out and
    // returns as fill, which is not a resampling error.
    const int inset = 16;
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = inset; y < img.height() - inset; ++y) {
        for (int x = inset; x < img.width() - inset; ++x) {
            sum += std::abs(int(img.at(x, y)) - int(back.at(x, y)));
            ++n;
        }
    }
    CHECK(sum / double(n) < 1.5);
}
