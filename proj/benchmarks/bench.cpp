// Microbenchmarks for the hot kernels and the end-to-end pair analysis.
// Inputs are generated once outside the timed loops.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include <noteval/align.hpp>
#include <noteval/augment.hpp>
#include <noteval/color.hpp>
#include <noteval/damage.hpp>
#include <noteval/dataprep.hpp>
#include <noteval/enhance.hpp>
#include <noteval/transform.hpp>
#include <noteval/ucdi.hpp>

using namespace noteval;

namespace {

RasterImage noise_gray(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    RasterImage img(w, h, 1);
    for (std::size_t i = 0; i < img.sample_count(); ++i)
        img.data()[i] = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return img;
}

/// Random rectangles and discs over a mid gray: enough structure for the
/// detector without depending on the test fixtures.
RasterImage textured_gray(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    RasterImage img(w, h, 1);
    for (std::size_t i = 0; i < img.sample_count(); ++i)
        img.data()[i] = 128;
    for (int k = 0; k < 120; ++k) {
        const int rw = rng.uniform_int(4, w / 8), rh = rng.uniform_int(4, h / 8);
        const int x0 = rng.uniform_int(0, w - rw - 1), y0 = rng.uniform_int(0, h - rh - 1);
        const std::uint8_t v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
        for (int y = y0; y < y0 + rh; ++y)
            for (int x = x0; x < x0 + rw; ++x)
                img.at(x, y, 0) = v;
    }
    return img;
}

/// Saturated note mock on a white sheet, rich enough for segmentation,
/// registration and the zone checks.
RasterImage mock_note(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    RasterImage img(w, h, 3);
    for (std::size_t i = 0; i < img.sample_count(); ++i)
        img.data()[i] = 255;
    const int mx = w / 8, my = h / 8;
    for (int y = my; y < h - my; ++y) {
        for (int x = mx; x < w - mx; ++x) {
            img.at(x, y, 0) = 60;
            img.at(x, y, 1) = 80;
            img.at(x, y, 2) = 160;
        }
    }
    for (int k = 0; k < 90; ++k) {
        const int rw = rng.uniform_int(6, w / 10), rh = rng.uniform_int(6, h / 10);
        const int x0 = rng.uniform_int(mx + 2, w - mx - rw - 3);
        const int y0 = rng.uniform_int(my + 2, h - my - rh - 3);
        const std::uint8_t r = static_cast<std::uint8_t>(rng.uniform_int(0, 200));
        const std::uint8_t g = static_cast<std::uint8_t>(rng.uniform_int(0, 200));
        for (int y = y0; y < y0 + rh; ++y) {
            for (int x = x0; x < x0 + rw; ++x) {
                img.at(x, y, 0) = r;
                img.at(x, y, 1) = g;
                img.at(x, y, 2) = 40;
            }
        }
    }
    return img;
}

RasterImage cut_holes(const RasterImage& note, std::uint64_t seed) {
    Rng rng(seed);
    RasterImage out = note;
    for (int k = 0; k < 3; ++k) {
        const int rw = rng.uniform_int(20, 50), rh = rng.uniform_int(16, 40);
        const int x0 = rng.uniform_int(note.width() / 4, note.width() / 2);
        const int y0 = rng.uniform_int(note.height() / 4, note.height() / 2);
        for (int y = y0; y < y0 + rh; ++y)
            for (int x = x0; x < x0 + rw; ++x)
                for (int c = 0; c < 3; ++c)
                    out.at(x, y, c) = 255;
    }
    return out;
}

std::vector<Correspondence> mixed_correspondences(int inliers, int outliers,
                                                  std::uint64_t seed) {
    const Mat3 h{0.96, -0.12, 30.0, 0.11, 0.94, -8.0, 1e-5, -1e-5, 1.0};
    Rng rng(seed);
    std::vector<Correspondence> corr;
    for (int i = 0; i < inliers; ++i) {
        const double x = rng.uniform(0.0, 600.0), y = rng.uniform(0.0, 400.0);
        const auto p = mat3_apply(h, x, y);
        corr.push_back({x, y, p[0], p[1]});
    }
    for (int i = 0; i < outliers; ++i)
        corr.push_back({rng.uniform(0.0, 600.0), rng.uniform(0.0, 400.0),
                        rng.uniform(0.0, 600.0), rng.uniform(0.0, 400.0)});
    return corr;
}

void bm_median_blur(benchmark::State& state) {
    const RasterImage img = noise_gray(512, 512, 1);
    const int kernel = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(median_blur(img, kernel));
    state.SetBytesProcessed(int64_t(state.iterations()) * img.sample_count());
}

void bm_bilateral_filter(benchmark::State& state) {
    const RasterImage img = noise_gray(256, 256, 2);
    const EnhanceConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(bilateral_filter(img, cfg));
    state.SetBytesProcessed(int64_t(state.iterations()) * img.sample_count());
}

void bm_clahe(benchmark::State& state) {
    const RasterImage img = mock_note(512, 512, 3);
    const EnhanceConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(clahe(img, cfg));
    state.SetBytesProcessed(int64_t(state.iterations()) * img.sample_count());
}

void bm_contrast_stretch(benchmark::State& state) {
    const RasterImage img = mock_note(512, 512, 4);
    for (auto _ : state)
        benchmark::DoNotOptimize(contrast_stretch(img));
}

void bm_enhance_pipeline(benchmark::State& state) {
    const RasterImage img = mock_note(512, 256, 5);
    const EnhanceConfig cfg;
    for (auto _ : state)
        benchmark::DoNotOptimize(enhance_pipeline(img, cfg));
}

void bm_phash(benchmark::State& state) {
    const RasterImage img = mock_note(512, 256, 6);
    for (auto _ : state)
        benchmark::DoNotOptimize(phash64(img));
}

void bm_resize_area(benchmark::State& state) {
    const RasterImage img = mock_note(2048, 1024, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(resize_area(img, 512, 256));
}

void bm_warp_image(benchmark::State& state) {
    const RasterImage img = mock_note(512, 256, 8);
    const Mat3 h{0.97, -0.08, 20.0, 0.07, 0.95, -5.0, 1e-5, 0.0, 1.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(warp_image(img, h, 512, 256, 255));
}

void bm_detect_keypoints(benchmark::State& state) {
    const RasterImage img = textured_gray(512, 256, 9);
    for (auto _ : state)
        benchmark::DoNotOptimize(detect_keypoints(img));
}

void bm_match_descriptors(benchmark::State& state) {
    const RasterImage img = textured_gray(512, 256, 10);
    const auto a = detect_keypoints(img);
    const Mat3 h{1.0, 0.0, 6.0, 0.0, 1.0, -4.0, 0.0, 0.0, 1.0};
    const auto b = detect_keypoints(warp_image(img, h, 512, 256, 128));
    for (auto _ : state)
        benchmark::DoNotOptimize(match_descriptors(a, b));
    state.counters["kps_a"] = double(a.size());
    state.counters["kps_b"] = double(b.size());
}

void bm_estimate_homography(benchmark::State& state) {
    const auto corr = mixed_correspondences(140, 60, 11);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_homography(corr));
}

void bm_ncc_match(benchmark::State& state) {
    const RasterImage window = textured_gray(96, 96, 12);
    RasterImage tmpl(64, 64, 1);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            tmpl.at(x, y, 0) = window.at(x + 13, y + 9, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(ncc_match(tmpl, window));
}

void bm_compute_ucdi(benchmark::State& state) {
    const DamageInputs in{7.6906, 13.8539, 2, 1, 26.0, 60.0, 3};
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_ucdi(in));
}

void bm_analyze_pair(benchmark::State& state) {
    const RasterImage note = mock_note(512, 256, 13);
    const RasterImage damaged = cut_holes(note, 14);
    for (auto _ : state)
        benchmark::DoNotOptimize(analyze(note, damaged));
}

}  // namespace

BENCHMARK(bm_median_blur)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_bilateral_filter)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_clahe)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_contrast_stretch)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_enhance_pipeline)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_phash)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_resize_area)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_warp_image)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_detect_keypoints)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_match_descriptors)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_estimate_homography)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_ncc_match)->Unit(benchmark::kMicrosecond);
BENCHMARK(bm_compute_ucdi)->Unit(benchmark::kNanosecond);
BENCHMARK(bm_analyze_pair)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
