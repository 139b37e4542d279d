#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include <noteval/color.hpp>
#include <noteval/image.hpp>
#include <noteval/io.hpp>
#include <noteval/morph.hpp>
#include <noteval/stats.hpp>
#include <noteval/transform.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace noteval;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

BinaryMask random_mask(int w, int h, double density, std::uint64_t seed) {
    Rng rng(seed);
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (rng.bernoulli(density))
                m.set(x, y);
    return m;
}

}  // namespace

TEST_CASE("raster image shape validation") {
    CHECK_THROWS_AS(RasterImage(0, 4, 1), Error);
    CHECK_THROWS_AS(RasterImage(4, 0, 3), Error);
    CHECK_THROWS_AS(RasterImage(4, 4, 2), Error);
    CHECK_THROWS_AS(RasterImage(2, 2, 1, std::vector<std::uint8_t>(5)), Error);

    RasterImage img(3, 2, 3, 7);
    CHECK(img.sample_count() == 18);
    img.at(2, 1, 2) = 9;
    CHECK(img.at(2, 1, 2) == 9);
    CHECK(img.row(1)[2 * 3 + 2] == 9);
}

TEST_CASE("clamp_u8 rounds half away and clamps") {
    CHECK(clamp_u8(-1.0) == 0);
    CHECK(clamp_u8(0.499) == 0);
    CHECK(clamp_u8(0.5) == 1);
    CHECK(clamp_u8(254.5) == 255);
    CHECK(clamp_u8(300.0) == 255);
}

TEST_CASE("mask boolean algebra") {
    BinaryMask a(4, 1), b(4, 1);
    a.set(0, 0);
    a.set(1, 0);
    b.set(1, 0);
    b.set(2, 0);

    CHECK(mask_and(a, b).count() == 1);
    CHECK(mask_or(a, b).count() == 3);
    CHECK(mask_not(a).count() == 2);
    const BinaryMask d = mask_diff(a, b);
    CHECK(d.count() == 1);
    CHECK(d.get(0, 0));

    CHECK_THROWS_AS(mask_and(a, BinaryMask(3, 1)), Error);
}

TEST_CASE("grayscale follows the luma weights") {
    RasterImage img(2, 1, 3);
    img.at(0, 0, 0) = 255;  // pure red
    img.at(1, 0, 0) = 64;
    img.at(1, 0, 1) = 128;
    img.at(1, 0, 2) = 192;
    const RasterImage g = to_grayscale(img);
    CHECK(g.at(0, 0) == 76);   // round(0.299 * 255)
    CHECK(g.at(1, 0) == 116);  // round(19.136 + 75.136 + 21.888)
    CHECK_THROWS_AS(to_grayscale(g), Error);
}

TEST_CASE("hsv conversion matches hand-derived values") {
    RasterImage img(3, 1, 3);
    // (64, 128, 192): H = 210deg -> 149, S = 170, V = 192.
    img.at(0, 0, 0) = 64;
    img.at(0, 0, 1) = 128;
    img.at(0, 0, 2) = 192;
    // Achromatic mid-gray.
    img.at(1, 0, 0) = img.at(1, 0, 1) = img.at(1, 0, 2) = 77;
    // Pure green: H = 120deg -> 85, S = 255, V = 255.
    img.at(2, 0, 1) = 255;

    const RasterImage hsv = rgb_to_hsv(img);
    CHECK(hsv.at(0, 0, 0) == 149);
    CHECK(hsv.at(0, 0, 1) == 170);
    CHECK(hsv.at(0, 0, 2) == 192);
    CHECK(hsv.at(1, 0, 0) == 0);
    CHECK(hsv.at(1, 0, 1) == 0);
    CHECK(hsv.at(1, 0, 2) == 77);
    CHECK(hsv.at(2, 0, 0) == 85);
    CHECK(hsv.at(2, 0, 1) == 255);
    CHECK(hsv.at(2, 0, 2) == 255);
}

TEST_CASE("lab round trip is near-lossless on a color sweep") {
    RasterImage img(256, 3, 3);
    for (int x = 0; x < 256; ++x) {
        img.at(x, 0, 0) = static_cast<std::uint8_t>(x);
        img.at(x, 0, 1) = static_cast<std::uint8_t>(255 - x);
        img.at(x, 0, 2) = 128;
        img.at(x, 1, 0) = img.at(x, 1, 1) = img.at(x, 1, 2) = static_cast<std::uint8_t>(x);
        img.at(x, 2, 0) = static_cast<std::uint8_t>(x / 2);
        img.at(x, 2, 1) = static_cast<std::uint8_t>(x);
        img.at(x, 2, 2) = static_cast<std::uint8_t>(255 - x / 3);
    }
    const RasterImage back = lab_to_rgb(rgb_to_lab(img));
    // Saturated colors with a channel near zero amplify the one-step a/b
    // quantization through the steep toe of the sRGB curve, so the max is
    // loose while the average stays tight.
    int max_err = 0;
    double sum_err = 0.0;
    for (std::size_t i = 0; i < img.sample_count(); ++i) {
        const int e = std::abs(static_cast<int>(img.data()[i]) - back.data()[i]);
        max_err = std::max(max_err, e);
        sum_err += e;
    }
    CHECK(max_err <= 20);
    CHECK(sum_err / static_cast<double>(img.sample_count()) <= 1.5);
}

TEST_CASE("lab anchors: black, white, mid gray") {
    RasterImage img(3, 1, 3);
    img.at(1, 0, 0) = img.at(1, 0, 1) = img.at(1, 0, 2) = 255;
    img.at(2, 0, 0) = img.at(2, 0, 1) = img.at(2, 0, 2) = 119;

    const RasterImage lab = rgb_to_lab(img);
    CHECK(lab.at(0, 0, 0) == 0);    // L = 0
    CHECK(lab.at(0, 0, 1) == 128);  // neutral a
    CHECK(lab.at(0, 0, 2) == 128);  // neutral b
    CHECK(lab.at(1, 0, 0) == 255);  // L = 100
    CHECK(lab.at(1, 0, 1) == 128);
    CHECK(lab.at(1, 0, 2) == 128);
    CHECK(lab.at(2, 0, 1) == 128);  // grays stay neutral
    CHECK(lab.at(2, 0, 2) == 128);
}

TEST_CASE("erode and dilate with a disc element") {
    BinaryMask m(7, 7);
    for (int y = 2; y <= 4; ++y)
        for (int x = 2; x <= 4; ++x)
            m.set(x, y);

    const BinaryMask er = erode(m, 1);
    CHECK(er.count() == 1);
    CHECK(er.get(3, 3));

    const BinaryMask di = dilate(m, 1);
    CHECK(di.count() == 21);  // 3x3 square dilated by a radius-1 disc (plus shape)
    CHECK(di.get(3, 1));
    CHECK(!di.get(1, 1));

    // Opening removes speckles smaller than the element.
    BinaryMask speck(9, 9);
    speck.set(4, 4);
    CHECK(morph_open(speck, 1).count() == 0);

    // Closing fills pinholes.
    BinaryMask holed(9, 9);
    for (int y = 2; y <= 6; ++y)
        for (int x = 2; x <= 6; ++x)
            holed.set(x, y);
    holed.set(4, 4, false);
    CHECK(morph_close(holed, 1).get(4, 4));
}

TEST_CASE("connected components agree with the flood-fill oracle") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
        for (double density : {0.2, 0.4, 0.6}) {
            const BinaryMask m = random_mask(64, 48, density, seed);
            for (long floor_area : {0L, 3L, 10L}) {
                CHECK(connected_component_count(m, floor_area) ==
                      oracles::components_naive(m, floor_area));
            }
        }
    }
}

TEST_CASE("connected components: diagonal touch is one component") {
    BinaryMask m(4, 4);
    m.set(0, 0);
    m.set(1, 1);
    m.set(2, 2);
    CHECK(connected_component_count(m) == 1);

    const ComponentSet cs = connected_components(m);
    REQUIRE(cs.count == 1);
    CHECK(cs.components[0].area == 3);
}

TEST_CASE("percentile is nearest-rank and matches the oracle") {
    std::vector<double> v{15.0, 20.0, 35.0, 40.0, 50.0};
    CHECK(percentile(v, 30.0) == 20.0);
    CHECK(percentile(v, 40.0) == 20.0);
    CHECK(percentile(v, 100.0) == 50.0);
    CHECK(percentile(v, 0.0) == 15.0);
    CHECK_THROWS_AS(percentile({}, 50.0), Error);

    Rng rng(7);
    std::vector<double> big;
    for (int i = 0; i < 1000; ++i)
        big.push_back(rng.uniform(-50.0, 50.0));
    for (double p : {0.0, 2.0, 25.0, 50.0, 75.0, 98.0, 100.0})
        CHECK(percentile(big, p) == oracles::percentile_naive(big, p));
}

TEST_CASE("percentile_u8 respects stride") {
    const std::uint8_t data[] = {10, 200, 30, 210, 50, 220, 70, 230};
    CHECK(percentile_u8(data, 4, 2, 50.0) == 30);
    CHECK(percentile_u8(data + 1, 4, 2, 50.0) == 210);
    CHECK(percentile_u8(data, 4, 2, 100.0) == 70);
}

TEST_CASE("png round trip is lossless for rgb and grayscale") {
    const RasterImage img = fixtures::textured(37, 23, 11);
    const std::string path = temp_path("noteval_io_gray.png");
    save_png(img, path);
    CHECK(load_image(path) == img);
    std::remove(path.c_str());

    const RasterImage note = fixtures::synthetic_note(80, 50, 3);
    const std::string cpath = temp_path("noteval_io_rgb.png");
    save_png(note, cpath);
    CHECK(load_image(cpath) == note);
    std::remove(cpath.c_str());
}

TEST_CASE("jpeg round trip is close and sniffing ignores the extension") {
    const RasterImage note = fixtures::synthetic_note(96, 64, 5);
    const std::string path = temp_path("noteval_io.jpg");
    save_jpeg(note, path, 95);
    const RasterImage back = load_image(path);
    REQUIRE(back.same_shape(note));
    double err = 0.0;
    for (std::size_t i = 0; i < note.sample_count(); ++i)
        err += std::abs(static_cast<int>(note.data()[i]) - back.data()[i]);
    CHECK(err / note.sample_count() < 6.0);

    // Same bytes under a lying extension still load (magic sniffing).
    const std::string lied = temp_path("noteval_io_lied.png");
    std::filesystem::copy_file(path, lied, std::filesystem::copy_options::overwrite_existing);
    CHECK(load_image(lied).same_shape(note));
    std::remove(path.c_str());
    std::remove(lied.c_str());
}

TEST_CASE("io errors: missing file, junk bytes, bad extension") {
    CHECK_THROWS_AS(load_image(temp_path("noteval_does_not_exist.png")), Error);

    const std::string junk = temp_path("noteval_junk.png");
    FILE* f = std::fopen(junk.c_str(), "wb");
    std::fputs("definitely not an image", f);
    std::fclose(f);
    CHECK_THROWS_AS(load_image(junk), Error);
    std::remove(junk.c_str());

    CHECK_THROWS_AS(save_image(RasterImage(2, 2, 1), temp_path("noteval.bmp")), Error);
}

TEST_CASE("mask png round trip") {
    const BinaryMask m = random_mask(33, 17, 0.3, 9);
    const std::string path = temp_path("noteval_mask.png");
    save_mask_png(m, path);
    CHECK(load_mask_png(path) == m);
    std::remove(path.c_str());
}

TEST_CASE("area resize averages exactly on aligned blocks") {
    RasterImage img(4, 2, 1);
    const std::uint8_t vals[] = {10, 20, 30, 40, 50, 60, 70, 80};
    for (int i = 0; i < 8; ++i)
        img.data()[i] = vals[i];
    const RasterImage half = resize_area(img, 2, 1);
    CHECK(half.at(0, 0) == 35);  // mean(10, 20, 50, 60)
    CHECK(half.at(1, 0) == 55);  // mean(30, 40, 70, 80)

    // Fractional coverage agrees with the naive double-loop oracle.
    const RasterImage tex = fixtures::textured(50, 34, 21);
    const RasterImage a = resize_area(tex, 17, 11);
    const RasterImage b = oracles::resize_area_naive(tex, 17, 11);
    for (std::size_t i = 0; i < a.sample_count(); ++i)
        CHECK(std::abs(static_cast<int>(a.data()[i]) - b.data()[i]) <= 1);
}

TEST_CASE("bilinear resize at identity size is a copy") {
    const RasterImage img = fixtures::textured(31, 19, 2);
    CHECK(resize_bilinear(img, 31, 19) == img);
}

TEST_CASE("mat3 algebra") {
    const Mat3 m{2, 0, 3, 0, 4, -1, 0, 0, 1};
    const Mat3 inv = mat3_inverse(m);
    const Mat3 id = mat3_mul(m, inv);
    for (int i = 0; i < 9; ++i)
        CHECK(id[i] == doctest::Approx(i % 4 == 0 ? 1.0 : 0.0).epsilon(1e-12));

    const auto [x, y] = mat3_apply(m, 5.0, 7.0);
    CHECK(x == doctest::Approx(13.0));
    CHECK(y == doctest::Approx(27.0));

    CHECK_THROWS_AS(mat3_inverse(Mat3{1, 2, 3, 2, 4, 6, 0, 0, 1}), Error);
}

TEST_CASE("warp with identity copies; translation shifts and fills") {
    const RasterImage img = fixtures::textured(24, 16, 4);
    const Mat3 id{1, 0, 0, 0, 1, 0, 0, 0, 1};
    CHECK(warp_image(img, id, 24, 16, 0) == img);

    const Mat3 shift{1, 0, 10, 0, 1, 0, 0, 0, 1};
    const RasterImage moved = warp_image(img, shift, 24, 16, 255);
    CHECK(moved.at(3, 5) == 255);              // vacated strip
    CHECK(moved.at(13, 5) == img.at(3, 5));    // shifted content

    BinaryMask m(24, 16);
    m.set(3, 3);
    const BinaryMask moved_mask = warp_mask(m, shift, 24, 16);
    CHECK(moved_mask.get(13, 3));
    CHECK(moved_mask.count() == 1);
}
