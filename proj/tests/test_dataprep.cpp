#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <doctest.h>

#include <noteval/augment.hpp>
#include <noteval/dataprep.hpp>
#include <noteval/image.hpp>
#include <noteval/transform.hpp>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace noteval;

namespace {

RasterImage brightened(const RasterImage& img, int delta) {
    RasterImage out = img;
    for (std::size_t i = 0; i < out.sample_count(); ++i)
        out.data()[i] = static_cast<std::uint8_t>(std::clamp(int(out.data()[i]) + delta, 0, 255));
    return out;
}

/// A 64-bit value with exactly `bits` low bits set.
std::uint64_t low_bits(int bits) { return bits >= 64 ? ~0ull : (1ull << bits) - 1; }

std::map<Split, int> split_counts(const SplitManifest& m, const std::set<std::string>& ids) {
    std::map<Split, int> counts;
    for (const auto& [id, split] : m.assignments)
        if (ids.count(id))
            ++counts[split];
    return counts;
}

}  // namespace

// ---------------------------------------------------------------------------
// phash64 / hamming
// ---------------------------------------------------------------------------

TEST_CASE("hamming: inspection values") {
    CHECK(hamming(0xDEADBEEF, 0xDEADBEEF) == 0);
    CHECK(hamming(0x12345678, ~0x12345678ull) == 64);
    CHECK(hamming(0x0F, 0x00) == 4);
}

TEST_CASE("phash64: matches the direct DCT oracle") {
    const std::vector<RasterImage> images = {
        fixtures::textured(77, 53, 3),
        fixtures::textured(128, 128, 4),
        fixtures::synthetic_note(120, 60, 8),
        fixtures::checkerboard(64, 64, 8),
        fixtures::checkerboard(48, 96, 5),
    };
    for (std::size_t i = 0; i < images.size(); ++i) {
        CAPTURE(i);
        CHECK(phash64(images[i]) == oracles::phash_naive(images[i]));
    }
}

TEST_CASE("phash64: constant image hashes to zero, DC bit always clear") {
    RasterImage flat(50, 40, 3);
    std::fill(flat.data(), flat.data() + flat.sample_count(), std::uint8_t{180});
    CHECK(phash64(flat) == 0);  // all AC terms zero, nothing exceeds the median
    for (std::uint64_t seed = 0; seed < 8; ++seed)
        CHECK((phash64(fixtures::textured(90, 70, seed)) >> 63) == 0);
}

TEST_CASE("phash64: identical images collide, resized copies stay close") {
    const RasterImage img = fixtures::synthetic_note(160, 80, 12);
    CHECK(hamming(phash64(img), phash64(img)) == 0);
    const RasterImage half = resize_area(img, 80, 40);
    CHECK(hamming(phash64(img), phash64(half)) <= 5);
}

TEST_CASE("phash64: +10 brightness stays within the duplicate threshold") {
    int worst = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const RasterImage img = fixtures::synthetic_note(144, 72, seed);
        const int d = hamming(phash64(img), phash64(brightened(img, 10)));
        CAPTURE(seed);
        CHECK(d <= 5);
        worst = std::max(worst, d);
    }
    MESSAGE("max brightness-shift distance over 20 fixtures: " << worst);
}

TEST_CASE("phash64: unrelated images separate beyond the threshold") {
    std::vector<std::uint64_t> hashes;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        hashes.push_back(phash64(fixtures::textured(128, 96, 100 + seed)));
    int pairs = 0, separated = 0;
    for (std::size_t i = 0; i < hashes.size(); ++i) {
        for (std::size_t j = i + 1; j < hashes.size(); ++j) {
            ++pairs;
            if (hamming(hashes[i], hashes[j]) > 5)
                ++separated;
        }
    }
    CHECK(pairs == 190);
    CHECK(separated >= 181);  // >5 bits apart in at least 95% of pairs
}

TEST_CASE("phash64: zero-area image is an error") {
    CHECK_THROWS_AS(phash64(RasterImage()), Error);
}

// ---------------------------------------------------------------------------
// deduplicate / cross_dataset_dedup
// ---------------------------------------------------------------------------

TEST_CASE("deduplicate: single image is retained") {
    const DedupResult res = deduplicate({{"only.png", "usd", 0x1234}}, {});
    REQUIRE(res.retained.size() == 1);
    CHECK(res.retained[0].id == "only.png");
    CHECK(res.duplicates.empty());
}

TEST_CASE("deduplicate: identical copies collapse to the lexicographically first") {
    const std::vector<DedupItem> items = {
        {"c.png", "usd", 0xABCD},
        {"a.png", "usd", 0xABCD},
        {"b.png", "usd", 0xABCD},
    };
    const DedupResult res = deduplicate(items, {});
    REQUIRE(res.retained.size() == 1);
    CHECK(res.retained[0].id == "a.png");
    REQUIRE(res.duplicates.size() == 2);
    for (const auto& [dropped, kept] : res.duplicates)
        CHECK(kept == "a.png");
}

TEST_CASE("deduplicate: greedy chain keeps the endpoints") {
    // d(h1,h2) = 4, d(h2,h3) = 4, d(h1,h3) = 8.
    const std::uint64_t h1 = 0x00, h2 = 0x0F, h3 = 0xFF;
    REQUIRE(hamming(h1, h2) == 4);
    REQUIRE(hamming(h2, h3) == 4);
    REQUIRE(hamming(h1, h3) == 8);
    const DedupResult res = deduplicate(
        {{"1.png", "eur", h1}, {"2.png", "eur", h2}, {"3.png", "eur", h3}}, {});
    REQUIRE(res.retained.size() == 2);
    CHECK(res.retained[0].id == "1.png");
    CHECK(res.retained[1].id == "3.png");
    REQUIRE(res.duplicates.size() == 1);
    CHECK(res.duplicates[0].first.id == "2.png");
    CHECK(res.duplicates[0].second == "1.png");
}

TEST_CASE("deduplicate: threshold is inclusive at exactly 5 bits") {
    for (int bits : {4, 5, 6}) {
        const DedupResult res = deduplicate(
            {{"base.png", "usd", 0}, {"near.png", "usd", low_bits(bits)}}, {});
        CAPTURE(bits);
        CHECK(res.retained.size() == (bits <= 5 ? 1u : 2u));
    }
}

TEST_CASE("deduplicate: classes are independent") {
    const DedupResult res = deduplicate(
        {{"a.png", "usd", 0x77}, {"b.png", "eur", 0x77}}, {});
    CHECK(res.retained.size() == 2);
}

TEST_CASE("deduplicate: retained hashes pairwise exceed the threshold, idempotent") {
    Rng rng(2024);
    std::vector<DedupItem> items;
    const char* labels[] = {"usd", "eur", "inr"};
    for (int i = 0; i < 300; ++i) {
        DedupItem item;
        item.id = "img_" + std::to_string(1000 + i) + ".png";
        item.label = labels[i % 3];
        // Cluster hashes so plenty of near-duplicates occur.
        item.hash = rng.next() & 0x00000000FFFF00FFull;
        items.push_back(item);
    }
    DedupConfig cfg;
    const DedupResult res = deduplicate(items, cfg);
    CHECK(res.retained.size() + res.duplicates.size() == items.size());
    CHECK(!res.duplicates.empty());  // the clustering above must actually collide

    for (const auto& [label, stored] : res.index.classes())
        for (std::size_t i = 0; i < stored.size(); ++i)
            for (std::size_t j = i + 1; j < stored.size(); ++j)
                CHECK(hamming(stored[i].first, stored[j].first) > cfg.threshold);

    const DedupResult again = deduplicate(res.retained, cfg);
    CHECK(again.retained.size() == res.retained.size());
    CHECK(again.duplicates.empty());
}

TEST_CASE("cross_dataset_dedup: disjoint sources keep everything") {
    const std::vector<std::vector<DedupItem>> sources = {
        {{"a1.png", "usd", 0x0000}, {"a2.png", "usd", 0xFF00}},
        {{"b1.png", "usd", 0x00FF000000ull}},
    };
    const DedupResult res = cross_dataset_dedup(sources, {});
    CHECK(res.retained.size() == 3);
}

TEST_CASE("cross_dataset_dedup: later source loses exact copies") {
    const std::vector<std::vector<DedupItem>> sources = {
        {{"first/a.png", "usd", 0xBEEF}},
        {{"second/a.png", "usd", 0xBEEF}},
    };
    const DedupResult res = cross_dataset_dedup(sources, {});
    REQUIRE(res.retained.size() == 1);
    CHECK(res.retained[0].id == "first/a.png");
    REQUIRE(res.duplicates.size() == 1);
    CHECK(res.duplicates[0].second == "first/a.png");
}

TEST_CASE("cross_dataset_dedup: boundary distances 3, 5, 6 against the first source") {
    const std::vector<std::vector<DedupItem>> sources = {
        {{"a/base.png", "usd", 0}},
        {{"b/d3.png", "usd", low_bits(3)}},
        {{"c/d5.png", "usd", low_bits(5)}},
        {{"d/d6.png", "usd", low_bits(6)}},
    };
    const DedupResult res = cross_dataset_dedup(sources, {});
    REQUIRE(res.retained.size() == 2);
    CHECK(res.retained[0].id == "a/base.png");
    CHECK(res.retained[1].id == "d/d6.png");
}

TEST_CASE("dedup config validation") {
    DedupConfig cfg;
    cfg.threshold = -1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg.threshold = 65;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.hash_bits = 32;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK_NOTHROW(DedupConfig{}.validate());
}

// ---------------------------------------------------------------------------
// stratified_split
// ---------------------------------------------------------------------------

namespace {

std::vector<std::pair<std::string, std::string>> make_class(const std::string& label, int n) {
    std::vector<std::pair<std::string, std::string>> items;
    for (int i = 0; i < n; ++i)
        items.emplace_back(label + "_" + std::to_string(100 + i) + ".png", label);
    return items;
}

std::set<std::string> ids_of(const std::vector<std::pair<std::string, std::string>>& items) {
    std::set<std::string> ids;
    for (const auto& [id, label] : items)
        ids.insert(id);
    return ids;
}

}  // namespace

TEST_CASE("stratified_split: exact ratios for 100 and 10") {
    auto items = make_class("usd", 100);
    const auto extra = make_class("eur", 10);
    items.insert(items.end(), extra.begin(), extra.end());
    const SplitManifest m = stratified_split(items, {}, 7);
    CHECK(m.assignments.size() == 110);
    const auto usd = split_counts(m, ids_of(make_class("usd", 100)));
    CHECK(usd.at(Split::Train) == 80);
    CHECK(usd.at(Split::Val) == 10);
    CHECK(usd.at(Split::Test) == 10);
    const auto eur = split_counts(m, ids_of(make_class("eur", 10)));
    CHECK(eur.at(Split::Train) == 8);
    CHECK(eur.at(Split::Val) == 1);
    CHECK(eur.at(Split::Test) == 1);
    CHECK(m.warnings.empty());
}

TEST_CASE("stratified_split: class of 7 follows the largest-remainder rule") {
    // floors 5/0/0, remainders 0.6/0.7/0.7 -> val and test take the leftovers.
    const SplitManifest m = stratified_split(make_class("usd", 7), {}, 11);
    const auto counts = split_counts(m, ids_of(make_class("usd", 7)));
    int total = 0;
    for (const auto& [split, n] : counts)
        total += n;
    CHECK(total == 7);
    CHECK(counts.at(Split::Train) == 5);
    CHECK(counts.at(Split::Val) == 1);
    CHECK(counts.at(Split::Test) == 1);
    // Deterministic: the same seed reproduces the same assignment map.
    const SplitManifest again = stratified_split(make_class("usd", 7), {}, 11);
    CHECK(again.assignments == m.assignments);
}

TEST_CASE("stratified_split: per-class ratio error at most one image") {
    for (int n : {3, 4, 5, 9, 13, 23, 37, 61}) {
        const SplitManifest m = stratified_split(make_class("c", n), {}, 3);
        const auto counts = split_counts(m, ids_of(make_class("c", n)));
        const double expect[3] = {0.8 * n, 0.1 * n, 0.1 * n};
        const Split splits[3] = {Split::Train, Split::Val, Split::Test};
        int total = 0;
        for (int i = 0; i < 3; ++i) {
            const int got = counts.count(splits[i]) ? counts.at(splits[i]) : 0;
            total += got;
            CAPTURE(n);
            CAPTURE(i);
            CHECK(std::abs(got - expect[i]) <= 1.0);
        }
        CHECK(total == n);
    }
}

TEST_CASE("stratified_split: partition is disjoint and exhaustive") {
    auto items = make_class("usd", 41);
    const auto eur = make_class("eur", 17);
    items.insert(items.end(), eur.begin(), eur.end());
    const SplitManifest m = stratified_split(items, {}, 99);
    CHECK(m.assignments.size() == items.size());  // map keys are unique by construction
    for (const auto& [id, label] : items)
        CHECK(m.assignments.count(id) == 1);
}

TEST_CASE("stratified_split: tiny classes go to train with a warning") {
    const SplitManifest m = stratified_split(make_class("rare", 2), {}, 5);
    CHECK(m.assignments.size() == 2);
    for (const auto& [id, split] : m.assignments)
        CHECK(split == Split::Train);
    REQUIRE(m.warnings.size() == 1);
    CHECK(m.warnings[0].find("rare") != std::string::npos);
}

TEST_CASE("stratified_split: seed changes the shuffle, not the counts") {
    const auto items = make_class("usd", 60);
    const SplitManifest a = stratified_split(items, {}, 1);
    const SplitManifest b = stratified_split(items, {}, 2);
    CHECK(a.assignments != b.assignments);
    for (const SplitManifest* m : {&a, &b}) {
        const auto counts = split_counts(*m, ids_of(items));
        CHECK(counts.at(Split::Train) == 48);
        CHECK(counts.at(Split::Val) == 6);
        CHECK(counts.at(Split::Test) == 6);
    }
}

TEST_CASE("stratified_split: malformed ratios rejected") {
    CHECK_THROWS_AS(stratified_split(make_class("c", 5), {0.5, 0.1, 0.1}, 0), Error);
    CHECK_THROWS_AS(stratified_split(make_class("c", 5), {1.2, -0.1, -0.1}, 0), Error);
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

namespace {

AugmentConfig identity_config() {
    AugmentConfig cfg;
    cfg.crop_scale_lo = cfg.crop_scale_hi = 1.0;
    cfg.rotation_deg = 0.0;
    cfg.hflip_prob = 0.0;
    cfg.jitter_brightness = cfg.jitter_contrast = cfg.jitter_saturation = 0.0;
    cfg.jitter_hue = 0.0;
    cfg.affine_translate = 0.0;
    cfg.affine_scale_lo = cfg.affine_scale_hi = 1.0;
    cfg.affine_shear_deg = 0.0;
    cfg.erase_prob = 0.0;
    return cfg;
}

}  // namespace

TEST_CASE("augment: collapsed ranges reproduce the plain resized input") {
    const RasterImage img = fixtures::synthetic_note(96, 64, 6);
    Rng rng(1);
    const RasterImage out = augment(img, identity_config(), rng);
    CHECK(out == resize_bilinear(img, 224, 224));
}

TEST_CASE("augment: fixed seed is byte-identical, different seeds diverge") {
    const RasterImage img = fixtures::synthetic_note(128, 64, 6);
    AugmentConfig cfg;
    Rng a(42), b(42), c(43);
    const RasterImage out_a = augment(img, cfg, a);
    const RasterImage out_b = augment(img, cfg, b);
    const RasterImage out_c = augment(img, cfg, c);
    CHECK(out_a == out_b);
    CHECK(out_a != out_c);
}

TEST_CASE("augment: output is always a 3-channel square of output_size") {
    AugmentConfig cfg;
    Rng rng(9);
    for (const RasterImage& img :
         {fixtures::synthetic_note(200, 90, 1), fixtures::textured(64, 64, 2)}) {
        const RasterImage out = augment(img, cfg, rng);
        CHECK(out.width() == 224);
        CHECK(out.height() == 224);
        CHECK(out.channels() == 3);
    }
    cfg.output_size = 96;
    const RasterImage small = augment(fixtures::textured(64, 64, 2), cfg, rng);
    CHECK(small.width() == 96);
    CHECK(small.height() == 96);
}

TEST_CASE("augment: erase rectangle area lands in range over 1000 draws") {
    AugmentConfig cfg;
    cfg.erase_prob = 1.0;
    const int w = 100, h = 80;
    const double npx = double(w) * h;
    Rng rng(77);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto rect = sample_erase_rect(rng, cfg, w, h);
        REQUIRE(rect.has_value());
        CHECK(rect->x >= 0);
        CHECK(rect->y >= 0);
        CHECK(rect->x + rect->w <= w);
        CHECK(rect->y + rect->h <= h);
        const double frac = double(rect->w) * rect->h / npx;
        CAPTURE(trial);
        CHECK(frac >= cfg.erase_area_lo);
        CHECK(frac <= cfg.erase_area_hi);
    }
}

TEST_CASE("augment: erase probability honoured at the extremes") {
    AugmentConfig cfg;
    cfg.erase_prob = 0.0;
    Rng rng(5);
    for (int i = 0; i < 50; ++i)
        CHECK_FALSE(sample_erase_rect(rng, cfg, 64, 64).has_value());
    cfg.erase_prob = 0.5;
    int fired = 0;
    for (int i = 0; i < 1000; ++i)
        fired += sample_erase_rect(rng, cfg, 64, 64).has_value() ? 1 : 0;
    CHECK(fired > 400);
    CHECK(fired < 600);
}

TEST_CASE("augment config validation") {
    AugmentConfig cfg;
    cfg.crop_scale_lo = 0.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.crop_scale_hi = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.hflip_prob = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.erase_area_lo = 0.2;
    cfg.erase_area_hi = 0.1;
    CHECK_THROWS_AS(cfg.validate(), Error);
    cfg = {};
    cfg.output_size = 0;
    CHECK_THROWS_AS(cfg.validate(), Error);
    CHECK_NOTHROW(AugmentConfig{}.validate());
}
