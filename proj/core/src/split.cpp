#include <noteval/dataprep.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace noteval {

const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Val: return "val";
        default: return "test";
    }
}

namespace {

// Largest-remainder apportionment of n into three buckets; ties go to the
// earlier bucket (train, val, test).
std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& r) {
    const std::array<double, 3> ratios{r.train, r.val, r.test};
    std::array<std::size_t, 3> counts{};
    std::array<double, 3> frac{};
    std::size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        const double q = ratios[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(q));
        frac[i] = q - std::floor(q);
        assigned += counts[i];
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned)
        ++counts[order[k % 3]];
    return counts;
}

}  // namespace

SplitManifest stratified_split(const std::vector<std::pair<std::string, std::string>>& items,
                               const SplitRatios& ratios, std::uint64_t seed) {
    if (std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
        throw Error("stratified_split: ratios must sum to 1");
    if (ratios.train < 0.0 || ratios.val < 0.0 || ratios.test < 0.0)
        throw Error("stratified_split: ratios must be non-negative");

    std::map<std::string, std::vector<std::string>> by_class;
    for (const auto& [id, label] : items)
        by_class[label].push_back(id);

    SplitManifest manifest;
    manifest.ratios = ratios;
    manifest.seed = seed;

    std::mt19937_64 rng(seed);
    for (auto& [label, ids] : by_class) {
        std::sort(ids.begin(), ids.end());
        // Fisher-Yates with raw 64-bit draws, stable across standard libraries.
        for (std::size_t i = ids.size(); i > 1; --i)
            std::swap(ids[i - 1], ids[rng() % i]);

        if (ids.size() < 3) {
            manifest.warnings.push_back("class '" + label +
                                        "' has fewer than 3 images; all assigned to train");
            for (const auto& id : ids)
                manifest.assignments[id] = Split::Train;
            continue;
        }
        const auto counts = apportion(ids.size(), ratios);
        std::size_t i = 0;
        for (std::size_t k = 0; k < counts[0]; ++k)
            manifest.assignments[ids[i++]] = Split::Train;
        for (std::size_t k = 0; k < counts[1]; ++k)
            manifest.assignments[ids[i++]] = Split::Val;
        for (std::size_t k = 0; k < counts[2]; ++k)
            manifest.assignments[ids[i++]] = Split::Test;
    }
    return manifest;
}

}  // namespace noteval
