#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <noteval/image.hpp>

namespace noteval {

struct DedupConfig {
    int threshold = 5;  // Hamming bits; distance <= threshold means duplicate
    int hash_bits = 64;

    void validate() const {
        if (threshold < 0 || threshold > hash_bits)
            throw Error("dedup config: require 0 <= threshold <= hash_bits");
        if (hash_bits != 64)
            throw Error("dedup config: only 64-bit hashes are supported");
    }
};

/// 64-bit DCT perceptual hash: grayscale, box-resample to 32x32, 2-D DCT-II,
/// keep the 8x8 low-frequency block, threshold each AC coefficient against the
/// median of the 63 AC values. Bit k (MSB first, row-major block order) is set
/// iff coefficient k exceeds the median; the DC bit is always 0.
std::uint64_t phash64(const RasterImage& img);

/// popcount(a XOR b)
int hamming(std::uint64_t a, std::uint64_t b);

/// One image in a dedup run. `id` orders the greedy scan (sorted ascending)
/// and must be unique within a class.
struct DedupItem {
    std::string id;     // typically the file path
    std::string label;  // class name
    std::uint64_t hash = 0;
};

/// Per-class store of retained hashes. Post-state invariant: no two hashes in
/// the same class are within the configured threshold.
class DedupIndex {
public:
    /// First retained id whose hash is within `threshold` bits, if any.
    std::optional<std::string> find_similar(const std::string& label, std::uint64_t hash,
                                            int threshold) const;
    void insert(const std::string& label, std::uint64_t hash, const std::string& id);

    const std::map<std::string, std::vector<std::pair<std::uint64_t, std::string>>>& classes()
        const {
        return classes_;
    }

private:
    std::map<std::string, std::vector<std::pair<std::uint64_t, std::string>>> classes_;
};

struct DedupResult {
    DedupIndex index;
    std::vector<DedupItem> retained;  // in scan order
    std::vector<std::pair<DedupItem, std::string>> duplicates;  // dropped item -> kept id
};

/// Greedy per-class deduplication: items are scanned in ascending id order and
/// an item is retained iff no already-retained hash of its class is within the
/// threshold.
DedupResult deduplicate(std::vector<DedupItem> items, const DedupConfig& cfg);

/// Cross-source pass: sources are in precedence order and each must already be
/// deduplicated. An item of a later source is dropped when an earlier (or same)
/// source retained a same-class hash within the threshold.
DedupResult cross_dataset_dedup(const std::vector<std::vector<DedupItem>>& sources,
                                const DedupConfig& cfg);

enum class Split { Train, Val, Test };

const char* split_name(Split s);

struct SplitRatios {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
};

struct SplitManifest {
    std::map<std::string, Split> assignments;  // image id -> split
    SplitRatios ratios;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

/// Stratified split: per-class seeded shuffle, then largest-remainder
/// allocation of train/val/test counts (ties resolved in train, val, test
/// order). Classes with fewer than 3 images go wholly to train with a warning.
SplitManifest stratified_split(const std::vector<std::pair<std::string, std::string>>& items,
                               const SplitRatios& ratios, std::uint64_t seed);

}  // namespace noteval
