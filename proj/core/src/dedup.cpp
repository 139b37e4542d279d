#include <noteval/dataprep.hpp>

#include <algorithm>

namespace noteval {

std::optional<std::string> DedupIndex::find_similar(const std::string& label,
                                                    std::uint64_t hash, int threshold) const {
    const auto it = classes_.find(label);
    if (it == classes_.end())
        return std::nullopt;
    for (const auto& [stored, id] : it->second)
        if (hamming(stored, hash) <= threshold)
            return id;
    return std::nullopt;
}

void DedupIndex::insert(const std::string& label, std::uint64_t hash, const std::string& id) {
    classes_[label].emplace_back(hash, id);
}

namespace {

void scan_into(const std::vector<DedupItem>& items, const DedupConfig& cfg, DedupResult& result) {
    for (const DedupItem& item : items) {
        if (auto kept = result.index.find_similar(item.label, item.hash, cfg.threshold)) {
            result.duplicates.emplace_back(item, *kept);
        } else {
            result.index.insert(item.label, item.hash, item.id);
            result.retained.push_back(item);
        }
    }
}

}  // namespace

DedupResult deduplicate(std::vector<DedupItem> items, const DedupConfig& cfg) {
    cfg.validate();
    // Deterministic greedy order: sort by class, then id.
    std::stable_sort(items.begin(), items.end(), [](const DedupItem& a, const DedupItem& b) {
        return a.label != b.label ? a.label < b.label : a.id < b.id;
    });
    DedupResult result;
    scan_into(items, cfg, result);
    return result;
}

DedupResult cross_dataset_dedup(const std::vector<std::vector<DedupItem>>& sources,
                                const DedupConfig& cfg) {
    cfg.validate();
    DedupResult result;
    for (const auto& source : sources)
        scan_into(source, cfg, result);
    return result;
}

}  // namespace noteval
