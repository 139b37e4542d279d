#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>
#include <noteval/damage.hpp>

#include "config.hpp"

namespace noteval::cli {

using Json = nlohmann::ordered_json;

/// FNV-1a over a file's bytes, as 16 hex digits. Throws on unreadable files.
std::string file_digest(const std::string& path);

/// Current UTC time, ISO 8601 (seconds resolution).
std::string timestamp_utc();

/// One image found under a class-per-subdirectory tree.
struct ClassedFile {
    std::string path;   // full path
    std::string label;  // immediate subdirectory name
};

/// All .png/.jpg/.jpeg under <root>/<class>/..., sorted by path.
std::vector<ClassedFile> scan_class_tree(const std::string& root);

/// Full single-run document: metadata, metrics, registration, breakdown,
/// per-stage timings, and the configuration snapshot.
Json report_document(const DamageReport& rep, const std::string& ref_path,
                     const std::string& input_path, const std::map<std::string, double>& timings,
                     const RunConfig& cfg);

/// Compact line for batch output: analysis results only, no volatile fields
/// (timestamps, timings), so reruns are byte-identical.
Json batch_line(const std::string& path, const std::string& label, const DamageReport& rep);

/// Serialized configuration, section by section.
Json config_snapshot(const RunConfig& cfg);

}  // namespace noteval::cli
