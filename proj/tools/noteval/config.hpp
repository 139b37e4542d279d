#pragma once

#include <map>
#include <string>
#include <vector>

#include <noteval/augment.hpp>
#include <noteval/damage.hpp>
#include <noteval/dataprep.hpp>

namespace noteval::cli {

/// Merged tool configuration. Defaults < config file < command-line flags.
struct RunConfig {
    AnalyzeConfig analyze;  // background, align, damage, enhance, ucdi
    DedupConfig dedup;
    AugmentConfig augment;
    SplitRatios split;
    std::uint64_t seed = 0;

    /// Validates every section; throws Error naming the offending field.
    void validate() const;
};

/// Flat INI: `[section]` headers, `key = value`, `#`/`;` comments. Unknown
/// sections or keys are errors, as are values that fail to parse. Applies
/// the parsed values on top of `cfg`.
void apply_config_file(RunConfig& cfg, const std::string& path);

/// `class = template-path` lines, `#` comments. Relative paths are resolved
/// against the map file's directory.
std::map<std::string, std::string> load_template_map(const std::string& path);

/// "0.8,0.1,0.1" -> ratios; throws on malformed input.
SplitRatios parse_ratios(const std::string& text);

}  // namespace noteval::cli
