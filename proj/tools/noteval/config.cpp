#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace noteval::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void bad_value(const std::string& where, const std::string& text) {
    throw Error(where + ": cannot parse value '" + text + "'");
}

double parse_double(const std::string& where, const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0') bad_value(where, text);
    return v;
}

long parse_long(const std::string& where, const std::string& text) {
    long v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size()) bad_value(where, text);
    return v;
}

bool parse_bool(const std::string& where, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    bad_value(where, text);
}

/// Key table for one config section: key name -> value applier.
using Setter = std::function<void(RunConfig&, const std::string& where, const std::string& value)>;
using Section = std::map<std::string, Setter>;

template <typename T>
Setter num(T* (*pick)(RunConfig&)) {
    return [pick](RunConfig& c, const std::string& where, const std::string& v) {
        if constexpr (std::is_same_v<T, double>) {
            *pick(c) = parse_double(where, v);
        } else if constexpr (std::is_same_v<T, bool>) {
            *pick(c) = parse_bool(where, v);
        } else {
            *pick(c) = static_cast<T>(parse_long(where, v));
        }
    };
}

#define FIELD(type, expr) num<type>(+[](RunConfig& c) -> type* { return &(expr); })

const std::map<std::string, Section>& sections() {
    static const std::map<std::string, Section> table = {
        {"background",
         {
             {"saturation_threshold", FIELD(int, c.analyze.background.saturation_threshold)},
             {"morph_radius", FIELD(int, c.analyze.background.morph_radius)},
         }},
        {"enhance",
         {
             {"median_enabled", FIELD(bool, c.analyze.enhance.median_enabled)},
             {"median_kernel", FIELD(int, c.analyze.enhance.median_kernel)},
             {"sharpen_enabled", FIELD(bool, c.analyze.enhance.sharpen_enabled)},
             {"stretch_enabled", FIELD(bool, c.analyze.enhance.stretch_enabled)},
             {"stretch_low_pct", FIELD(double, c.analyze.enhance.stretch_low_pct)},
             {"stretch_high_pct", FIELD(double, c.analyze.enhance.stretch_high_pct)},
             {"clahe_enabled", FIELD(bool, c.analyze.enhance.clahe_enabled)},
             {"clahe_clip", FIELD(double, c.analyze.enhance.clahe_clip)},
             {"clahe_tiles_x", FIELD(int, c.analyze.enhance.clahe_tiles_x)},
             {"clahe_tiles_y", FIELD(int, c.analyze.enhance.clahe_tiles_y)},
             {"bilateral_enabled", FIELD(bool, c.analyze.enhance.bilateral_enabled)},
             {"bilateral_diameter", FIELD(int, c.analyze.enhance.bilateral_diameter)},
             {"bilateral_sigma_color", FIELD(double, c.analyze.enhance.bilateral_sigma_color)},
             {"bilateral_sigma_space", FIELD(double, c.analyze.enhance.bilateral_sigma_space)},
         }},
        {"dedup",
         {
             {"threshold", FIELD(int, c.dedup.threshold)},
         }},
        {"align",
         {
             {"ratio_test", FIELD(double, c.analyze.align.ratio_test)},
             {"ransac_reproj_threshold", FIELD(double, c.analyze.align.ransac_reproj_threshold)},
             {"ransac_max_iters", FIELD(int, c.analyze.align.ransac_max_iters)},
             {"min_matches", FIELD(int, c.analyze.align.min_matches)},
             {"min_inliers", FIELD(int, c.analyze.align.min_inliers)},
             {"octave_layers", FIELD(int, c.analyze.align.octave_layers)},
             {"contrast_threshold", FIELD(double, c.analyze.align.contrast_threshold)},
             {"edge_threshold", FIELD(double, c.analyze.align.edge_threshold)},
             {"max_keypoints", FIELD(int, c.analyze.align.max_keypoints)},
         }},
        {"damage",
         {
             {"dbscan_eps", FIELD(double, c.analyze.damage.dbscan_eps)},
             {"dbscan_min_samples", FIELD(int, c.analyze.damage.dbscan_min_samples)},
             {"ncc_missing_threshold", FIELD(double, c.analyze.damage.ncc_missing_threshold)},
             {"overlap_threshold", FIELD(double, c.analyze.damage.overlap_threshold)},
             {"edge_strip_fraction", FIELD(double, c.analyze.damage.edge_strip_fraction)},
             {"corner_square_fraction", FIELD(double, c.analyze.damage.corner_square_fraction)},
             {"region_min_area_fraction", FIELD(double, c.analyze.damage.region_min_area_fraction)},
             {"ncc_window_fraction", FIELD(double, c.analyze.damage.ncc_window_fraction)},
             {"adaptive_block", FIELD(int, c.analyze.damage.adaptive_block)},
             {"adaptive_offset", FIELD(int, c.analyze.damage.adaptive_offset)},
             {"max_contour_points", FIELD(int, c.analyze.damage.max_contour_points)},
             {"patch_pad", FIELD(int, c.analyze.damage.patch_pad)},
         }},
        {"ucdi",
         {
             {"epsilon", FIELD(double, c.analyze.ucdi.epsilon)},
             {"zone_cap", FIELD(double, c.analyze.ucdi.zone_cap)},
             {"override_feature_ratio", FIELD(double, c.analyze.ucdi.override_feature_ratio)},
             {"override_binary_floor", FIELD(double, c.analyze.ucdi.override_binary_floor)},
             {"override_cap", FIELD(double, c.analyze.ucdi.override_cap)},
             {"weights",
              [](RunConfig& c, const std::string& where, const std::string& v) {
                  std::stringstream ss(v);
                  std::string part;
                  std::vector<double> w;
                  while (std::getline(ss, part, ','))
                      w.push_back(parse_double(where, trim(part)));
                  if (w.size() != 6) throw Error(where + ": expected 6 comma-separated weights");
                  std::copy(w.begin(), w.end(), c.analyze.ucdi.weights.begin());
              }},
         }},
        {"augment",
         {
             {"crop_scale_lo", FIELD(double, c.augment.crop_scale_lo)},
             {"crop_scale_hi", FIELD(double, c.augment.crop_scale_hi)},
             {"rotation_deg", FIELD(double, c.augment.rotation_deg)},
             {"hflip_prob", FIELD(double, c.augment.hflip_prob)},
             {"jitter_brightness", FIELD(double, c.augment.jitter_brightness)},
             {"jitter_contrast", FIELD(double, c.augment.jitter_contrast)},
             {"jitter_saturation", FIELD(double, c.augment.jitter_saturation)},
             {"jitter_hue", FIELD(double, c.augment.jitter_hue)},
             {"affine_translate", FIELD(double, c.augment.affine_translate)},
             {"affine_scale_lo", FIELD(double, c.augment.affine_scale_lo)},
             {"affine_scale_hi", FIELD(double, c.augment.affine_scale_hi)},
             {"affine_shear_deg", FIELD(double, c.augment.affine_shear_deg)},
             {"erase_prob", FIELD(double, c.augment.erase_prob)},
             {"erase_area_lo", FIELD(double, c.augment.erase_area_lo)},
             {"erase_area_hi", FIELD(double, c.augment.erase_area_hi)},
             {"output_size", FIELD(int, c.augment.output_size)},
             {"seed", FIELD(std::uint64_t, c.augment.seed)},
         }},
        {"split",
         {
             {"train", FIELD(double, c.split.train)},
             {"val", FIELD(double, c.split.val)},
             {"test", FIELD(double, c.split.test)},
         }},
    };
    return table;
}

#undef FIELD

}  // namespace

void RunConfig::validate() const {
    analyze.validate();
    dedup.validate();
    augment.validate();
    const double sum = split.train + split.val + split.test;
    if (split.train < 0 || split.val < 0 || split.test < 0 || std::abs(sum - 1.0) > 1e-9)
        throw Error("split ratios must be non-negative and sum to 1");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);

    const auto& table = sections();
    const Section* current = nullptr;
    std::string current_name;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw Error(where + ": unterminated section header");
            current_name = trim(s.substr(1, s.size() - 2));
            const auto it = table.find(current_name);
            if (it == table.end()) throw Error(where + ": unknown section [" + current_name + "]");
            current = &it->second;
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos) throw Error(where + ": expected key = value");
        if (!current) throw Error(where + ": key outside any [section]");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const auto it = current->find(key);
        if (it == current->end())
            throw Error(where + ": unknown key '" + key + "' in [" + current_name + "]");
        it->second(cfg, where, value);
    }
}

std::map<std::string, std::string> load_template_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open template map: " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw Error(path + ":" + std::to_string(lineno) + ": expected class = template-path");
        const std::string cls = trim(s.substr(0, eq));
        std::filesystem::path tpl = trim(s.substr(eq + 1));
        if (cls.empty() || tpl.empty())
            throw Error(path + ":" + std::to_string(lineno) + ": empty class or path");
        if (tpl.is_relative()) tpl = base / tpl;
        out[cls] = tpl.string();
    }
    if (out.empty()) throw Error("template map is empty: " + path);
    return out;
}

SplitRatios parse_ratios(const std::string& text) {
    std::stringstream ss(text);
    std::string part;
    std::vector<double> r;
    while (std::getline(ss, part, ','))
        r.push_back(parse_double("--ratios", trim(part)));
    if (r.size() != 3) throw Error("--ratios: expected three comma-separated values");
    return SplitRatios{r[0], r[1], r[2]};
}

}  // namespace noteval::cli
