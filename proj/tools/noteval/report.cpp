#include "report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <noteval/version.hpp>

namespace fs = std::filesystem;

namespace noteval::cli {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool image_ext(const fs::path& p) {
    std::string e = p.extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e == ".png" || e == ".jpg" || e == ".jpeg";
}

Json metrics_json(const DamageReport& rep) {
    return Json{{"binary_pct", rep.binary_pct},
                {"rgb_pct", rep.rgb_pct},
                {"edges_damaged", rep.edges_damaged},
                {"corners_damaged", rep.corners_damaged},
                {"features_missing", rep.features_missing},
                {"features_total", rep.features_total},
                {"zone_count", rep.zone_count}};
}

Json ucdi_json(const DamageReport& rep) {
    const UcdiBreakdown& b = rep.breakdown;
    return Json{{"score", rep.ucdi},
                {"raw_score", b.raw_score},
                {"override_fired", b.override_fired},
                {"override_capped", b.override_capped},
                {"clamped", b.clamped},
                {"normalized", b.normalized},
                {"transformed", b.transformed},
                {"weighted", b.weighted}};
}

Json registration_json(const DamageReport& rep) {
    return Json{{"homography", rep.homography},
                {"match_count", rep.match_count},
                {"inlier_count", rep.inlier_count},
                {"mean_reproj_error", rep.mean_reproj_error}};
}

}  // namespace

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read file for digest: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return hex64(h);
}

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<ClassedFile> scan_class_tree(const std::string& root) {
    if (!fs::is_directory(root)) throw Error("not a directory: " + root);
    std::vector<ClassedFile> out;
    for (const auto& cls : fs::directory_iterator(root)) {
        if (!cls.is_directory()) continue;
        const std::string label = cls.path().filename().string();
        for (const auto& entry : fs::recursive_directory_iterator(cls.path())) {
            if (entry.is_regular_file() && image_ext(entry.path()))
                out.push_back({entry.path().string(), label});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const ClassedFile& a, const ClassedFile& b) { return a.path < b.path; });
    return out;
}

Json report_document(const DamageReport& rep, const std::string& ref_path,
                     const std::string& input_path, const std::map<std::string, double>& timings,
                     const RunConfig& cfg) {
    Json features = Json::array();
    for (const ClusterMatch& m : rep.matches)
        features.push_back(Json{{"cluster_id", m.cluster_id},
                                {"score", m.score},
                                {"peak_x", m.peak_x},
                                {"peak_y", m.peak_y},
                                {"missing", m.missing}});

    Json doc{{"schema_version", kReportSchemaVersion},
             {"tool_version", kVersion},
             {"timestamp", timestamp_utc()},
             {"inputs",
              {{"reference", {{"path", ref_path}, {"fnv1a64", file_digest(ref_path)}}},
               {"damaged", {{"path", input_path}, {"fnv1a64", file_digest(input_path)}}}}},
             {"status", rep.status}};
    if (rep.status == "ok") {
        doc["metrics"] = metrics_json(rep);
        doc["ucdi"] = ucdi_json(rep);
        doc["registration"] = registration_json(rep);
        doc["structural"] =
            Json{{"edge_overlap", rep.edge_overlap}, {"corner_overlap", rep.corner_overlap}};
        doc["features"] = features;
    }
    doc["timings_ms"] = timings;
    doc["config"] = config_snapshot(cfg);
    return doc;
}

Json batch_line(const std::string& path, const std::string& label, const DamageReport& rep) {
    Json line{{"path", path}, {"class", label}, {"status", rep.status}};
    if (rep.status == "ok") {
        line["metrics"] = metrics_json(rep);
        line["ucdi"] = ucdi_json(rep);
        line["registration"] = registration_json(rep);
    }
    return line;
}

Json config_snapshot(const RunConfig& cfg) {
    const auto& bg = cfg.analyze.background;
    const auto& en = cfg.analyze.enhance;
    const auto& al = cfg.analyze.align;
    const auto& dm = cfg.analyze.damage;
    const auto& uc = cfg.analyze.ucdi;
    const auto& au = cfg.augment;
    return Json{
        {"background",
         {{"saturation_threshold", bg.saturation_threshold}, {"morph_radius", bg.morph_radius}}},
        {"enhance",
         {{"median_enabled", en.median_enabled},
          {"median_kernel", en.median_kernel},
          {"sharpen_enabled", en.sharpen_enabled},
          {"stretch_enabled", en.stretch_enabled},
          {"stretch_low_pct", en.stretch_low_pct},
          {"stretch_high_pct", en.stretch_high_pct},
          {"clahe_enabled", en.clahe_enabled},
          {"clahe_clip", en.clahe_clip},
          {"clahe_tiles_x", en.clahe_tiles_x},
          {"clahe_tiles_y", en.clahe_tiles_y},
          {"bilateral_enabled", en.bilateral_enabled},
          {"bilateral_diameter", en.bilateral_diameter},
          {"bilateral_sigma_color", en.bilateral_sigma_color},
          {"bilateral_sigma_space", en.bilateral_sigma_space}}},
        {"dedup", {{"threshold", cfg.dedup.threshold}}},
        {"align",
         {{"ratio_test", al.ratio_test},
          {"ransac_reproj_threshold", al.ransac_reproj_threshold},
          {"ransac_max_iters", al.ransac_max_iters},
          {"min_matches", al.min_matches},
          {"min_inliers", al.min_inliers},
          {"octave_layers", al.octave_layers},
          {"contrast_threshold", al.contrast_threshold},
          {"edge_threshold", al.edge_threshold},
          {"max_keypoints", al.max_keypoints}}},
        {"damage",
         {{"dbscan_eps", dm.dbscan_eps},
          {"dbscan_min_samples", dm.dbscan_min_samples},
          {"ncc_missing_threshold", dm.ncc_missing_threshold},
          {"overlap_threshold", dm.overlap_threshold},
          {"edge_strip_fraction", dm.edge_strip_fraction},
          {"corner_square_fraction", dm.corner_square_fraction},
          {"region_min_area_fraction", dm.region_min_area_fraction},
          {"ncc_window_fraction", dm.ncc_window_fraction},
          {"adaptive_block", dm.adaptive_block},
          {"adaptive_offset", dm.adaptive_offset},
          {"max_contour_points", dm.max_contour_points},
          {"patch_pad", dm.patch_pad}}},
        {"ucdi",
         {{"epsilon", uc.epsilon},
          {"zone_cap", uc.zone_cap},
          {"weights", uc.weights},
          {"override_feature_ratio", uc.override_feature_ratio},
          {"override_binary_floor", uc.override_binary_floor},
          {"override_cap", uc.override_cap}}},
        {"augment",
         {{"crop_scale_lo", au.crop_scale_lo},
          {"crop_scale_hi", au.crop_scale_hi},
          {"rotation_deg", au.rotation_deg},
          {"hflip_prob", au.hflip_prob},
          {"jitter_brightness", au.jitter_brightness},
          {"jitter_contrast", au.jitter_contrast},
          {"jitter_saturation", au.jitter_saturation},
          {"jitter_hue", au.jitter_hue},
          {"affine_translate", au.affine_translate},
          {"affine_scale_lo", au.affine_scale_lo},
          {"affine_scale_hi", au.affine_scale_hi},
          {"affine_shear_deg", au.affine_shear_deg},
          {"erase_prob", au.erase_prob},
          {"erase_area_lo", au.erase_area_lo},
          {"erase_area_hi", au.erase_area_hi},
          {"output_size", au.output_size},
          {"seed", au.seed}}},
        {"split", {{"train", cfg.split.train}, {"val", cfg.split.val}, {"test", cfg.split.test}}},
        {"seed", cfg.seed}};
}

}  // namespace noteval::cli
