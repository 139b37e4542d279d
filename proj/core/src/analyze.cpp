/// @file analyze.cpp
/// @brief End-to-end condition analysis of a damaged note against its
///        reference template.

#include <noteval/damage.hpp>

#include <future>
#include <string>
#include <utility>

#include <noteval/color.hpp>

namespace noteval {
namespace {

/// Wraps a stage so its failures carry the stage name.
template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(std::string(name) + ": " + e.what());
    }
}

bool is_registration_error(const std::string& msg) {
    return msg.find("featureless image") != std::string::npos ||
           msg.find("insufficient matches") != std::string::npos ||
           msg.find("alignment failed") != std::string::npos;
}

}  // namespace

void AnalyzeConfig::validate() const {
    background.validate();
    align.validate();
    damage.validate();
    enhance.validate();
    ucdi.validate();
}

DamageReport analyze(const RasterImage& ref, const RasterImage& damaged,
                     const AnalyzeConfig& cfg) {
    cfg.validate();

    DamageReport rep;
    MaskedImage ref_m = stage("background", [&] { return remove_background(ref, cfg.background); });
    MaskedImage dmg_m =
        stage("background", [&] { return remove_background(damaged, cfg.background); });
    rep.ref_mask = ref_m.mask;
    rep.ref_masked = ref_m.image;

    Mat3 h{1, 0, 0, 0, 1, 0, 0, 0, 1};
    if (!cfg.assume_aligned) {
        try {
            const RasterImage gray_ref = to_grayscale(ref_m.image);
            const RasterImage gray_dmg = to_grayscale(dmg_m.image);

            // The two detections are independent; run them side by side.
            auto fut = std::async(std::launch::async,
                                  [&] { return detect_keypoints(gray_ref, cfg.align); });
            const std::vector<Keypoint> kp_dmg = detect_keypoints(gray_dmg, cfg.align);
            const std::vector<Keypoint> kp_ref = fut.get();

            const std::vector<Match> matches = match_descriptors(kp_dmg, kp_ref, cfg.align);
            std::vector<Correspondence> corr;
            corr.reserve(matches.size());
            for (const Match& m : matches)
                corr.push_back(Correspondence{kp_dmg[m.a].x, kp_dmg[m.a].y, kp_ref[m.b].x,
                                              kp_ref[m.b].y});

            const HomographyResult est = estimate_homography(corr, cfg.align);
            h = est.h;
            rep.match_count = static_cast<int>(matches.size());
            rep.inlier_count = est.inlier_count;
            rep.mean_reproj_error = est.mean_reproj_error;
        } catch (const Error& e) {
            if (!is_registration_error(e.what())) throw Error(std::string("align: ") + e.what());
            rep.status = "unalignable";
            return rep;
        }
    }
    rep.homography = h;

    rep.warped = stage("warp", [&] {
        return warp_to_reference(dmg_m.image, h, ref.width(), ref.height());
    });
    rep.warped_mask =
        stage("warp", [&] { return warp_mask(dmg_m.mask, h, ref.width(), ref.height()); });

    const BinaryDamageResult bin =
        stage("binary", [&] { return binary_damage(ref_m.mask, rep.warped_mask); });
    rep.binary_pct = bin.percent;
    rep.damage_mask = bin.damage_mask;

    const BinaryMask valid = mask_and(ref_m.mask, rep.warped_mask);
    const RgbDamageResult rgb =
        stage("rgb", [&] { return rgb_damage(ref_m.image, rep.warped, valid, cfg.enhance); });
    rep.rgb_pct = rgb.percent;
    rep.heatmap = rgb.heatmap;

    const StructuralResult st = stage("structural", [&] {
        const RegionMasks regions = make_region_masks(ref.width(), ref.height(), cfg.damage);
        return structural_overlap(rep.damage_mask, regions, cfg.damage.overlap_threshold);
    });
    rep.edges_damaged = st.edges_damaged;
    rep.corners_damaged = st.corners_damaged;
    rep.edge_overlap = st.edge_overlap;
    rep.corner_overlap = st.corner_overlap;

    const std::vector<FeatureCluster> clusters = stage("features", [&] {
        return extract_feature_clusters(ref_m.image, ref_m.mask, cfg.damage);
    });
    const FeatureMatchResult fm =
        stage("features", [&] { return match_feature_clusters(clusters, rep.warped, cfg.damage); });
    rep.features_total = static_cast<int>(clusters.size());
    rep.features_missing = fm.missing_count;
    rep.matches = fm.matches;

    rep.zone_count = stage("zones", [&] {
        return count_damage_regions(rep.damage_mask, ref_m.mask.count(), cfg.damage);
    });

    rep.breakdown = stage("score", [&] {
        DamageInputs in;
        in.binary_pct = rep.binary_pct;
        in.rgb_pct = rep.rgb_pct;
        in.edge_regions = rep.edges_damaged;
        in.corner_regions = rep.corners_damaged;
        in.features_missing = rep.features_missing;
        in.features_total = rep.features_total;
        in.zone_count = rep.zone_count;
        return explain_ucdi(in, cfg.ucdi);
    });
    rep.ucdi = rep.breakdown.score;
    rep.status = "ok";
    return rep;
}

}  // namespace noteval
