#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <noteval/align.hpp>
#include <noteval/enhance.hpp>
#include <noteval/image.hpp>
#include <noteval/ucdi.hpp>

namespace noteval {

struct BackgroundConfig {
    int saturation_threshold = 30;  // strict >, on the 0-255 saturation channel
    int morph_radius = 2;

    void validate() const;
};

struct MaskedImage {
    RasterImage image;  // background forced to white
    BinaryMask mask;    // foreground indicator
};

/// Foreground segmentation by saturation threshold plus morphological
/// open-close cleanup. Throws "no note detected" on an empty foreground.
MaskedImage remove_background(const RasterImage& img, const BackgroundConfig& cfg = {});

struct DamageConfig {
    double dbscan_eps = 0.02;  // fraction of the reference diagonal
    int dbscan_min_samples = 3;
    double ncc_missing_threshold = 0.5;
    double overlap_threshold = 0.1;      // strict >
    double edge_strip_fraction = 0.05;   // of min(W, H)
    double corner_square_fraction = 0.10;
    double region_min_area_fraction = 0.0005;  // of the reference foreground area
    double ncc_window_fraction = 0.10;   // search dilation, fraction of diagonal
    int adaptive_block = 15;             // local-mean window for the edge map
    int adaptive_offset = 10;            // darker-than-mean margin
    int max_contour_points = 5000;
    int patch_pad = 4;

    void validate() const;
};

struct BinaryDamageResult {
    double percent = 0.0;
    BinaryMask damage_mask;  // ref AND NOT damaged
};

/// Eq.-style ink-mass loss: sum of per-pixel (ref - damaged) clamped at zero,
/// over the reference mass, times 100.
BinaryDamageResult binary_damage(const BinaryMask& ref_mask, const BinaryMask& dmg_mask);

struct RgbDamageResult {
    double percent = 0.0;
    RasterImage heatmap;  // grayscale mean-absolute-difference image
};

/// Chromatic deviation over the valid mask after optional CLAHE + bilateral
/// enhancement of both frames (enh.clahe_enabled / enh.bilateral_enabled;
/// other stages are ignored here).
RgbDamageResult rgb_damage(const RasterImage& ref, const RasterImage& warped,
                           const BinaryMask& valid, const EnhanceConfig& enh = {});

/// The eight structural regions: 4 border strips and 4 corner squares.
struct RegionMasks {
    std::array<BinaryMask, 4> edges;    // top, bottom, left, right
    std::array<BinaryMask, 4> corners;  // tl, tr, bl, br
};

RegionMasks make_region_masks(int width, int height, const DamageConfig& cfg = {});

struct StructuralResult {
    std::array<double, 4> edge_overlap{};
    std::array<double, 4> corner_overlap{};
    int edges_damaged = 0;    // E
    int corners_damaged = 0;  // C
};

StructuralResult structural_overlap(const BinaryMask& damage_mask, const RegionMasks& regions,
                                    double overlap_threshold);

/// Density clustering of 2-D points; returns a label per point, -1 for noise.
/// A point is core when its eps-ball (inclusive, containing the point itself)
/// holds at least min_samples points. Expansion scans neighbours in ascending
/// index order, so labels are deterministic.
std::vector<int> dbscan_labels(const std::vector<std::pair<double, double>>& pts, double eps,
                               int min_samples);

struct FeatureCluster {
    int id = 0;
    std::vector<std::pair<int, int>> points;  // contour members, (x, y)
    int x = 0, y = 0, w = 0, h = 0;           // padded bounding box
    RasterImage patch;                        // grayscale template crop
};

/// Salient-contour clusters of the reference: adaptive-threshold edge points
/// restricted to the foreground, clustered with DBSCAN. Throws
/// "no salient features in reference" when nothing clusters.
std::vector<FeatureCluster> extract_feature_clusters(const RasterImage& ref,
                                                     const BinaryMask& mask,
                                                     const DamageConfig& cfg = {});

struct NccPeak {
    double score = 0.0;  // zero-mean normalized cross-correlation, in [-1, 1]
    int x = 0, y = 0;    // placement of the template's top-left in the window
};

/// Best template placement inside a search window, both grayscale. A window
/// smaller than the template is evaluated at the single centred overlap.
NccPeak ncc_match(const RasterImage& tmpl, const RasterImage& window);

struct ClusterMatch {
    int cluster_id = 0;
    double score = 0.0;
    int peak_x = 0, peak_y = 0;  // reference-frame position of the best match
    bool missing = false;        // score < ncc_missing_threshold
};

struct FeatureMatchResult {
    std::vector<ClusterMatch> matches;
    int missing_count = 0;  // F
};

/// Correlates each cluster template against the warped image inside its
/// dilated bounding box.
FeatureMatchResult match_feature_clusters(const std::vector<FeatureCluster>& clusters,
                                          const RasterImage& warped, const DamageConfig& cfg = {});

/// Z: connected components (8-way) of the damage mask, ignoring components
/// smaller than region_min_area_fraction x ref_foreground_area.
int count_damage_regions(const BinaryMask& damage_mask, long ref_foreground_area,
                         const DamageConfig& cfg = {});

struct AnalyzeConfig {
    BackgroundConfig background;
    AlignConfig align;
    DamageConfig damage;
    EnhanceConfig enhance;  // CLAHE/bilateral settings for the chromatic stage
    UcdiConfig ucdi;
    bool assume_aligned = false;  // skip registration; frames already match

    void validate() const;
};

struct DamageReport {
    std::string status;  // "ok" or "unalignable"

    double binary_pct = 0.0;        // B
    double rgb_pct = 0.0;           // R
    int edges_damaged = 0;          // E
    int corners_damaged = 0;        // C
    int features_missing = 0;       // F
    int features_total = 0;         // N
    int zone_count = 0;             // Z
    double ucdi = 0.0;
    UcdiBreakdown breakdown;

    std::array<double, 4> edge_overlap{};
    std::array<double, 4> corner_overlap{};
    std::vector<ClusterMatch> matches;

    Mat3 homography{1, 0, 0, 0, 1, 0, 0, 0, 1};
    int match_count = 0;
    int inlier_count = 0;
    double mean_reproj_error = 0.0;

    // Stage artifacts, kept for overlays and the serialized report.
    BinaryMask ref_mask;
    BinaryMask warped_mask;
    BinaryMask damage_mask;
    RasterImage ref_masked;
    RasterImage warped;
    RasterImage heatmap;
};

/// Full pipeline: background removal on both frames, registration, warping,
/// then the damage metrics and the composite score. Registration failure
/// returns a report with status "unalignable" and no score; any other stage
/// error propagates with the stage name prefixed.
DamageReport analyze(const RasterImage& ref, const RasterImage& damaged,
                     const AnalyzeConfig& cfg = {});

/// Reference image with damaged pixels tinted red.
RasterImage render_damage_overlay(const RasterImage& base, const BinaryMask& damage_mask);

/// Blue-to-red ramp over the grayscale deviation heatmap.
RasterImage render_heatmap(const RasterImage& heatmap);

/// Match markers on the reference: found clusters get a green cross at the
/// peak, missing ones a red box.
RasterImage render_cluster_overlay(const RasterImage& base,
                                   const std::vector<ClusterMatch>& matches);

}  // namespace noteval
