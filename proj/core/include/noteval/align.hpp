#pragma once

#include <vector>

#include <noteval/image.hpp>
#include <noteval/transform.hpp>

namespace noteval {

/// Scale/rotation-covariant interest point with a 128-dim gradient descriptor.
struct Keypoint {
    double x = 0.0, y = 0.0;   // subpixel position
    double scale = 0.0;        // sigma, in pixels of the input image
    double orientation = 0.0;  // radians
    double response = 0.0;     // DoG contrast magnitude, used for capping
    std::vector<float> descriptor;
};

struct Match {
    int a = 0, b = 0;       // indices into the two keypoint lists
    double distance = 0.0;  // descriptor L2 distance
};

/// Point pair (x0, y0) -> (x1, y1); a homography fitted over these maps the
/// first frame into the second.
struct Correspondence {
    double x0 = 0.0, y0 = 0.0;
    double x1 = 0.0, y1 = 0.0;
};

struct HomographyResult {
    Mat3 h{};                   // normalized so h[8] == 1
    std::vector<char> inliers;  // one flag per input correspondence
    int inlier_count = 0;
    double mean_reproj_error = 0.0;  // over inliers, in pixels
};

struct AlignConfig {
    double ratio_test = 0.75;
    double ransac_reproj_threshold = 3.0;  // px
    int ransac_max_iters = 2000;
    int min_matches = 4;
    int min_inliers = 10;

    // Detector knobs.
    int octave_layers = 3;
    double contrast_threshold = 0.04;
    double edge_threshold = 10.0;
    int max_keypoints = 2000;  // strongest kept; 0 = unlimited

    void validate() const;
};

/// DoG-pyramid keypoint detection + descriptor extraction on a grayscale
/// image of at least 64x64. Throws "featureless image" when nothing is found.
std::vector<Keypoint> detect_keypoints(const RasterImage& gray, const AlignConfig& cfg = {});

/// Exact nearest-neighbour matching with Lowe ratio test and mutual
/// consistency; the result is one-to-one. Throws "insufficient matches" when
/// fewer than cfg.min_matches survive.
std::vector<Match> match_descriptors(const std::vector<Keypoint>& a,
                                     const std::vector<Keypoint>& b, const AlignConfig& cfg = {});

/// RANSAC over 4-point DLT hypotheses with a least-squares refit on the final
/// inlier set. Deterministic: the sampler is seeded from the correspondence
/// values themselves, so any permutation of the input yields the same model.
/// Throws "alignment failed" when fewer than cfg.min_inliers support the fit.
HomographyResult estimate_homography(const std::vector<Correspondence>& corr,
                                     const AlignConfig& cfg = {});

/// Resamples `damaged` into the reference frame via the inverse of `h`
/// (which maps damaged -> reference). Uncovered pixels become white.
RasterImage warp_to_reference(const RasterImage& damaged, const Mat3& h, int ref_width,
                              int ref_height);

}  // namespace noteval
