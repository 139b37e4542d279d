#pragma once

#include <cstdint>

#include <noteval/augment.hpp>
#include <noteval/image.hpp>
#include <noteval/transform.hpp>

/// Deterministic synthetic inputs for the test and acceptance suites.
namespace fixtures {

/// Keypoint-rich grayscale collage of random rectangles and discs.
noteval::RasterImage textured(int w, int h, std::uint64_t seed);

noteval::RasterImage checkerboard(int w, int h, int cell);

/// Saturated note mock-up on a white sheet: framed base colour, ink
/// ornaments, glyph blocks and light pixel noise. Every note pixel clears the
/// default background-saturation threshold.
noteval::RasterImage synthetic_note(int w, int h, std::uint64_t seed);

/// The sheet margin the note leaves on each side, as a fraction of the
/// canvas; cut placement uses it to stay well inside the foreground.
inline constexpr double kNoteMargin = 0.12;

struct CutResult {
    noteval::RasterImage image;
    double fraction = 0.0;  // exact removed share of `foreground`, in [0, 1]
    int pieces = 0;
};

/// Paints white rectangles strictly inside the note; `fraction` is the exact
/// count of erased foreground pixels over the foreground area.
CutResult cut_note(const noteval::RasterImage& note, const noteval::BinaryMask& foreground,
                   double target_fraction, std::uint64_t seed);

/// Random projective map (input frame -> out_w x out_h canvas, content
/// centred): rotation within max_rot_deg, scale in [scale_lo, scale_hi],
/// translation within trans_frac of each canvas dimension, perspective rows
/// within +-perspective.
noteval::Mat3 random_homography(int w, int h, int out_w, int out_h, noteval::Rng& rng,
                                double max_rot_deg = 20.0, double scale_lo = 0.8,
                                double scale_hi = 1.2, double trans_frac = 0.15,
                                double perspective = 1e-4);

}  // namespace fixtures
