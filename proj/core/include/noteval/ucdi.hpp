#pragma once

#include <array>

#include <noteval/image.hpp>

namespace noteval {

/// Raw damage measurements feeding the composite score.
struct DamageInputs {
    double binary_pct = 0.0;    // B: ink-mass loss, percent
    double rgb_pct = 0.0;       // R: mean colour deviation, percent
    int edge_regions = 0;       // E: affected edge strips, 0..4
    int corner_regions = 0;     // C: affected corner squares, 0..4
    double features_missing = 0.0;  // F
    double features_total = 0.0;    // N
    int zone_count = 0;         // Z: distinct damage zones
};

struct UcdiConfig {
    double epsilon = 1e-5;
    double zone_cap = 20.0;
    std::array<double, 6> weights{0.40, 0.20, 0.15, 0.15, 0.05, 0.05};
    double override_feature_ratio = 0.45;  // F/N above this ...
    double override_binary_floor = 5.0;    // ... with B above this caps the score
    double override_cap = 0.65;

    void validate() const;
};

/// Per-term view of the score for reporting.
struct UcdiBreakdown {
    std::array<double, 6> normalized{};   // B', R', E', C', F', Z'
    std::array<double, 6> transformed{};  // after the per-term response curves
    std::array<double, 6> weighted{};     // weight * transformed
    double raw_score = 0.0;        // 1 - sum(weighted), before override/clamp
    bool override_fired = false;   // both override thresholds exceeded
    bool override_capped = false;  // ... and the cap actually lowered the score
    bool clamped = false;          // final [0, 1] clamp changed the value
    double score = 0.0;            // final value in [0, 1]
};

/// Composite condition score in [0, 1]; 1 is pristine. Heavy feature loss
/// combined with material ink loss is capped regardless of the weighted sum.
double compute_ucdi(const DamageInputs& in, const UcdiConfig& cfg = {});

UcdiBreakdown explain_ucdi(const DamageInputs& in, const UcdiConfig& cfg = {});

}  // namespace noteval
