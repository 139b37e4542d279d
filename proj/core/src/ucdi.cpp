#include <noteval/ucdi.hpp>

#include <algorithm>
#include <cmath>

namespace noteval {
namespace {

void validate_inputs(const DamageInputs& in) {
    if (in.binary_pct < 0.0 || in.binary_pct > 100.0)
        throw Error("ucdi: binary damage percent out of [0, 100]");
    if (in.rgb_pct < 0.0 || in.rgb_pct > 100.0)
        throw Error("ucdi: rgb damage percent out of [0, 100]");
    if (in.edge_regions < 0 || in.edge_regions > 4)
        throw Error("ucdi: edge region count out of [0, 4]");
    if (in.corner_regions < 0 || in.corner_regions > 4)
        throw Error("ucdi: corner region count out of [0, 4]");
    if (in.features_total < 0.0 || in.features_missing < 0.0)
        throw Error("ucdi: feature counts must be non-negative");
    if (in.features_missing > in.features_total)
        throw Error("ucdi: missing feature count exceeds total");
    if (in.zone_count < 0) throw Error("ucdi: zone count must be non-negative");
}

}  // namespace

void UcdiConfig::validate() const {
    if (epsilon <= 0.0) throw Error("ucdi: epsilon must be positive");
    if (zone_cap <= 0.0) throw Error("ucdi: zone cap must be positive");
    for (double w : weights)
        if (w <= 0.0) throw Error("ucdi: weights must be positive");
}

UcdiBreakdown explain_ucdi(const DamageInputs& in, const UcdiConfig& cfg) {
    cfg.validate();
    validate_inputs(in);

    UcdiBreakdown bd;
    bd.normalized = {
        in.binary_pct / (100.0 + cfg.epsilon),
        in.rgb_pct / (100.0 + cfg.epsilon),
        in.edge_regions / 4.0,
        in.corner_regions / 4.0,
        in.features_missing / (in.features_total + cfg.epsilon),
        in.zone_count / (cfg.zone_cap + cfg.epsilon),
    };
    bd.transformed = {
        2.0 * bd.normalized[0],
        2.0 * bd.normalized[1],
        1.5 * bd.normalized[2],
        std::pow(bd.normalized[3], 1.5),
        std::log(1.0 + bd.normalized[4]),
        std::tanh(bd.normalized[5]),
    };
    double sum = 0.0;
    for (int i = 0; i < 6; ++i) {
        bd.weighted[i] = cfg.weights[i] * bd.transformed[i];
        sum += bd.weighted[i];
    }
    bd.raw_score = 1.0 - sum;

    double score = bd.raw_score;
    // The cap condition uses the exact ratio, unlike the normalisation above.
    if (in.features_total > 0.0 &&
        in.features_missing / in.features_total > cfg.override_feature_ratio &&
        in.binary_pct > cfg.override_binary_floor) {
        bd.override_fired = true;
        bd.override_capped = score > cfg.override_cap;
        score = std::min(score, cfg.override_cap);
    }
    const double clamped = std::clamp(score, 0.0, 1.0);
    bd.clamped = clamped != score;
    bd.score = clamped;
    return bd;
}

double compute_ucdi(const DamageInputs& in, const UcdiConfig& cfg) {
    return explain_ucdi(in, cfg).score;
}

}  // namespace noteval
