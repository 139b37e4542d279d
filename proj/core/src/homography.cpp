#include <noteval/align.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Dense>

namespace noteval {
namespace {

struct Norm {
    double scale = 1.0, cx = 0.0, cy = 0.0;
};

/// Hartley normalisation: centroid to origin, mean distance to sqrt(2).
bool normalise(const std::vector<Correspondence>& corr, const std::vector<int>& idx, bool src,
               Norm& n) {
    double cx = 0, cy = 0;
    for (int i : idx) {
        cx += src ? corr[i].x0 : corr[i].x1;
        cy += src ? corr[i].y0 : corr[i].y1;
    }
    cx /= idx.size();
    cy /= idx.size();
    double md = 0;
    for (int i : idx) {
        const double dx = (src ? corr[i].x0 : corr[i].x1) - cx;
        const double dy = (src ? corr[i].y0 : corr[i].y1) - cy;
        md += std::sqrt(dx * dx + dy * dy);
    }
    md /= idx.size();
    if (md < 1e-9) return false;
    n.scale = std::numbers::sqrt2 / md;
    n.cx = cx;
    n.cy = cy;
    return true;
}

/// Direct linear transform over the selected correspondences. Returns false
/// on degenerate configurations.
bool dlt(const std::vector<Correspondence>& corr, const std::vector<int>& idx, Mat3& out) {
    Norm ns, nd;
    if (!normalise(corr, idx, true, ns) || !normalise(corr, idx, false, nd)) return false;

    Eigen::MatrixXd a(2 * idx.size(), 9);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const Correspondence& c = corr[idx[r]];
        const double x = ns.scale * (c.x0 - ns.cx), y = ns.scale * (c.y0 - ns.cy);
        const double u = nd.scale * (c.x1 - nd.cx), v = nd.scale * (c.y1 - nd.cy);
        a.row(2 * r) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
        a.row(2 * r + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd h = svd.matrixV().col(8);

    const Mat3 hn{h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8)};
    // Undo the normalisation: H = Tdst^-1 * Hn * Tsrc.
    const Mat3 tsrc{ns.scale, 0, -ns.scale * ns.cx, 0, ns.scale, -ns.scale * ns.cy, 0, 0, 1};
    const Mat3 tdst_inv{1.0 / nd.scale, 0, nd.cx, 0, 1.0 / nd.scale, nd.cy, 0, 0, 1};
    Mat3 full = mat3_mul(tdst_inv, mat3_mul(hn, tsrc));

    if (std::fabs(full[8]) < 1e-12) return false;
    for (double& v : full) v /= full[8];
    const double det = full[0] * (full[4] * full[8] - full[5] * full[7]) -
                       full[1] * (full[3] * full[8] - full[5] * full[6]) +
                       full[2] * (full[3] * full[7] - full[4] * full[6]);
    if (std::fabs(det) < 1e-8) return false;
    out = full;
    return true;
}

double reproj_error_sq(const Mat3& h, const Correspondence& c) {
    const auto [px, py] = mat3_apply(h, c.x0, c.y0);
    const double dx = px - c.x1, dy = py - c.y1;
    return dx * dx + dy * dy;
}

/// No three of the four points (on either side) may be collinear.
bool sample_degenerate(const std::vector<Correspondence>& corr, const std::array<int, 4>& pick) {
    const auto collinear = [](double ax, double ay, double bx, double by, double cx, double cy) {
        const double cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
        return std::fabs(cross) < 1e-6;
    };
    for (int skip = 0; skip < 4; ++skip) {
        std::array<int, 3> t{};
        int k = 0;
        for (int i = 0; i < 4; ++i)
            if (i != skip) t[k++] = pick[i];
        const Correspondence &a = corr[t[0]], &b = corr[t[1]], &c = corr[t[2]];
        if (collinear(a.x0, a.y0, b.x0, b.y0, c.x0, c.y0)) return true;
        if (collinear(a.x1, a.y1, b.x1, b.y1, c.x1, c.y1)) return true;
    }
    return false;
}

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (i * 8)) & 0xff;
        h *= 1099511628211ULL;
    }
    return h;
}

/// Seed derived from the correspondence *values* in canonical order, so the
/// estimate is invariant under permutations of the input list.
std::uint64_t seed_from(const std::vector<Correspondence>& corr, const std::vector<int>& order) {
    std::uint64_t h = 14695981039346656037ULL;
    for (int i : order) {
        h = fnv1a(h, std::bit_cast<std::uint64_t>(corr[i].x0));
        h = fnv1a(h, std::bit_cast<std::uint64_t>(corr[i].y0));
        h = fnv1a(h, std::bit_cast<std::uint64_t>(corr[i].x1));
        h = fnv1a(h, std::bit_cast<std::uint64_t>(corr[i].y1));
    }
    return h;
}

}  // namespace

HomographyResult estimate_homography(const std::vector<Correspondence>& corr,
                                     const AlignConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(corr.size());
    if (n < 4) throw Error("alignment failed: fewer than 4 correspondences");

    // Canonical processing order, independent of caller ordering.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        const Correspondence &a = corr[i], &b = corr[j];
        if (a.x0 != b.x0) return a.x0 < b.x0;
        if (a.y0 != b.y0) return a.y0 < b.y0;
        if (a.x1 != b.x1) return a.x1 < b.x1;
        return a.y1 < b.y1;
    });

    std::mt19937_64 rng(seed_from(corr, order));
    const double thresh_sq = cfg.ransac_reproj_threshold * cfg.ransac_reproj_threshold;

    int best_count = 0;
    std::vector<char> best_mask;
    int budget = cfg.ransac_max_iters;

    for (int iter = 0; iter < budget; ++iter) {
        std::array<int, 4> pick{};
        int got = 0;
        int guard = 0;
        while (got < 4 && guard++ < 256) {
            const int cand = order[rng() % n];
            bool dup = false;
            for (int k = 0; k < got; ++k) dup |= pick[k] == cand;
            if (!dup) pick[got++] = cand;
        }
        if (got < 4 || sample_degenerate(corr, pick)) continue;

        Mat3 h{};
        if (!dlt(corr, std::vector<int>(pick.begin(), pick.end()), h)) continue;

        int count = 0;
        std::vector<char> mask(n, 0);
        for (int i = 0; i < n; ++i) {
            if (reproj_error_sq(h, corr[i]) <= thresh_sq) {
                mask[i] = 1;
                ++count;
            }
        }
        if (count > best_count) {
            best_count = count;
            best_mask = std::move(mask);
            // Adaptive budget for 99% confidence at the current inlier rate.
            const double w = static_cast<double>(count) / n;
            const double p_all = std::pow(w, 4);
            if (p_all > 1e-9 && p_all < 1.0) {
                const int need =
                    static_cast<int>(std::ceil(std::log(0.01) / std::log(1.0 - p_all)));
                budget = std::clamp(need, iter + 1, cfg.ransac_max_iters);
            }
        }
    }

    if (best_count < cfg.min_inliers) throw Error("alignment failed");

    // Least-squares refit over the consensus set, then score against it.
    std::vector<int> inlier_idx;
    for (int i = 0; i < n; ++i)
        if (best_mask[i]) inlier_idx.push_back(i);

    HomographyResult res;
    if (!dlt(corr, inlier_idx, res.h)) throw Error("alignment failed");

    res.inliers.assign(n, 0);
    double err_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = reproj_error_sq(res.h, corr[i]);
        if (e <= thresh_sq) {
            res.inliers[i] = 1;
            ++res.inlier_count;
            err_sum += std::sqrt(e);
        }
    }
    if (res.inlier_count < cfg.min_inliers) throw Error("alignment failed");
    res.mean_reproj_error = err_sum / res.inlier_count;
    return res;
}

RasterImage warp_to_reference(const RasterImage& damaged, const Mat3& h, int ref_width,
                              int ref_height) {
    return warp_image(damaged, h, ref_width, ref_height, 255);
}

}  // namespace noteval
