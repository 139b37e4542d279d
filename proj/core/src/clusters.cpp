/// @file clusters.cpp
/// @brief Salient-contour extraction and density clustering of the reference.

#include <noteval/damage.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_map>

#include <noteval/color.hpp>

namespace noteval {
namespace {

constexpr int kUnvisited = -2;
constexpr int kNoise = -1;

/// Uniform grid over the points with cell edge = eps; a point's eps-ball is
/// covered by its 3x3 cell neighbourhood.
class NeighborGrid {
public:
    NeighborGrid(const std::vector<std::pair<double, double>>& pts, double eps)
        : pts_(pts), eps_(eps) {
        for (int i = 0; i < static_cast<int>(pts.size()); ++i)
            cells_[key(pts[i].first, pts[i].second)].push_back(i);
    }

    /// Indices within eps (inclusive), ascending; includes the query itself.
    std::vector<int> neighbors(int q) const {
        const auto [qx, qy] = pts_[q];
        const long cx = cell(qx), cy = cell(qy);
        std::vector<int> out;
        for (long gy = cy - 1; gy <= cy + 1; ++gy) {
            for (long gx = cx - 1; gx <= cx + 1; ++gx) {
                const auto it = cells_.find((gx << 32) ^ (gy & 0xffffffffLL));
                if (it == cells_.end()) continue;
                for (int i : it->second) {
                    const double dx = pts_[i].first - qx, dy = pts_[i].second - qy;
                    if (dx * dx + dy * dy <= eps_ * eps_) out.push_back(i);
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    long cell(double v) const { return static_cast<long>(std::floor(v / eps_)); }
    long key(double x, double y) const { return (cell(x) << 32) ^ (cell(y) & 0xffffffffLL); }

    const std::vector<std::pair<double, double>>& pts_;
    double eps_;
    std::unordered_map<long, std::vector<int>> cells_;
};

}  // namespace

std::vector<int> dbscan_labels(const std::vector<std::pair<double, double>>& pts, double eps,
                               int min_samples) {
    if (eps <= 0.0) throw Error("dbscan: eps must be positive");
    if (min_samples < 1) throw Error("dbscan: min samples must be >= 1");

    const int n = static_cast<int>(pts.size());
    std::vector<int> labels(n, kUnvisited);
    const NeighborGrid grid(pts, eps);
    int cluster = 0;

    for (int i = 0; i < n; ++i) {
        if (labels[i] != kUnvisited) continue;
        const std::vector<int> nb = grid.neighbors(i);
        if (static_cast<int>(nb.size()) < min_samples) {
            labels[i] = kNoise;
            continue;
        }
        labels[i] = cluster;
        std::deque<int> seeds(nb.begin(), nb.end());
        while (!seeds.empty()) {
            const int j = seeds.front();
            seeds.pop_front();
            if (labels[j] == kNoise) labels[j] = cluster;  // border point adopted
            if (labels[j] != kUnvisited) continue;
            labels[j] = cluster;
            const std::vector<int> nj = grid.neighbors(j);
            if (static_cast<int>(nj.size()) >= min_samples)
                seeds.insert(seeds.end(), nj.begin(), nj.end());
        }
        ++cluster;
    }
    return labels;
}

std::vector<FeatureCluster> extract_feature_clusters(const RasterImage& ref,
                                                     const BinaryMask& mask,
                                                     const DamageConfig& cfg) {
    cfg.validate();
    if (ref.width() != mask.width() || ref.height() != mask.height())
        throw Error("extract_feature_clusters: mask shape differs");

    const RasterImage gray = ref.channels() == 1 ? ref : to_grayscale(ref);
    const int w = gray.width(), h = gray.height();

    // Integral image for the local-mean threshold.
    std::vector<double> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* row = gray.row(y);
        double rowsum = 0.0;
        for (int x = 0; x < w; ++x) {
            rowsum += row[x];
            integral[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] =
                integral[static_cast<std::size_t>(y) * (w + 1) + x + 1] + rowsum;
        }
    }
    const auto box_mean = [&](int x, int y) {
        const int r = cfg.adaptive_block / 2;
        const int x0 = std::max(0, x - r), x1 = std::min(w - 1, x + r);
        const int y0 = std::max(0, y - r), y1 = std::min(h - 1, y + r);
        const double s = integral[static_cast<std::size_t>(y1 + 1) * (w + 1) + x1 + 1] -
                         integral[static_cast<std::size_t>(y0) * (w + 1) + x1 + 1] -
                         integral[static_cast<std::size_t>(y1 + 1) * (w + 1) + x0] +
                         integral[static_cast<std::size_t>(y0) * (w + 1) + x0];
        return s / ((x1 - x0 + 1) * (y1 - y0 + 1));
    };

    // Contour points: foreground pixels markedly darker than their local mean.
    std::vector<std::pair<int, int>> points;
    for (int y = 0; y < h; ++y) {
        const std::uint8_t* g = gray.row(y);
        const std::uint8_t* m = mask.row(y);
        for (int x = 0; x < w; ++x)
            if (m[x] && g[x] < box_mean(x, y) - cfg.adaptive_offset) points.emplace_back(x, y);
    }

    // Deterministic decimation before clustering.
    if (static_cast<int>(points.size()) > cfg.max_contour_points) {
        std::vector<std::pair<int, int>> kept;
        kept.reserve(cfg.max_contour_points);
        const std::size_t n = points.size();
        for (int i = 0; i < cfg.max_contour_points; ++i)
            kept.push_back(points[i * n / cfg.max_contour_points]);
        points = std::move(kept);
    }

    std::vector<std::pair<double, double>> coords;
    coords.reserve(points.size());
    for (const auto& [x, y] : points) coords.emplace_back(x, y);

    const double diag = std::sqrt(static_cast<double>(w) * w + static_cast<double>(h) * h);
    const std::vector<int> labels =
        dbscan_labels(coords, cfg.dbscan_eps * diag, cfg.dbscan_min_samples);

    std::map<int, FeatureCluster> grouped;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (labels[i] < 0) continue;
        grouped[labels[i]].points.push_back(points[i]);
    }
    if (grouped.empty()) throw Error("no salient features in reference");

    std::vector<FeatureCluster> clusters;
    clusters.reserve(grouped.size());
    for (auto& [label, cl] : grouped) {
        cl.id = label;
        int x0 = w, y0 = h, x1 = -1, y1 = -1;
        for (const auto& [px, py] : cl.points) {
            x0 = std::min(x0, px);
            y0 = std::min(y0, py);
            x1 = std::max(x1, px);
            y1 = std::max(y1, py);
        }
        x0 = std::max(0, x0 - cfg.patch_pad);
        y0 = std::max(0, y0 - cfg.patch_pad);
        x1 = std::min(w - 1, x1 + cfg.patch_pad);
        y1 = std::min(h - 1, y1 + cfg.patch_pad);
        cl.x = x0;
        cl.y = y0;
        cl.w = x1 - x0 + 1;
        cl.h = y1 - y0 + 1;
        cl.patch = RasterImage(cl.w, cl.h, 1);
        for (int y = 0; y < cl.h; ++y)
            std::copy(gray.row(y0 + y) + x0, gray.row(y0 + y) + x0 + cl.w, cl.patch.row(y));
        clusters.push_back(std::move(cl));
    }
    return clusters;
}

}  // namespace noteval
