/// @file ncc.cpp
/// @brief Zero-mean normalized cross-correlation template matching, with a
///        coarse-to-fine search for large windows.

#include <noteval/damage.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <thread>
#include <vector>

#include <noteval/color.hpp>
#include <noteval/transform.hpp>

namespace noteval {
namespace {

struct Prepared {
    int tw = 0, th = 0;
    std::vector<double> tzero;  // template minus its mean
    double tnorm_sq = 0.0;      // sum of squared zero-mean template values
};

Prepared prepare(const RasterImage& tmpl) {
    Prepared p;
    p.tw = tmpl.width();
    p.th = tmpl.height();
    const std::size_t n = static_cast<std::size_t>(p.tw) * p.th;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += tmpl.data()[i];
    mean /= static_cast<double>(n);
    p.tzero.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.tzero[i] = tmpl.data()[i] - mean;
        p.tnorm_sq += p.tzero[i] * p.tzero[i];
    }
    return p;
}

/// Integral images of the window (sum and sum of squares) for O(1) local
/// statistics at every placement.
struct WindowSums {
    int w = 0, h = 0;
    std::vector<double> sum, sq;

    explicit WindowSums(const RasterImage& win) : w(win.width()), h(win.height()) {
        sum.assign(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
        sq.assign(sum.size(), 0.0);
        for (int y = 0; y < h; ++y) {
            const std::uint8_t* row = win.row(y);
            double rs = 0.0, rq = 0.0;
            for (int x = 0; x < w; ++x) {
                rs += row[x];
                rq += static_cast<double>(row[x]) * row[x];
                const std::size_t i = static_cast<std::size_t>(y + 1) * (w + 1) + x + 1;
                const std::size_t up = static_cast<std::size_t>(y) * (w + 1) + x + 1;
                sum[i] = sum[up] + rs;
                sq[i] = sq[up] + rq;
            }
        }
    }

    void stats(int x, int y, int rw, int rh, double& s, double& q) const {
        const std::size_t a = static_cast<std::size_t>(y) * (w + 1) + x;
        const std::size_t b = static_cast<std::size_t>(y) * (w + 1) + x + rw;
        const std::size_t c = static_cast<std::size_t>(y + rh) * (w + 1) + x;
        const std::size_t d = static_cast<std::size_t>(y + rh) * (w + 1) + x + rw;
        s = sum[d] - sum[b] - sum[c] + sum[a];
        q = sq[d] - sq[b] - sq[c] + sq[a];
    }
};

double score_at(const Prepared& p, const RasterImage& win, const WindowSums& ws, int px,
                int py) {
    double wsum, wsq;
    ws.stats(px, py, p.tw, p.th, wsum, wsq);
    const double n = static_cast<double>(p.tw) * p.th;
    const double wvar = wsq - wsum * wsum / n;
    const double denom_sq = p.tnorm_sq * wvar;
    if (denom_sq <= 1e-12) return 0.0;  // flat patch on either side

    double num = 0.0;
    const double* tz = p.tzero.data();
    for (int y = 0; y < p.th; ++y) {
        const std::uint8_t* row = win.row(py + y) + px;
        for (int x = 0; x < p.tw; ++x) num += tz[static_cast<std::size_t>(y) * p.tw + x] * row[x];
    }
    // num is already zero-mean in the template factor; subtracting the window
    // mean contributes nothing because sum(tzero) == 0. Clamp away the fp
    // residue a perfect match leaves above 1.
    return std::clamp(num / std::sqrt(denom_sq), -1.0, 1.0);
}

NccPeak exhaustive(const Prepared& p, const RasterImage& win, const WindowSums& ws, int x0,
                   int y0, int x1, int y1) {
    NccPeak best;
    best.score = -2.0;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double s = score_at(p, win, ws, x, y);
            if (s > best.score) best = NccPeak{s, x, y};
        }
    }
    return best;
}

RasterImage central_crop(const RasterImage& img, int cw, int ch) {
    const int x0 = (img.width() - cw) / 2, y0 = (img.height() - ch) / 2;
    RasterImage out(cw, ch, 1);
    for (int y = 0; y < ch; ++y)
        std::copy(img.row(y0 + y) + x0, img.row(y0 + y) + x0 + cw, out.row(y));
    return out;
}

}  // namespace

NccPeak ncc_match(const RasterImage& tmpl, const RasterImage& window) {
    if (tmpl.channels() != 1 || window.channels() != 1)
        throw Error("ncc_match: expected grayscale inputs");

    // A window smaller than the template leaves one centred overlap.
    if (window.width() < tmpl.width() || window.height() < tmpl.height()) {
        const int cw = std::min(tmpl.width(), window.width());
        const int ch = std::min(tmpl.height(), window.height());
        const RasterImage t = central_crop(tmpl, cw, ch);
        const RasterImage w = central_crop(window, cw, ch);
        const Prepared p = prepare(t);
        const WindowSums ws(w);
        NccPeak peak = exhaustive(p, w, ws, 0, 0, 0, 0);
        peak.x = peak.y = 0;
        return peak;
    }

    const Prepared p = prepare(tmpl);
    const WindowSums ws(window);
    const int px_max = window.width() - tmpl.width();
    const int py_max = window.height() - tmpl.height();
    const long placements = static_cast<long>(px_max + 1) * (py_max + 1);
    const long cost = placements * p.tw * p.th;

    if (cost <= 8'000'000L) return exhaustive(p, window, ws, 0, 0, px_max, py_max);

    // Coarse pass at 1/k scale, then a full-resolution refinement around the
    // coarse peak. k is chosen so the decimated template keeps enough texture.
    const int k = std::clamp(std::min(p.tw, p.th) / 24, 2, 8);
    const RasterImage tc = resize_area(tmpl, std::max(1, p.tw / k), std::max(1, p.th / k));
    const RasterImage wc =
        resize_area(window, std::max(1, window.width() / k), std::max(1, window.height() / k));
    const Prepared pc = prepare(tc);
    const WindowSums wsc(wc);
    const int cx_max = wc.width() - tc.width();
    const int cy_max = wc.height() - tc.height();
    const NccPeak coarse = exhaustive(pc, wc, wsc, 0, 0, std::max(0, cx_max), std::max(0, cy_max));

    const int rx0 = std::clamp(coarse.x * k - 2 * k, 0, px_max);
    const int rx1 = std::clamp(coarse.x * k + 2 * k, 0, px_max);
    const int ry0 = std::clamp(coarse.y * k - 2 * k, 0, py_max);
    const int ry1 = std::clamp(coarse.y * k + 2 * k, 0, py_max);
    return exhaustive(p, window, ws, rx0, ry0, rx1, ry1);
}

FeatureMatchResult match_feature_clusters(const std::vector<FeatureCluster>& clusters,
                                          const RasterImage& warped, const DamageConfig& cfg) {
    cfg.validate();
    const RasterImage gray = warped.channels() == 1 ? warped : to_grayscale(warped);
    const int w = gray.width(), h = gray.height();
    const double diag = std::sqrt(static_cast<double>(w) * w + static_cast<double>(h) * h);
    const int dilate = std::max(1, static_cast<int>(std::lround(cfg.ncc_window_fraction * diag)));

    FeatureMatchResult res;
    res.matches.resize(clusters.size());

    const auto run = [&](std::size_t i) {
        const FeatureCluster& cl = clusters[i];
        const int x0 = std::max(0, cl.x - dilate);
        const int y0 = std::max(0, cl.y - dilate);
        const int x1 = std::min(w, cl.x + cl.w + dilate);
        const int y1 = std::min(h, cl.y + cl.h + dilate);
        RasterImage window(x1 - x0, y1 - y0, 1);
        for (int y = 0; y < window.height(); ++y)
            std::copy(gray.row(y0 + y) + x0, gray.row(y0 + y) + x1, window.row(y));

        const NccPeak peak = ncc_match(cl.patch, window);
        ClusterMatch m;
        m.cluster_id = cl.id;
        m.score = peak.score;
        m.peak_x = x0 + peak.x;
        m.peak_y = y0 + peak.y;
        m.missing = peak.score < cfg.ncc_missing_threshold;
        res.matches[i] = m;
    };

    // Clusters are independent; results land by index, so the merge order is
    // deterministic regardless of the thread count.
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(clusters.size()));
    if (workers <= 1 || clusters.size() < 4) {
        for (std::size_t i = 0; i < clusters.size(); ++i) run(i);
    } else {
        std::vector<std::future<void>> futs;
        std::atomic<std::size_t> next{0};
        for (unsigned t = 0; t < workers; ++t) {
            futs.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next.fetch_add(1); i < clusters.size();
                     i = next.fetch_add(1))
                    run(i);
            }));
        }
        for (auto& f : futs) f.get();
    }

    for (const ClusterMatch& m : res.matches) res.missing_count += m.missing ? 1 : 0;
    return res;
}

}  // namespace noteval
