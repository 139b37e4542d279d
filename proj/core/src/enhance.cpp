#include <noteval/enhance.hpp>

#include <algorithm>
#include <cmath>

#include <noteval/color.hpp>
#include <noteval/stats.hpp>

namespace noteval {

void EnhanceConfig::validate() const {
    if (median_kernel < 3 || median_kernel % 2 == 0)
        throw Error("enhance config: median_kernel must be odd and >= 3");
    if (stretch_low_pct < 0.0 || stretch_low_pct >= stretch_high_pct || stretch_high_pct > 100.0)
        throw Error("enhance config: require 0 <= stretch_low_pct < stretch_high_pct <= 100");
    if (clahe_clip <= 0.0)
        throw Error("enhance config: clahe_clip must be > 0");
    if (clahe_tiles_x < 1 || clahe_tiles_y < 1)
        throw Error("enhance config: tile grid must be >= 1x1");
    if (bilateral_diameter < 1)
        throw Error("enhance config: bilateral_diameter must be >= 1");
    if (bilateral_sigma_color <= 0.0 || bilateral_sigma_space <= 0.0)
        throw Error("enhance config: bilateral sigmas must be > 0");
}

// ---------------------------------------------------------------------------
// Median blur: per-row sliding 256-bin histogram (Huang's method).
// ---------------------------------------------------------------------------

RasterImage median_blur(const RasterImage& img, int kernel) {
    if (kernel < 3 || kernel % 2 == 0)
        throw Error("median_blur: kernel must be odd and >= 3");
    const int w = img.width(), h = img.height(), ch = img.channels();
    const int r = kernel / 2;
    const int target = (kernel * kernel) / 2 + 1;  // rank of the median, 1-based
    RasterImage out(w, h, ch);

    std::array<int, 256> hist;
    for (int c = 0; c < ch; ++c) {
        for (int y = 0; y < h; ++y) {
            hist.fill(0);
            // Seed the histogram with the window centered on x = 0.
            for (int dy = -r; dy <= r; ++dy) {
                const int sy = std::clamp(y + dy, 0, h - 1);
                for (int dx = -r; dx <= r; ++dx) {
                    const int sx = std::clamp(dx, 0, w - 1);
                    ++hist[img.at(sx, sy, c)];
                }
            }
            for (int x = 0; x < w; ++x) {
                if (x > 0) {
                    // Slide: drop the departing column, add the entering one.
                    const int out_x = std::clamp(x - 1 - r, 0, w - 1);
                    const int in_x = std::clamp(x + r, 0, w - 1);
                    for (int dy = -r; dy <= r; ++dy) {
                        const int sy = std::clamp(y + dy, 0, h - 1);
                        --hist[img.at(out_x, sy, c)];
                        ++hist[img.at(in_x, sy, c)];
                    }
                }
                int seen = 0;
                for (int v = 0; v < 256; ++v) {
                    seen += hist[v];
                    if (seen >= target) {
                        out.at(x, y, c) = static_cast<std::uint8_t>(v);
                        break;
                    }
                }
            }
        }
    }
    return out;
}

RasterImage sharpen(const RasterImage& img) {
    const int w = img.width(), h = img.height(), ch = img.channels();
    RasterImage out(w, h, ch);
    for (int y = 0; y < h; ++y) {
        const int ym = std::max(y - 1, 0), yp = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0), xp = std::min(x + 1, w - 1);
            for (int c = 0; c < ch; ++c) {
                const int ring = img.at(xm, ym, c) + img.at(x, ym, c) + img.at(xp, ym, c) +
                                 img.at(xm, y, c) + img.at(xp, y, c) +
                                 img.at(xm, yp, c) + img.at(x, yp, c) + img.at(xp, yp, c);
                const int v = 9 * img.at(x, y, c) - ring;
                out.at(x, y, c) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
            }
        }
    }
    return out;
}

RasterImage contrast_stretch(const RasterImage& img, double low_pct, double high_pct) {
    if (low_pct < 0.0 || low_pct >= high_pct || high_pct > 100.0)
        throw Error("contrast_stretch: require 0 <= low < high <= 100");
    const int w = img.width(), h = img.height(), ch = img.channels();
    const std::size_t pixels = static_cast<std::size_t>(w) * h;
    RasterImage out = img;
    for (int c = 0; c < ch; ++c) {
        const std::uint8_t lo = percentile_u8(img.data() + c, pixels, ch, low_pct);
        const std::uint8_t hi = percentile_u8(img.data() + c, pixels, ch, high_pct);
        if (hi == lo)
            continue;  // constant channel: stretching is undefined, pass through
        const double scale = 255.0 / (hi - lo);
        std::uint8_t lut[256];
        for (int v = 0; v < 256; ++v)
            lut[v] = clamp_u8((v - lo) * scale);
        std::uint8_t* p = out.data() + c;
        for (std::size_t i = 0; i < pixels; ++i, p += ch)
            *p = lut[*p];
    }
    return out;
}

// ---------------------------------------------------------------------------
// CLAHE
// ---------------------------------------------------------------------------

std::array<double, 256> clahe_clip_histogram(const std::array<int, 256>& hist, double clip) {
    double excess = 0.0;
    for (int v = 0; v < 256; ++v)
        excess += std::max(hist[v] - clip, 0.0);
    std::array<double, 256> out;
    const double share = excess / 256.0;
    for (int v = 0; v < 256; ++v)
        out[v] = std::min<double>(hist[v], clip) + share;
    return out;
}

namespace {

// Tile boundaries partitioning [0, extent) into `tiles` near-equal spans.
std::vector<int> tile_edges(int extent, int tiles) {
    std::vector<int> edges(tiles + 1);
    for (int t = 0; t <= tiles; ++t)
        edges[t] = static_cast<int>(static_cast<long>(extent) * t / tiles);
    return edges;
}

// Equalization map of one tile: map[v] = CDF(v) * 255.
std::array<double, 256> tile_map(const RasterImage& gray, int x0, int x1, int y0, int y1,
                                 double clip) {
    std::array<int, 256> hist{};
    for (int y = y0; y < y1; ++y) {
        const std::uint8_t* row = gray.row(y);
        for (int x = x0; x < x1; ++x)
            ++hist[row[x]];
    }
    const double area = static_cast<double>(x1 - x0) * (y1 - y0);
    const double clip_count = std::max(1.0, clip * area / 256.0);
    const auto clipped = clahe_clip_histogram(hist, clip_count);
    std::array<double, 256> map;
    double cdf = 0.0;
    for (int v = 0; v < 256; ++v) {
        cdf += clipped[v];
        map[v] = cdf / area * 255.0;
    }
    return map;
}

}  // namespace

RasterImage clahe_gray(const RasterImage& gray, double clip, int tiles_x, int tiles_y) {
    if (gray.channels() != 1)
        throw Error("clahe_gray: single-channel input required");
    if (clip <= 0.0 || tiles_x < 1 || tiles_y < 1)
        throw Error("clahe_gray: invalid clip limit or tile grid");
    const int w = gray.width(), h = gray.height();
    if (w < tiles_x || h < tiles_y)
        throw Error("clahe: image too small for tile grid");

    const auto ex = tile_edges(w, tiles_x);
    const auto ey = tile_edges(h, tiles_y);
    std::vector<std::array<double, 256>> maps(static_cast<std::size_t>(tiles_x) * tiles_y);
    std::vector<double> cx(tiles_x), cy(tiles_y);
    for (int ty = 0; ty < tiles_y; ++ty) {
        cy[ty] = (ey[ty] + ey[ty + 1] - 1) / 2.0;
        for (int tx = 0; tx < tiles_x; ++tx) {
            cx[tx] = (ex[tx] + ex[tx + 1] - 1) / 2.0;
            maps[static_cast<std::size_t>(ty) * tiles_x + tx] =
                tile_map(gray, ex[tx], ex[tx + 1], ey[ty], ey[ty + 1], clip);
        }
    }

    RasterImage out(w, h, 1);
    for (int y = 0; y < h; ++y) {
        // Bracketing tile rows and the vertical blend weight.
        int ty0 = 0;
        while (ty0 + 1 < tiles_y && cy[ty0 + 1] <= y) ++ty0;
        int ty1 = ty0;
        double wy = 0.0;
        if (y > cy[ty0] && ty0 + 1 < tiles_y) {
            ty1 = ty0 + 1;
            wy = (y - cy[ty0]) / (cy[ty1] - cy[ty0]);
        }
        const std::uint8_t* src = gray.row(y);
        std::uint8_t* dst = out.row(y);
        for (int x = 0; x < w; ++x) {
            int tx0 = 0;
            while (tx0 + 1 < tiles_x && cx[tx0 + 1] <= x) ++tx0;
            int tx1 = tx0;
            double wx = 0.0;
            if (x > cx[tx0] && tx0 + 1 < tiles_x) {
                tx1 = tx0 + 1;
                wx = (x - cx[tx0]) / (cx[tx1] - cx[tx0]);
            }
            const int v = src[x];
            const double m00 = maps[static_cast<std::size_t>(ty0) * tiles_x + tx0][v];
            const double m10 = maps[static_cast<std::size_t>(ty0) * tiles_x + tx1][v];
            const double m01 = maps[static_cast<std::size_t>(ty1) * tiles_x + tx0][v];
            const double m11 = maps[static_cast<std::size_t>(ty1) * tiles_x + tx1][v];
            const double top = m00 * (1.0 - wx) + m10 * wx;
            const double bot = m01 * (1.0 - wx) + m11 * wx;
            dst[x] = clamp_u8(top * (1.0 - wy) + bot * wy);
        }
    }
    return out;
}

RasterImage clahe(const RasterImage& rgb, const EnhanceConfig& cfg) {
    if (rgb.channels() == 1)
        return clahe_gray(rgb, cfg.clahe_clip, cfg.clahe_tiles_x, cfg.clahe_tiles_y);
    RasterImage lab = rgb_to_lab(rgb);
    RasterImage lum(lab.width(), lab.height(), 1);
    const std::size_t n = static_cast<std::size_t>(lab.width()) * lab.height();
    for (std::size_t i = 0; i < n; ++i)
        lum.data()[i] = lab.data()[i * 3];
    const RasterImage eq = clahe_gray(lum, cfg.clahe_clip, cfg.clahe_tiles_x, cfg.clahe_tiles_y);
    for (std::size_t i = 0; i < n; ++i)
        lab.data()[i * 3] = eq.data()[i];
    return lab_to_rgb(lab);
}

// ---------------------------------------------------------------------------
// Bilateral filter
// ---------------------------------------------------------------------------

RasterImage bilateral_filter(const RasterImage& img, const EnhanceConfig& cfg) {
    cfg.validate();
    const int w = img.width(), h = img.height(), ch = img.channels();
    const int r = cfg.bilateral_diameter / 2;

    // Both LUTs are exact: spatial offsets and range distances are integers.
    std::vector<double> space_lut(static_cast<std::size_t>(2 * r * r + 1));
    const double space_coeff = -0.5 / (cfg.bilateral_sigma_space * cfg.bilateral_sigma_space);
    for (std::size_t d2 = 0; d2 < space_lut.size(); ++d2)
        space_lut[d2] = std::exp(space_coeff * static_cast<double>(d2));
    std::vector<double> range_lut(256 * static_cast<std::size_t>(ch));
    const double range_coeff = -0.5 / (cfg.bilateral_sigma_color * cfg.bilateral_sigma_color);
    for (std::size_t d = 0; d < range_lut.size(); ++d)
        range_lut[d] = std::exp(range_coeff * static_cast<double>(d) * static_cast<double>(d));

    RasterImage out(w, h, ch);
    std::array<double, 3> acc;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint8_t* center = img.row(y) + static_cast<std::size_t>(x) * ch;
            acc.fill(0.0);
            double wsum = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                const int sy = std::clamp(y + dy, 0, h - 1);
                const std::uint8_t* row = img.row(sy);
                for (int dx = -r; dx <= r; ++dx) {
                    const int sx = std::clamp(x + dx, 0, w - 1);
                    const std::uint8_t* p = row + static_cast<std::size_t>(sx) * ch;
                    int cdist = 0;
                    for (int c = 0; c < ch; ++c)
                        cdist += std::abs(p[c] - center[c]);
                    const double wgt = space_lut[static_cast<std::size_t>(dx * dx + dy * dy)] *
                                       range_lut[static_cast<std::size_t>(cdist)];
                    for (int c = 0; c < ch; ++c)
                        acc[c] += wgt * p[c];
                    wsum += wgt;
                }
            }
            for (int c = 0; c < ch; ++c)
                out.at(x, y, c) = clamp_u8(acc[c] / wsum);
        }
    }
    return out;
}

RasterImage enhance_pipeline(const RasterImage& img, const EnhanceConfig& cfg) {
    cfg.validate();
    RasterImage cur = img;
    if (cfg.median_enabled)
        cur = median_blur(cur, cfg.median_kernel);
    if (cfg.sharpen_enabled)
        cur = sharpen(cur);
    if (cfg.stretch_enabled)
        cur = contrast_stretch(cur, cfg.stretch_low_pct, cfg.stretch_high_pct);
    if (cfg.clahe_enabled)
        cur = clahe(cur, cfg);
    return cur;
}

}  // namespace noteval
