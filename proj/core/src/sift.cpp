/// @file sift.cpp
/// @brief DoG-pyramid keypoint detector with rotation-normalized gradient
///        descriptors (Lowe-style), tuned for note registration.

#include <noteval/align.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace noteval {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSigma0 = 1.6;       // blur of pyramid layer 0
constexpr double kAssumedBlur = 0.5;  // blur assumed already present in the input
constexpr int kBorder = 5;            // extrema scan margin, px
constexpr int kOriBins = 36;
constexpr int kDescWidth = 4;  // spatial bins per side
constexpr int kDescBins = 8;   // orientation bins per cell

struct FloatImage {
    int w = 0, h = 0;
    std::vector<float> px;

    FloatImage() = default;
    FloatImage(int w_, int h_) : w(w_), h(h_), px(static_cast<std::size_t>(w_) * h_) {}

    float at(int x, int y) const { return px[static_cast<std::size_t>(y) * w + x]; }
    float& at(int x, int y) { return px[static_cast<std::size_t>(y) * w + x]; }
};

FloatImage to_float(const RasterImage& gray) {
    FloatImage out(gray.width(), gray.height());
    const std::uint8_t* src = gray.data();
    for (std::size_t i = 0; i < out.px.size(); ++i) out.px[i] = src[i] * (1.0f / 255.0f);
    return out;
}

std::vector<float> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(sigma * 4.0)));
    std::vector<float> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
        k[i + radius] = static_cast<float>(v);
        sum += v;
    }
    for (float& v : k) v = static_cast<float>(v / sum);
    return k;
}

FloatImage gaussian_blur(const FloatImage& src, double sigma) {
    const std::vector<float> k = gaussian_kernel(sigma);
    const int radius = static_cast<int>(k.size() / 2);
    FloatImage tmp(src.w, src.h), out(src.w, src.h);
    // Horizontal pass, replicate border.
    for (int y = 0; y < src.h; ++y) {
        const float* row = &src.px[static_cast<std::size_t>(y) * src.w];
        float* dst = &tmp.px[static_cast<std::size_t>(y) * src.w];
        for (int x = 0; x < src.w; ++x) {
            float acc = 0.0f;
            if (x >= radius && x + radius < src.w) {
                for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * row[x + i];
            } else {
                for (int i = -radius; i <= radius; ++i)
                    acc += k[i + radius] * row[std::clamp(x + i, 0, src.w - 1)];
            }
            dst[x] = acc;
        }
    }
    // Vertical pass.
    for (int y = 0; y < src.h; ++y) {
        float* dst = &out.px[static_cast<std::size_t>(y) * src.w];
        if (y >= radius && y + radius < src.h) {
            for (int i = -radius; i <= radius; ++i) {
                const float kv = k[i + radius];
                const float* row = &tmp.px[static_cast<std::size_t>(y + i) * src.w];
                if (i == -radius)
                    for (int x = 0; x < src.w; ++x) dst[x] = kv * row[x];
                else
                    for (int x = 0; x < src.w; ++x) dst[x] += kv * row[x];
            }
        } else {
            for (int x = 0; x < src.w; ++x) {
                float acc = 0.0f;
                for (int i = -radius; i <= radius; ++i)
                    acc += k[i + radius] * tmp.at(x, std::clamp(y + i, 0, src.h - 1));
                dst[x] = acc;
            }
        }
    }
    return out;
}

FloatImage downsample2(const FloatImage& src) {
    FloatImage out(std::max(1, src.w / 2), std::max(1, src.h / 2));
    for (int y = 0; y < out.h; ++y)
        for (int x = 0; x < out.w; ++x) out.at(x, y) = src.at(x * 2, y * 2);
    return out;
}

struct Pyramid {
    std::vector<std::vector<FloatImage>> gauss;  // [octave][layer], layers = s + 3
    std::vector<std::vector<FloatImage>> dog;    // [octave][layer], layers = s + 2
};

Pyramid build_pyramid(const FloatImage& base, int octaves, int s) {
    Pyramid pyr;
    pyr.gauss.resize(octaves);
    pyr.dog.resize(octaves);

    std::vector<double> inc(s + 3);
    for (int i = 1; i < s + 3; ++i) {
        const double prev = kSigma0 * std::pow(2.0, (i - 1.0) / s);
        const double cur = kSigma0 * std::pow(2.0, static_cast<double>(i) / s);
        inc[i] = std::sqrt(cur * cur - prev * prev);
    }

    for (int o = 0; o < octaves; ++o) {
        auto& g = pyr.gauss[o];
        g.reserve(s + 3);
        if (o == 0) {
            const double diff =
                std::sqrt(std::max(kSigma0 * kSigma0 - kAssumedBlur * kAssumedBlur, 0.01));
            g.push_back(gaussian_blur(base, diff));
        } else {
            // Layer s of the previous octave carries exactly twice the base blur.
            g.push_back(downsample2(pyr.gauss[o - 1][s]));
        }
        for (int i = 1; i < s + 3; ++i) g.push_back(gaussian_blur(g[i - 1], inc[i]));

        auto& d = pyr.dog[o];
        d.reserve(s + 2);
        for (int i = 0; i < s + 2; ++i) {
            FloatImage diff(g[i].w, g[i].h);
            for (std::size_t p = 0; p < diff.px.size(); ++p)
                diff.px[p] = g[i + 1].px[p] - g[i].px[p];
            d.push_back(std::move(diff));
        }
    }
    return pyr;
}

/// 3D quadratic refinement of a DoG extremum. Returns false when the
/// candidate drifts out of the valid volume or fails the contrast/edge tests.
bool refine_extremum(const std::vector<FloatImage>& dog, int s, int& layer, int& x, int& y,
                     double& dx_out, double& dy_out, double& ds_out, double& contrast,
                     double contrast_threshold, double edge_threshold) {
    for (int attempt = 0; attempt < 5; ++attempt) {
        const FloatImage& d0 = dog[layer - 1];
        const FloatImage& d1 = dog[layer];
        const FloatImage& d2 = dog[layer + 1];

        const double gx = (d1.at(x + 1, y) - d1.at(x - 1, y)) * 0.5;
        const double gy = (d1.at(x, y + 1) - d1.at(x, y - 1)) * 0.5;
        const double gs = (d2.at(x, y) - d0.at(x, y)) * 0.5;

        const double v = d1.at(x, y);
        const double hxx = d1.at(x + 1, y) + d1.at(x - 1, y) - 2.0 * v;
        const double hyy = d1.at(x, y + 1) + d1.at(x, y - 1) - 2.0 * v;
        const double hss = d2.at(x, y) + d0.at(x, y) - 2.0 * v;
        const double hxy =
            (d1.at(x + 1, y + 1) - d1.at(x - 1, y + 1) - d1.at(x + 1, y - 1) + d1.at(x - 1, y - 1)) *
            0.25;
        const double hxs = (d2.at(x + 1, y) - d2.at(x - 1, y) - d0.at(x + 1, y) + d0.at(x - 1, y)) *
                           0.25;
        const double hys = (d2.at(x, y + 1) - d2.at(x, y - 1) - d0.at(x, y + 1) + d0.at(x, y - 1)) *
                           0.25;

        // Solve H * delta = -grad (3x3 Cramer).
        const double det = hxx * (hyy * hss - hys * hys) - hxy * (hxy * hss - hys * hxs) +
                           hxs * (hxy * hys - hyy * hxs);
        if (std::fabs(det) < 1e-30) return false;
        const double inv = 1.0 / det;
        const double dx = -inv * (gx * (hyy * hss - hys * hys) - gy * (hxy * hss - hys * hxs) +
                                  gs * (hxy * hys - hyy * hxs));
        const double dy = -inv * (-gx * (hxy * hss - hxs * hys) + gy * (hxx * hss - hxs * hxs) -
                                  gs * (hxx * hys - hxy * hxs));
        const double ds = -inv * (gx * (hxy * hys - hxs * hyy) - gy * (hxx * hys - hxy * hxs) +
                                  gs * (hxx * hyy - hxy * hxy));

        if (std::fabs(dx) < 0.5 && std::fabs(dy) < 0.5 && std::fabs(ds) < 0.5) {
            contrast = v + 0.5 * (gx * dx + gy * dy + gs * ds);
            if (std::fabs(contrast) * s < contrast_threshold) return false;
            // Edge response on the 2x2 spatial Hessian.
            const double tr = hxx + hyy;
            const double det2 = hxx * hyy - hxy * hxy;
            const double r = edge_threshold;
            if (det2 <= 0.0 || tr * tr * r >= (r + 1.0) * (r + 1.0) * det2) return false;
            dx_out = dx;
            dy_out = dy;
            ds_out = ds;
            return true;
        }

        x += static_cast<int>(std::lround(dx));
        y += static_cast<int>(std::lround(dy));
        layer += static_cast<int>(std::lround(ds));
        if (layer < 1 || layer > s || x < kBorder || x >= d1.w - kBorder || y < kBorder ||
            y >= d1.h - kBorder)
            return false;
    }
    return false;
}

/// Dominant gradient orientations around (x, y) on one Gaussian layer.
std::vector<double> dominant_orientations(const FloatImage& img, int x, int y, double sigma_oct) {
    const int radius = static_cast<int>(std::lround(4.5 * sigma_oct));
    const double weight_denom = 2.0 * (1.5 * sigma_oct) * (1.5 * sigma_oct);
    std::array<double, kOriBins> hist{};

    for (int i = -radius; i <= radius; ++i) {
        const int yy = y + i;
        if (yy < 1 || yy >= img.h - 1) continue;
        for (int j = -radius; j <= radius; ++j) {
            const int xx = x + j;
            if (xx < 1 || xx >= img.w - 1) continue;
            const double dx = img.at(xx + 1, yy) - img.at(xx - 1, yy);
            const double dy = img.at(xx, yy + 1) - img.at(xx, yy - 1);
            const double mag = std::sqrt(dx * dx + dy * dy);
            const double ori = std::atan2(dy, dx);  // [-pi, pi]
            const double w = std::exp(-(i * i + j * j) / weight_denom);
            int bin = static_cast<int>(std::lround(ori / kTwoPi * kOriBins));
            bin = ((bin % kOriBins) + kOriBins) % kOriBins;
            hist[bin] += w * mag;
        }
    }

    // Two circular box-smoothing passes.
    for (int pass = 0; pass < 2; ++pass) {
        std::array<double, kOriBins> sm{};
        for (int b = 0; b < kOriBins; ++b)
            sm[b] = (hist[(b + kOriBins - 1) % kOriBins] + hist[b] + hist[(b + 1) % kOriBins]) / 3.0;
        hist = sm;
    }

    const double peak = *std::max_element(hist.begin(), hist.end());
    std::vector<double> out;
    if (peak <= 0.0) return out;
    for (int b = 0; b < kOriBins; ++b) {
        const double l = hist[(b + kOriBins - 1) % kOriBins];
        const double r = hist[(b + 1) % kOriBins];
        if (hist[b] > l && hist[b] >= r && hist[b] >= 0.8 * peak) {
            double fb = b + 0.5 * (l - r) / (l - 2.0 * hist[b] + r);
            if (fb < 0) fb += kOriBins;
            if (fb >= kOriBins) fb -= kOriBins;
            double angle = fb * kTwoPi / kOriBins;
            if (angle >= kTwoPi) angle -= kTwoPi;
            out.push_back(angle);
        }
    }
    return out;
}

std::vector<float> make_descriptor(const FloatImage& img, double x, double y, double sigma_oct,
                                   double orientation) {
    constexpr int d = kDescWidth, n = kDescBins;
    const double hist_width = 3.0 * sigma_oct;
    const double cos_t = std::cos(orientation) / hist_width;
    const double sin_t = std::sin(orientation) / hist_width;
    const double bins_per_rad = n / kTwoPi;
    const double exp_scale = -1.0 / (d * d * 0.5);
    int radius = static_cast<int>(
        std::lround(hist_width * std::numbers::sqrt2 * (d + 1) * 0.5 + 0.5));
    radius = std::min(radius, static_cast<int>(std::sqrt(static_cast<double>(img.w) * img.w +
                                                         static_cast<double>(img.h) * img.h)));

    // (d+2)^3-ish scatter volume with guard rows for the trilinear spill.
    std::vector<double> hist((d + 2) * (d + 2) * n, 0.0);
    const int xi = static_cast<int>(std::lround(x));
    const int yi = static_cast<int>(std::lround(y));

    for (int i = -radius; i <= radius; ++i) {
        for (int j = -radius; j <= radius; ++j) {
            // R(-orientation): gradients use y-down atan2, so the grid must
            // counter-rotate for the descriptor to track the patch.
            const double c_rot = j * cos_t + i * sin_t;
            const double r_rot = -j * sin_t + i * cos_t;
            const double rbin = r_rot + d / 2.0 - 0.5;
            const double cbin = c_rot + d / 2.0 - 0.5;
            if (rbin <= -1.0 || rbin >= d || cbin <= -1.0 || cbin >= d) continue;
            const int yy = yi + i, xx = xi + j;
            if (xx < 1 || xx >= img.w - 1 || yy < 1 || yy >= img.h - 1) continue;

            const double dx = img.at(xx + 1, yy) - img.at(xx - 1, yy);
            const double dy = img.at(xx, yy + 1) - img.at(xx, yy - 1);
            double obin = (std::atan2(dy, dx) - orientation) * bins_per_rad;
            const double mag = std::sqrt(dx * dx + dy * dy) *
                               std::exp((c_rot * c_rot + r_rot * r_rot) * exp_scale);

            int r0 = static_cast<int>(std::floor(rbin));
            int c0 = static_cast<int>(std::floor(cbin));
            int o0 = static_cast<int>(std::floor(obin));
            const double rf = rbin - r0, cf = cbin - c0, of = obin - o0;
            o0 = ((o0 % n) + n) % n;

            // Trilinear scatter across the 8 surrounding cells.
            for (int dr = 0; dr <= 1; ++dr) {
                const int rr = r0 + dr + 1;
                if (rr < 0 || rr >= d + 2) continue;
                const double wr = dr ? rf : 1.0 - rf;
                for (int dc = 0; dc <= 1; ++dc) {
                    const int cc = c0 + dc + 1;
                    if (cc < 0 || cc >= d + 2) continue;
                    const double wc = dc ? cf : 1.0 - cf;
                    for (int dk = 0; dk <= 1; ++dk) {
                        const int oo = (o0 + dk) % n;
                        const double wo = dk ? of : 1.0 - of;
                        hist[(static_cast<std::size_t>(rr) * (d + 2) + cc) * n + oo] +=
                            mag * wr * wc * wo;
                    }
                }
            }
        }
    }

    // Collect interior cells, drop the guard ring.
    std::vector<float> desc;
    desc.reserve(d * d * n);
    for (int r = 1; r <= d; ++r)
        for (int c = 1; c <= d; ++c)
            for (int o = 0; o < n; ++o)
                desc.push_back(static_cast<float>(hist[(static_cast<std::size_t>(r) * (d + 2) + c) * n + o]));

    double norm = 0.0;
    for (float v : desc) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    if (norm < 1e-12) return {};
    for (float& v : desc) v = std::min(static_cast<float>(v / norm), 0.2f);
    norm = 0.0;
    for (float v : desc) norm += static_cast<double>(v) * v;
    norm = std::max(std::sqrt(norm), 1e-12);
    for (float& v : desc) v = static_cast<float>(v / norm);
    return desc;
}

}  // namespace

void AlignConfig::validate() const {
    if (ratio_test <= 0.0 || ratio_test >= 1.0)
        throw Error("align: ratio test must lie in (0, 1)");
    if (ransac_reproj_threshold <= 0.0)
        throw Error("align: reprojection threshold must be positive");
    if (ransac_max_iters <= 0) throw Error("align: iteration budget must be positive");
    if (min_matches < 4) throw Error("align: need at least 4 matches for a homography");
    if (min_inliers < 4) throw Error("align: need at least 4 inliers for a homography");
    if (octave_layers < 1 || contrast_threshold <= 0.0 || edge_threshold <= 1.0)
        throw Error("align: invalid detector parameters");
    if (max_keypoints < 0) throw Error("align: keypoint cap must be non-negative");
}

std::vector<Keypoint> detect_keypoints(const RasterImage& gray, const AlignConfig& cfg) {
    cfg.validate();
    if (gray.channels() != 1) throw Error("detect_keypoints: expected a grayscale image");
    if (gray.width() < 64 || gray.height() < 64)
        throw Error("detect_keypoints: image smaller than 64x64");

    const int s = cfg.octave_layers;
    const FloatImage base = to_float(gray);
    const int octaves = std::max(
        1, static_cast<int>(std::floor(std::log2(std::min(gray.width(), gray.height()) / 16.0))) +
               1);
    const Pyramid pyr = build_pyramid(base, octaves, s);

    std::vector<Keypoint> keypoints;
    const double prelim = 0.5 * cfg.contrast_threshold / s;

    for (int o = 0; o < octaves; ++o) {
        const auto& dog = pyr.dog[o];
        const int w = dog[0].w, h = dog[0].h;
        if (w < 2 * kBorder + 1 || h < 2 * kBorder + 1) break;
        for (int l = 1; l <= s; ++l) {
            const FloatImage& d0 = dog[l - 1];
            const FloatImage& d1 = dog[l];
            const FloatImage& d2 = dog[l + 1];
            for (int y = kBorder; y < h - kBorder; ++y) {
                for (int x = kBorder; x < w - kBorder; ++x) {
                    const float v = d1.at(x, y);
                    if (std::fabs(v) <= prelim) continue;

                    bool is_max = v > 0, is_min = v < 0;
                    for (int dy = -1; dy <= 1 && (is_max || is_min); ++dy) {
                        for (int dx = -1; dx <= 1; ++dx) {
                            const float a = d0.at(x + dx, y + dy);
                            const float b = d1.at(x + dx, y + dy);
                            const float c = d2.at(x + dx, y + dy);
                            if (is_max &&
                                (v < a || v < c || (v < b && !(dx == 0 && dy == 0))))
                                is_max = false;
                            if (is_min &&
                                (v > a || v > c || (v > b && !(dx == 0 && dy == 0))))
                                is_min = false;
                            if (!is_max && !is_min) break;
                        }
                    }
                    if (!is_max && !is_min) continue;

                    int layer = l, px = x, py = y;
                    double ddx = 0, ddy = 0, dds = 0, contrast = 0;
                    if (!refine_extremum(dog, s, layer, px, py, ddx, ddy, dds, contrast,
                                         cfg.contrast_threshold, cfg.edge_threshold))
                        continue;

                    const double scale_factor = std::pow(2.0, o);
                    const double sigma_oct = kSigma0 * std::pow(2.0, (layer + dds) / s);
                    Keypoint kp;
                    kp.x = (px + ddx) * scale_factor;
                    kp.y = (py + ddy) * scale_factor;
                    kp.scale = sigma_oct * scale_factor;
                    kp.response = std::fabs(contrast);
                    if (kp.x < 0 || kp.x > gray.width() - 1 || kp.y < 0 ||
                        kp.y > gray.height() - 1)
                        continue;

                    const FloatImage& gimg = pyr.gauss[o][layer];
                    for (double angle : dominant_orientations(gimg, px, py, sigma_oct)) {
                        Keypoint oriented = kp;
                        oriented.orientation = angle;
                        oriented.descriptor =
                            make_descriptor(gimg, px + ddx, py + ddy, sigma_oct, angle);
                        if (!oriented.descriptor.empty()) keypoints.push_back(std::move(oriented));
                    }
                }
            }
        }
    }

    if (keypoints.empty()) throw Error("featureless image");

    std::sort(keypoints.begin(), keypoints.end(), [](const Keypoint& a, const Keypoint& b) {
        if (a.response != b.response) return a.response > b.response;
        if (a.y != b.y) return a.y < b.y;
        if (a.x != b.x) return a.x < b.x;
        if (a.scale != b.scale) return a.scale < b.scale;
        return a.orientation < b.orientation;
    });
    if (cfg.max_keypoints > 0 && static_cast<int>(keypoints.size()) > cfg.max_keypoints)
        keypoints.resize(cfg.max_keypoints);
    return keypoints;
}

}  // namespace noteval
