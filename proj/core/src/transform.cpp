#include <noteval/transform.hpp>

#include <algorithm>
#include <cmath>

namespace noteval {

std::array<double, 9> mat3_mul(const std::array<double, 9>& a, const std::array<double, 9>& b) {
    std::array<double, 9> r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                r[i * 3 + j] += a[i * 3 + k] * b[k * 3 + j];
    return r;
}

std::array<double, 9> mat3_inverse(const std::array<double, 9>& m) {
    const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) -
                       m[1] * (m[3] * m[8] - m[5] * m[6]) +
                       m[2] * (m[3] * m[7] - m[4] * m[6]);
    if (std::abs(det) < 1e-12)
        throw Error("mat3_inverse: singular matrix");
    const double inv = 1.0 / det;
    return {(m[4] * m[8] - m[5] * m[7]) * inv, (m[2] * m[7] - m[1] * m[8]) * inv,
            (m[1] * m[5] - m[2] * m[4]) * inv, (m[5] * m[6] - m[3] * m[8]) * inv,
            (m[0] * m[8] - m[2] * m[6]) * inv, (m[2] * m[3] - m[0] * m[5]) * inv,
            (m[3] * m[7] - m[4] * m[6]) * inv, (m[1] * m[6] - m[0] * m[7]) * inv,
            (m[0] * m[4] - m[1] * m[3]) * inv};
}

std::array<double, 2> mat3_apply(const std::array<double, 9>& m, double x, double y) {
    const double w = m[6] * x + m[7] * y + m[8];
    if (std::abs(w) < 1e-12)
        throw Error("mat3_apply: point maps to infinity");
    return {(m[0] * x + m[1] * y + m[2]) / w, (m[3] * x + m[4] * y + m[5]) / w};
}

RasterImage resize_area(const RasterImage& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        throw Error("resize: output dimensions must be >= 1");
    const int w = img.width(), h = img.height(), ch = img.channels();
    RasterImage out(out_w, out_h, ch);
    const double sx = static_cast<double>(w) / out_w;
    const double sy = static_cast<double>(h) / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        const double y0 = oy * sy, y1 = (oy + 1) * sy;
        const int iy0 = static_cast<int>(std::floor(y0));
        const int iy1 = std::min(static_cast<int>(std::ceil(y1)), h);
        for (int ox = 0; ox < out_w; ++ox) {
            const double x0 = ox * sx, x1 = (ox + 1) * sx;
            const int ix0 = static_cast<int>(std::floor(x0));
            const int ix1 = std::min(static_cast<int>(std::ceil(x1)), w);
            for (int c = 0; c < ch; ++c) {
                double acc = 0.0, wsum = 0.0;
                for (int y = iy0; y < iy1; ++y) {
                    const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
                    for (int x = ix0; x < ix1; ++x) {
                        const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
                        acc += wx * wy * img.at(x, y, c);
                        wsum += wx * wy;
                    }
                }
                out.at(ox, oy, c) = clamp_u8(acc / wsum);
            }
        }
    }
    return out;
}

RasterImage resize_bilinear(const RasterImage& img, int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        throw Error("resize: output dimensions must be >= 1");
    const int w = img.width(), h = img.height(), ch = img.channels();
    if (out_w == w && out_h == h)
        return img;
    RasterImage out(out_w, out_h, ch);
    const double sx = static_cast<double>(w) / out_w;
    const double sy = static_cast<double>(h) / out_h;
    for (int oy = 0; oy < out_h; ++oy) {
        const double fy = std::clamp((oy + 0.5) * sy - 0.5, 0.0, h - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, h - 1);
        const double wy = fy - y0;
        for (int ox = 0; ox < out_w; ++ox) {
            const double fx = std::clamp((ox + 0.5) * sx - 0.5, 0.0, w - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, w - 1);
            const double wx = fx - x0;
            for (int c = 0; c < ch; ++c) {
                const double top = img.at(x0, y0, c) * (1.0 - wx) + img.at(x1, y0, c) * wx;
                const double bot = img.at(x0, y1, c) * (1.0 - wx) + img.at(x1, y1, c) * wx;
                out.at(ox, oy, c) = clamp_u8(top * (1.0 - wy) + bot * wy);
            }
        }
    }
    return out;
}

RasterImage warp_image(const RasterImage& src, const std::array<double, 9>& m_src_to_out,
                       int out_w, int out_h, std::uint8_t fill) {
    if (out_w < 1 || out_h < 1)
        throw Error("warp_image: output dimensions must be >= 1");
    const auto inv = mat3_inverse(m_src_to_out);
    const int w = src.width(), h = src.height(), ch = src.channels();
    RasterImage out(out_w, out_h, ch, fill);
    for (int oy = 0; oy < out_h; ++oy) {
        std::uint8_t* dst = out.row(oy);
        for (int ox = 0; ox < out_w; ++ox, dst += ch) {
            const double denom = inv[6] * ox + inv[7] * oy + inv[8];
            if (std::abs(denom) < 1e-12)
                continue;
            const double sx = (inv[0] * ox + inv[1] * oy + inv[2]) / denom;
            const double sy = (inv[3] * ox + inv[4] * oy + inv[5]) / denom;
            if (sx < 0.0 || sy < 0.0 || sx > w - 1.0 || sy > h - 1.0)
                continue;
            const int x0 = static_cast<int>(sx);
            const int y0 = static_cast<int>(sy);
            const int x1 = std::min(x0 + 1, w - 1);
            const int y1 = std::min(y0 + 1, h - 1);
            const double wx = sx - x0, wy = sy - y0;
            for (int c = 0; c < ch; ++c) {
                const double top = src.at(x0, y0, c) * (1.0 - wx) + src.at(x1, y0, c) * wx;
                const double bot = src.at(x0, y1, c) * (1.0 - wx) + src.at(x1, y1, c) * wx;
                dst[c] = clamp_u8(top * (1.0 - wy) + bot * wy);
            }
        }
    }
    return out;
}

BinaryMask warp_mask(const BinaryMask& src, const std::array<double, 9>& m_src_to_out,
                     int out_w, int out_h) {
    if (out_w < 1 || out_h < 1)
        throw Error("warp_mask: output dimensions must be >= 1");
    const auto inv = mat3_inverse(m_src_to_out);
    const int w = src.width(), h = src.height();
    BinaryMask out(out_w, out_h);
    for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
            const double denom = inv[6] * ox + inv[7] * oy + inv[8];
            if (std::abs(denom) < 1e-12)
                continue;
            const double sx = (inv[0] * ox + inv[1] * oy + inv[2]) / denom;
            const double sy = (inv[3] * ox + inv[4] * oy + inv[5]) / denom;
            const int ix = round_half_away(sx);
            const int iy = round_half_away(sy);
            if (ix < 0 || iy < 0 || ix >= w || iy >= h)
                continue;
            out.set(ox, oy, src.get(ix, iy));
        }
    }
    return out;
}

}  // namespace noteval
