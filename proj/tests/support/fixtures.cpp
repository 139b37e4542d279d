#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace fixtures {

using noteval::BinaryMask;
using noteval::Mat3;
using noteval::RasterImage;
using noteval::Rng;

namespace {

void fill_rect(RasterImage& img, int x0, int y0, int x1, int y1, const std::uint8_t* color) {
    x0 = std::max(0, x0);
    y0 = std::max(0, y0);
    x1 = std::min(img.width(), x1);
    y1 = std::min(img.height(), y1);
    for (int y = y0; y < y1; ++y) {
        std::uint8_t* row = img.row(y);
        for (int x = x0; x < x1; ++x)
            for (int c = 0; c < img.channels(); ++c)
                row[x * img.channels() + c] = color[c];
    }
}

void fill_disc(RasterImage& img, int cx, int cy, int r, const std::uint8_t* color) {
    for (int y = std::max(0, cy - r); y <= std::min(img.height() - 1, cy + r); ++y) {
        std::uint8_t* row = img.row(y);
        for (int x = std::max(0, cx - r); x <= std::min(img.width() - 1, cx + r); ++x) {
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r)
                continue;
            for (int c = 0; c < img.channels(); ++c)
                row[x * img.channels() + c] = color[c];
        }
    }
}

}  // namespace

RasterImage textured(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    RasterImage img(w, h, 1, 128);
    for (int i = 0; i < 500; ++i) {
        const std::uint8_t level = static_cast<std::uint8_t>(rng.uniform_int(20, 235));
        const int cx = rng.uniform_int(0, w - 1);
        const int cy = rng.uniform_int(0, h - 1);
        const int size = rng.uniform_int(4, 40);
        if (rng.bernoulli(0.5)) {
            fill_rect(img, cx - size / 2, cy - size / 2, cx + size / 2, cy + size / 2, &level);
        } else {
            fill_disc(img, cx, cy, size / 2, &level);
        }
    }
    return img;
}

RasterImage checkerboard(int w, int h, int cell) {
    RasterImage img(w, h, 1);
    for (int y = 0; y < h; ++y) {
        std::uint8_t* row = img.row(y);
        for (int x = 0; x < w; ++x)
            row[x] = ((x / cell + y / cell) % 2) ? 220 : 30;
    }
    return img;
}

RasterImage synthetic_note(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    RasterImage img(w, h, 3, 255);  // white sheet

    const int x0 = static_cast<int>(w * kNoteMargin), x1 = w - x0;
    const int y0 = static_cast<int>(h * kNoteMargin), y1 = h - y0;

    const std::uint8_t base[3] = {168, 192, 140};   // pale banknote green
    const std::uint8_t frame[3] = {70, 102, 48};    // dark frame ink
    fill_rect(img, x0, y0, x1, y1, base);
    fill_rect(img, x0 + 4, y0 + 4, x1 - 4, y1 - 4, frame);
    fill_rect(img, x0 + 10, y0 + 10, x1 - 10, y1 - 10, base);

    // Ink palette: all strongly saturated and darker than the base.
    const std::array<std::array<std::uint8_t, 3>, 4> inks{{
        {{124, 44, 32}},   // red ochre
        {{34, 48, 110}},   // navy
        {{92, 64, 24}},    // brown
        {{36, 84, 52}},    // deep green
    }};

    // Ornament shapes scattered over the note body.
    for (int i = 0; i < 36; ++i) {
        const auto& ink = inks[rng.uniform_int(0, 3)].data();
        const int size = rng.uniform_int(8, 36);
        const int cx = rng.uniform_int(x0 + 24 + size, x1 - 24 - size);
        const int cy = rng.uniform_int(y0 + 24 + size, y1 - 24 - size);
        if (rng.bernoulli(0.5)) {
            fill_rect(img, cx - size / 2, cy - size / 2, cx + size / 2, cy + size / 2, ink);
        } else {
            fill_disc(img, cx, cy, size / 2, ink);
        }
    }

    // Glyph-like blocks: bars with gaps, one per quadrant-ish station.
    const int gw = (x1 - x0) / 8, gh = (y1 - y0) / 5;
    const std::array<std::pair<double, double>, 4> stations{
        {{0.18, 0.25}, {0.72, 0.25}, {0.18, 0.68}, {0.72, 0.68}}};
    for (const auto& [fx, fy] : stations) {
        const int gx = x0 + static_cast<int>(fx * (x1 - x0));
        const int gy = y0 + static_cast<int>(fy * (y1 - y0));
        const auto& ink = inks[rng.uniform_int(0, 3)].data();
        fill_rect(img, gx, gy, gx + gw, gy + gh, ink);
        fill_rect(img, gx + gw / 4, gy + gh / 4, gx + gw / 4 + gw / 6, gy + 3 * gh / 4, base);
        fill_rect(img, gx + 2 * gw / 3, gy + gh / 3, gx + 2 * gw / 3 + gw / 6, gy + gh, base);
    }

    // Mild per-pixel noise on the note body keeps the detector well fed.
    for (int y = y0; y < y1; ++y) {
        std::uint8_t* row = img.row(y);
        for (int x = x0; x < x1; ++x) {
            const int jitter = rng.uniform_int(-7, 7);
            for (int c = 0; c < 3; ++c)
                row[x * 3 + c] = noteval::clamp_u8(row[x * 3 + c] + jitter);
        }
    }
    return img;
}

CutResult cut_note(const RasterImage& note, const BinaryMask& foreground, double target_fraction,
                   std::uint64_t seed) {
    Rng rng(seed);
    CutResult res{note, 0.0, 0};
    const int w = note.width(), h = note.height();

    // Stay well inside the note so mask morphology cannot touch the cuts.
    const int inset = 18;
    const int nx0 = static_cast<int>(w * kNoteMargin) + inset;
    const int nx1 = w - static_cast<int>(w * kNoteMargin) - inset;
    const int ny0 = static_cast<int>(h * kNoteMargin) + inset;
    const int ny1 = h - static_cast<int>(h * kNoteMargin) - inset;

    const long fg_total = foreground.count();
    BinaryMask painted(w, h);
    const std::uint8_t white[3] = {255, 255, 255};
    const int pieces = target_fraction < 0.04 ? 1 : (target_fraction < 0.15 ? 2 : 3);
    const double per_piece_area = target_fraction * static_cast<double>(fg_total) / pieces;

    for (int p = 0; p < pieces; ++p) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            const double aspect = rng.uniform(0.5, 2.0);
            int cw = std::max(14, static_cast<int>(std::lround(std::sqrt(per_piece_area * aspect))));
            int ch = std::max(14, static_cast<int>(std::lround(per_piece_area / cw)));
            cw = std::min(cw, nx1 - nx0 - 1);
            ch = std::min(ch, ny1 - ny0 - 1);
            const int rx = rng.uniform_int(nx0, nx1 - cw);
            const int ry = rng.uniform_int(ny0, ny1 - ch);

            // Keep pieces separated so they stay distinct damage zones.
            bool clash = false;
            for (int y = std::max(0, ry - 8); y < std::min(h, ry + ch + 8) && !clash; ++y)
                for (int x = std::max(0, rx - 8); x < std::min(w, rx + cw + 8); ++x)
                    if (painted.get(x, y)) {
                        clash = true;
                        break;
                    }
            if (clash && attempt < 63)
                continue;

            fill_rect(res.image, rx, ry, rx + cw, ry + ch, white);
            for (int y = ry; y < ry + ch; ++y)
                for (int x = rx; x < rx + cw; ++x)
                    painted.set(x, y);
            ++res.pieces;
            break;
        }
    }

    long removed = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (painted.get(x, y) && foreground.get(x, y))
                ++removed;
    res.fraction = static_cast<double>(removed) / static_cast<double>(fg_total);
    return res;
}

Mat3 random_homography(int w, int h, int out_w, int out_h, Rng& rng, double max_rot_deg,
                       double scale_lo, double scale_hi, double trans_frac, double perspective) {
    const double theta = rng.uniform(-max_rot_deg, max_rot_deg) * std::numbers::pi / 180.0;
    const double s = rng.uniform(scale_lo, scale_hi);
    const double tx = rng.uniform(-trans_frac, trans_frac) * out_w;
    const double ty = rng.uniform(-trans_frac, trans_frac) * out_h;
    const double g = rng.uniform(-perspective, perspective);
    const double p = rng.uniform(-perspective, perspective);

    const double c = std::cos(theta) * s, sn = std::sin(theta) * s;
    const Mat3 rs{c, -sn, 0, sn, c, 0, g, p, 1};
    const Mat3 to_center{1, 0, -w / 2.0, 0, 1, -h / 2.0, 0, 0, 1};
    const Mat3 from_center{1, 0, out_w / 2.0 + tx, 0, 1, out_h / 2.0 + ty, 0, 0, 1};
    return noteval::mat3_mul(from_center, noteval::mat3_mul(rs, to_center));
}

}  // namespace fixtures
