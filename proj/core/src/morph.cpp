#include <noteval/morph.hpp>

#include <algorithm>
#include <utility>

namespace noteval {

namespace {

std::vector<std::pair<int, int>> disc_offsets(int radius) {
    std::vector<std::pair<int, int>> offs;
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx)
            if (dx * dx + dy * dy <= radius * radius)
                offs.emplace_back(dx, dy);
    return offs;
}

// erode_mode: output set iff every covered pixel is set; otherwise dilate.
BinaryMask apply_disc(const BinaryMask& mask, int radius, bool erode_mode) {
    if (radius < 1)
        throw Error("morphology: radius must be >= 1");
    const auto offs = disc_offsets(radius);
    const int w = mask.width(), h = mask.height();
    BinaryMask out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool acc = erode_mode;
            for (const auto& [dx, dy] : offs) {
                const int sx = std::clamp(x + dx, 0, w - 1);
                const int sy = std::clamp(y + dy, 0, h - 1);
                const bool v = mask.get(sx, sy);
                if (erode_mode) {
                    if (!v) { acc = false; break; }
                } else {
                    if (v) { acc = true; break; }
                }
            }
            out.set(x, y, acc);
        }
    }
    return out;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, int radius) { return apply_disc(mask, radius, true); }

BinaryMask dilate(const BinaryMask& mask, int radius) { return apply_disc(mask, radius, false); }

BinaryMask morph_open(const BinaryMask& mask, int radius) {
    return dilate(erode(mask, radius), radius);
}

BinaryMask morph_close(const BinaryMask& mask, int radius) {
    return erode(dilate(mask, radius), radius);
}

BinaryMask morph_open_close(const BinaryMask& mask, int radius) {
    return morph_close(morph_open(mask, radius), radius);
}

namespace {

// Labels set pixels with 8-connectivity; label 0 means background.
// Returns the number of components found (labels 1..n).
int label_components(const BinaryMask& mask, std::vector<std::int32_t>& labels,
                     std::vector<long>& areas) {
    const int w = mask.width(), h = mask.height();
    labels.assign(static_cast<std::size_t>(w) * h, 0);
    areas.clear();
    std::vector<std::pair<int, int>> stack;
    int next = 0;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            if (!mask.get(x0, y0) || labels[static_cast<std::size_t>(y0) * w + x0] != 0)
                continue;
            ++next;
            long area = 0;
            stack.emplace_back(x0, y0);
            labels[static_cast<std::size_t>(y0) * w + x0] = next;
            while (!stack.empty()) {
                const auto [x, y] = stack.back();
                stack.pop_back();
                ++area;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0) continue;
                        const int nx = x + dx, ny = y + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                        const std::size_t ni = static_cast<std::size_t>(ny) * w + nx;
                        if (mask.get(nx, ny) && labels[ni] == 0) {
                            labels[ni] = next;
                            stack.emplace_back(nx, ny);
                        }
                    }
                }
            }
            areas.push_back(area);
        }
    }
    return next;
}

}  // namespace

ComponentSet connected_components(const BinaryMask& mask, long min_area) {
    if (min_area < 0)
        throw Error("connected_components: min_area must be >= 0");
    std::vector<std::int32_t> labels;
    std::vector<long> areas;
    const int n = label_components(mask, labels, areas);
    const int w = mask.width(), h = mask.height();

    // Map retained labels to output slots, preserving scan order.
    std::vector<int> slot(n + 1, -1);
    ComponentSet out;
    for (int l = 1; l <= n; ++l) {
        if (areas[l - 1] >= min_area) {
            slot[l] = out.count++;
            out.components.push_back({BinaryMask(w, h), areas[l - 1]});
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int32_t l = labels[static_cast<std::size_t>(y) * w + x];
            if (l != 0 && slot[l] >= 0)
                out.components[slot[l]].mask.set(x, y);
        }
    }
    return out;
}

int connected_component_count(const BinaryMask& mask, long min_area) {
    if (min_area < 0)
        throw Error("connected_components: min_area must be >= 0");
    std::vector<std::int32_t> labels;
    std::vector<long> areas;
    label_components(mask, labels, areas);
    int count = 0;
    for (long a : areas)
        if (a >= min_area) ++count;
    return count;
}

}  // namespace noteval
