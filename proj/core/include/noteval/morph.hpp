#pragma once

#include <noteval/image.hpp>

namespace noteval {

/// Binary erosion/dilation with a disc structuring element of the given radius
/// (offsets with dx*dx + dy*dy <= radius*radius). Out-of-bounds reads replicate
/// the nearest edge pixel.
BinaryMask erode(const BinaryMask& mask, int radius);
BinaryMask dilate(const BinaryMask& mask, int radius);

BinaryMask morph_open(const BinaryMask& mask, int radius);
BinaryMask morph_close(const BinaryMask& mask, int radius);

/// Opening followed by closing, the small-artifact cleanup used on foreground masks.
BinaryMask morph_open_close(const BinaryMask& mask, int radius);

struct Component {
    BinaryMask mask;
    long area = 0;
};

struct ComponentSet {
    std::vector<Component> components;  // scan order of each component's first pixel
    int count = 0;
};

/// 8-connectivity labeling. Components with area < min_area are discarded.
ComponentSet connected_components(const BinaryMask& mask, long min_area = 0);

/// Count-only variant; avoids materializing per-component masks.
int connected_component_count(const BinaryMask& mask, long min_area = 0);

}  // namespace noteval
