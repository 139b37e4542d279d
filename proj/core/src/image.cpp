#include <noteval/image.hpp>

namespace noteval {

namespace {

void require_same_shape(const BinaryMask& a, const BinaryMask& b) {
    if (!a.same_shape(b))
        throw Error("mask operation: dimensions differ");
}

}  // namespace

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    BinaryMask out(a.width(), a.height());
    const std::size_t n = static_cast<std::size_t>(a.width()) * a.height();
    for (std::size_t i = 0; i < n; ++i)
        out.data()[i] = a.data()[i] & b.data()[i];
    return out;
}

BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    BinaryMask out(a.width(), a.height());
    const std::size_t n = static_cast<std::size_t>(a.width()) * a.height();
    for (std::size_t i = 0; i < n; ++i)
        out.data()[i] = a.data()[i] | b.data()[i];
    return out;
}

BinaryMask mask_not(const BinaryMask& a) {
    BinaryMask out(a.width(), a.height());
    const std::size_t n = static_cast<std::size_t>(a.width()) * a.height();
    for (std::size_t i = 0; i < n; ++i)
        out.data()[i] = a.data()[i] ? 0 : 1;
    return out;
}

BinaryMask mask_diff(const BinaryMask& a, const BinaryMask& b) {
    require_same_shape(a, b);
    BinaryMask out(a.width(), a.height());
    const std::size_t n = static_cast<std::size_t>(a.width()) * a.height();
    for (std::size_t i = 0; i < n; ++i)
        out.data()[i] = (a.data()[i] && !b.data()[i]) ? 1 : 0;
    return out;
}

}  // namespace noteval
