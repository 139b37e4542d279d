#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace noteval {

/// Error type thrown by every operation in the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Rounds half away from zero and clamps to the 8-bit range.
inline std::uint8_t clamp_u8(double v) {
    if (v <= 0.0) return 0;
    if (v >= 255.0) return 255;
    return static_cast<std::uint8_t>(v + 0.5);
}

inline int round_half_away(double v) {
    return static_cast<int>(v < 0.0 ? v - 0.5 : v + 0.5);
}

/// 8-bit-per-sample raster, row-major, channels interleaved.
/// channels == 1 is grayscale, channels == 3 is RGB.
class RasterImage {
public:
    RasterImage() = default;

    RasterImage(int width, int height, int channels, std::uint8_t fill = 0)
        : width_(width), height_(height), channels_(channels),
          data_(check_shape(width, height, channels), fill) {}

    RasterImage(int width, int height, int channels, std::vector<std::uint8_t> data)
        : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
        if (data_.size() != check_shape(width, height, channels))
            throw Error("RasterImage: data length does not match width*height*channels");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    bool empty() const { return data_.empty(); }

    std::size_t sample_count() const { return data_.size(); }
    std::uint8_t* data() { return data_.data(); }
    const std::uint8_t* data() const { return data_.data(); }

    std::uint8_t* row(int y) {
        return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
    }
    const std::uint8_t* row(int y) const {
        return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
    }

    std::uint8_t& at(int x, int y, int c = 0) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
    }

    bool same_shape(const RasterImage& o) const {
        return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
    }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;

private:
    static std::size_t check_shape(int w, int h, int c) {
        if (w < 1 || h < 1)
            throw Error("RasterImage: width and height must be >= 1");
        if (c != 1 && c != 3)
            throw Error("RasterImage: channels must be 1 or 3");
        return static_cast<std::size_t>(w) * h * c;
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<std::uint8_t> data_;
};

/// Per-pixel boolean mask aligned to a RasterImage. One byte per pixel, 0 or 1.
class BinaryMask {
public:
    BinaryMask() = default;

    BinaryMask(int width, int height, bool fill = false)
        : width_(width), height_(height),
          bits_(check_shape(width, height), fill ? 1 : 0) {}

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return bits_.empty(); }

    bool get(int x, int y) const {
        return bits_[static_cast<std::size_t>(y) * width_ + x] != 0;
    }
    void set(int x, int y, bool v = true) {
        bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0;
    }

    std::uint8_t* data() { return bits_.data(); }
    const std::uint8_t* data() const { return bits_.data(); }
    std::uint8_t* row(int y) { return bits_.data() + static_cast<std::size_t>(y) * width_; }
    const std::uint8_t* row(int y) const {
        return bits_.data() + static_cast<std::size_t>(y) * width_;
    }

    /// Number of set pixels.
    long count() const {
        long n = 0;
        for (std::uint8_t b : bits_) n += b;
        return n;
    }

    bool same_shape(const BinaryMask& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    static std::size_t check_shape(int w, int h) {
        if (w < 1 || h < 1)
            throw Error("BinaryMask: width and height must be >= 1");
        return static_cast<std::size_t>(w) * h;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_or(const BinaryMask& a, const BinaryMask& b);
BinaryMask mask_not(const BinaryMask& a);
/// a AND NOT b
BinaryMask mask_diff(const BinaryMask& a, const BinaryMask& b);

}  // namespace noteval
