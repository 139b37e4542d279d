#include <noteval/damage.hpp>

#include <noteval/color.hpp>
#include <noteval/morph.hpp>

namespace noteval {

void BackgroundConfig::validate() const {
    if (saturation_threshold < 0 || saturation_threshold > 255)
        throw Error("background: saturation threshold out of [0, 255]");
    if (morph_radius < 0) throw Error("background: morph radius must be non-negative");
}

MaskedImage remove_background(const RasterImage& img, const BackgroundConfig& cfg) {
    cfg.validate();
    if (img.channels() != 3) throw Error("remove_background: expected a 3-channel image");

    const RasterImage hsv = rgb_to_hsv(img);
    BinaryMask mask(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        const std::uint8_t* src = hsv.row(y);
        std::uint8_t* dst = mask.row(y);
        for (int x = 0; x < img.width(); ++x)
            dst[x] = src[x * 3 + 1] > cfg.saturation_threshold ? 1 : 0;
    }

    if (cfg.morph_radius > 0) mask = morph_open_close(mask, cfg.morph_radius);
    if (mask.count() == 0) throw Error("no note detected");

    MaskedImage out{img, std::move(mask)};
    for (int y = 0; y < img.height(); ++y) {
        const std::uint8_t* m = out.mask.row(y);
        std::uint8_t* px = out.image.row(y);
        for (int x = 0; x < img.width(); ++x) {
            if (!m[x]) {
                px[x * 3] = 255;
                px[x * 3 + 1] = 255;
                px[x * 3 + 2] = 255;
            }
        }
    }
    return out;
}

}  // namespace noteval
