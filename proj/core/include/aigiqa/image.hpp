#pragma once

#include "aigiqa/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace aigiqa {

/// 8-bit interleaved RGB image.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // height * width * 3

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t * at(int x, int y) { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
    const std::uint8_t * at(int x, int y) const { return pixels.data() + (static_cast<std::size_t>(y) * width + x) * 3; }
};

/// Canonical backbone input transform. Defaults are the published CLIP
/// channel statistics at 224 px.
struct PreprocessSpec {
    int size = 224;
    std::array<float, 3> mean{0.48145466f, 0.4578275f, 0.40821073f};
    std::array<float, 3> stddev{0.26862954f, 0.26130258f, 0.27577711f};
};

/// Decodes PNG/JPEG/BMP/... to RGB. Grayscale is replicated to three
/// channels, alpha is dropped, 16-bit input is scaled to 8 bits.
RgbImage decode_image(const std::filesystem::path & path);

/// Resize shorter side to spec.size (bicubic), center-crop spec.size^2,
/// scale to [0, 1], normalize per channel.
PixelTensor preprocess(const RgbImage & image, const PreprocessSpec & spec = {});

PixelTensor preprocess_image(const std::filesystem::path & path, const PreprocessSpec & spec = {});

void write_png(const RgbImage & image, const std::filesystem::path & path);

} // namespace aigiqa
