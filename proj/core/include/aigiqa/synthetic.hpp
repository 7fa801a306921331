#pragma once

#include "aigiqa/dataset.hpp"
#include "aigiqa/image.hpp"
#include "aigiqa/types.hpp"

#include <cstdint>
#include <filesystem>

namespace aigiqa {

/// Random image already in normalized backbone space, with per-patch
/// structure so distinct seeds give distinct stub features.
PixelTensor random_pixel_tensor(std::uint64_t seed, int size = 224, int block = 16);

/// Procedural test card whose contrast and noise level track `quality`
/// in [0, 1].
RgbImage synthetic_rgb_image(std::uint64_t seed, double quality, int width, int height);

/// Writes `count` PNG images plus `manifest.csv` into `dir` and returns the
/// loaded manifest. MOS is derived from each image's quality knob over the
/// profile's label range; profiles with an authenticity dimension also get
/// an authenticity column.
DatasetManifest write_synthetic_dataset(const std::filesystem::path & dir, std::size_t count, std::uint64_t seed,
                                        const DatasetProfile & profile, int image_size = 96);

} // namespace aigiqa
