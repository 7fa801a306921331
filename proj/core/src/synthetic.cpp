#include "aigiqa/synthetic.hpp"

#include "aigiqa/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace aigiqa {

PixelTensor random_pixel_tensor(std::uint64_t seed, int size, int block) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<float> base(0.0f, 1.0f);
    std::normal_distribution<float> fine(0.0f, 0.25f);
    PixelTensor t(3, size, size);
    const int blocks = (size + block - 1) / block;
    for (int c = 0; c < 3; ++c) {
        std::vector<float> level(static_cast<std::size_t>(blocks) * blocks);
        for (auto & v : level) v = base(rng);
        for (int y = 0; y < size; ++y) {
            for (int x = 0; x < size; ++x) {
                t.at(c, y, x) = level[static_cast<std::size_t>(y / block) * blocks + x / block] + fine(rng);
            }
        }
    }
    return t;
}

RgbImage synthetic_rgb_image(std::uint64_t seed, double quality, int width, int height) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double q = std::clamp(quality, 0.0, 1.0);
    const double fx = 1.0 + 4.0 * unit(rng);
    const double fy = 1.0 + 4.0 * unit(rng);
    const double phase = 6.283185307179586 * unit(rng);
    const double hue[3] = {unit(rng), unit(rng), unit(rng)};
    const double contrast = 0.15 + 0.8 * q;
    const double noise_sigma = 90.0 * (1.0 - q);

    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = double(x) / width;
            const double v = double(y) / height;
            const double pattern = std::sin(6.283185307179586 * (fx * u + fy * v) + phase);
            for (int c = 0; c < 3; ++c) {
                const double value = 255.0 * (0.5 + 0.5 * contrast * pattern * (0.5 + hue[c])) * (0.4 + 0.6 * q) +
                                     noise_sigma * noise(rng);
                img.at(x, y)[c] = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
            }
        }
    }
    return img;
}

DatasetManifest write_synthetic_dataset(const std::filesystem::path & dir, std::size_t count, std::uint64_t seed,
                                        const DatasetProfile & profile, int image_size) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::UnwritablePath, "cannot create '" + dir.string() + "': " + ec.message());
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool with_auth = std::find(profile.target_dims.begin(), profile.target_dims.end(), "authenticity") !=
                           profile.target_dims.end();
    const auto manifest_path = dir / "manifest.csv";
    std::ofstream out(manifest_path);
    if (!out) {
        throw Error(ErrorCode::UnwritablePath, "cannot write '" + manifest_path.string() + "'");
    }
    out << "image,mos" << (with_auth ? ",authenticity" : "") << '\n';
    const double span = profile.label_hi - profile.label_lo;
    for (std::size_t i = 0; i < count; ++i) {
        const double q = unit(rng);
        const double auth = std::clamp(q + 0.2 * (unit(rng) - 0.5), 0.0, 1.0);
        const std::string name = "img_" + std::to_string(i) + ".png";
        write_png(synthetic_rgb_image(rng(), q, image_size, image_size), dir / name);
        // three decimals, like published MOS files
        const double mos = std::round((profile.label_lo + q * span) * 1000.0) / 1000.0;
        out << name << ',' << mos;
        if (with_auth) {
            out << ',' << std::round((profile.label_lo + auth * span) * 1000.0) / 1000.0;
        }
        out << '\n';
    }
    out.close();
    return load_manifest(manifest_path, profile);
}

} // namespace aigiqa
