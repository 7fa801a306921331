#include "aigiqa/image.hpp"

#include "aigiqa/error.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <cmath>
#include <cstring>

namespace aigiqa {

RgbImage decode_image(const std::filesystem::path & path) {
    cv::Mat raw;
    try {
        raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    } catch (const cv::Exception & e) {
        throw Error(ErrorCode::DecodeFailure, "cannot decode '" + path.string() + "': " + e.what());
    }
    if (raw.empty()) {
        throw Error(ErrorCode::DecodeFailure, "cannot decode '" + path.string() + "'");
    }
    if (raw.depth() == CV_16U) {
        raw.convertTo(raw, CV_8U, 1.0 / 257.0);
    } else if (raw.depth() != CV_8U) {
        throw Error(ErrorCode::DecodeFailure, "unsupported pixel depth in '" + path.string() + "'");
    }
    cv::Mat rgb;
    switch (raw.channels()) {
        case 1: cv::cvtColor(raw, rgb, cv::COLOR_GRAY2RGB); break;
        case 3: cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB); break;
        case 4: cv::cvtColor(raw, rgb, cv::COLOR_BGRA2RGB); break;
        default: throw Error(ErrorCode::DecodeFailure, "unsupported channel count in '" + path.string() + "'");
    }
    RgbImage out(rgb.cols, rgb.rows);
    for (int y = 0; y < rgb.rows; ++y) {
        std::memcpy(out.at(0, y), rgb.ptr<std::uint8_t>(y), static_cast<std::size_t>(rgb.cols) * 3);
    }
    return out;
}

PixelTensor preprocess(const RgbImage & image, const PreprocessSpec & spec) {
    if (image.width <= 0 || image.height <= 0) {
        throw Error(ErrorCode::DecodeFailure, "empty image");
    }
    const cv::Mat src(image.height, image.width, CV_8UC3, const_cast<std::uint8_t *>(image.pixels.data()));
    const double scale = double(spec.size) / double(std::min(image.width, image.height));
    int w = image.width <= image.height ? spec.size : static_cast<int>(std::lround(image.width * scale));
    int h = image.height < image.width ? spec.size : static_cast<int>(std::lround(image.height * scale));
    w = std::max(w, spec.size);
    h = std::max(h, spec.size);
    cv::Mat resized;
    if (w == image.width && h == image.height) {
        resized = src;
    } else {
        cv::resize(src, resized, cv::Size(w, h), 0, 0, cv::INTER_CUBIC);
    }
    const int x0 = (w - spec.size) / 2;
    const int y0 = (h - spec.size) / 2;

    PixelTensor t(3, spec.size, spec.size);
    for (int y = 0; y < spec.size; ++y) {
        const auto * row = resized.ptr<std::uint8_t>(y0 + y) + static_cast<std::size_t>(x0) * 3;
        for (int x = 0; x < spec.size; ++x) {
            for (int c = 0; c < 3; ++c) {
                const float v = float(row[x * 3 + c]) / 255.0f;
                t.at(c, y, x) = (v - spec.mean[c]) / spec.stddev[c];
            }
        }
    }
    return t;
}

PixelTensor preprocess_image(const std::filesystem::path & path, const PreprocessSpec & spec) {
    return preprocess(decode_image(path), spec);
}

void write_png(const RgbImage & image, const std::filesystem::path & path) {
    const cv::Mat rgb(image.height, image.width, CV_8UC3, const_cast<std::uint8_t *>(image.pixels.data()));
    cv::Mat bgr;
    cv::cvtColor(rgb, bgr, cv::COLOR_RGB2BGR);
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), bgr);
    } catch (const cv::Exception &) {
        ok = false;
    }
    if (!ok) {
        throw Error(ErrorCode::UnwritablePath, "cannot write image '" + path.string() + "'");
    }
}

} // namespace aigiqa
