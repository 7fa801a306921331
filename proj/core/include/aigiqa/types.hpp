#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace aigiqa {

using Vector = Eigen::VectorXd;
// Row-major so that row k of a feature matrix is one contiguous d-vector.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Preprocessed image in planar CHW layout, already normalized with the
/// backbone channel statistics.
struct PixelTensor {
    int channels = 3;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    PixelTensor() = default;
    PixelTensor(int c, int h, int w) : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, 0.0f) {}

    float & at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    float at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }

    bool operator==(const PixelTensor &) const = default;
};

inline bool all_finite(const Vector & v) { return v.allFinite(); }
inline bool all_finite(const Matrix & m) { return m.allFinite(); }

} // namespace aigiqa
