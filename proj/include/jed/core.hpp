#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jed {

// Encoded input could not be parsed (bad magic, truncated stream, corrupt chunk).
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input parsed but uses a bit depth / colorspace outside the 8-bit RGB scope.
class UnsupportedFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double clamp01(double v) {
    return std::clamp(v, 0.0, 1.0);
}

// Single-channel raster of real intensities, row-major. Values are expected to
// be finite everywhere; [0,1] range is only guaranteed where a producer states it
// (decoding, final clamping).
class ImagePlane {
public:
    ImagePlane(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          data_(checked_size(width, height), fill) {}

    ImagePlane(int width, int height, std::vector<double> values)
        : width_(width), height_(height), data_(std::move(values)) {
        if (data_.size() != checked_size(width, height))
            throw std::invalid_argument("ImagePlane: data length does not match dimensions");
        for (double v : data_)
            if (!std::isfinite(v))
                throw std::invalid_argument("ImagePlane: non-finite value");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return data_.size(); }

    double operator()(int x, int y) const { return data_[index(x, y)]; }
    double& operator()(int x, int y) { return data_[index(x, y)]; }

    const std::vector<double>& values() const { return data_; }
    std::vector<double>& values() { return data_; }

    bool same_size(const ImagePlane& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    static std::size_t checked_size(int width, int height) {
        if (width < 1 || height < 1)
            throw std::invalid_argument("ImagePlane: dimensions must be at least 1x1");
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<double> data_;
};

// Three planes (R,G,B) sharing dimensions.
struct ColorImage {
    ImagePlane r, g, b;

    ColorImage(ImagePlane r_, ImagePlane g_, ImagePlane b_)
        : r(std::move(r_)), g(std::move(g_)), b(std::move(b_)) {
        if (!r.same_size(g) || !r.same_size(b))
            throw std::invalid_argument("ColorImage: planes must share dimensions");
    }

    ColorImage(int width, int height, double fill = 0.0)
        : r(width, height, fill), g(width, height, fill), b(width, height, fill) {}

    int width() const { return r.width(); }
    int height() const { return r.height(); }
};

// BT.601 luma, Y = 0.299 R + 0.587 G + 0.114 B. Coefficients sum to 1, so the
// output is a convex combination of the channels.
inline ImagePlane rgb_to_luma(const ColorImage& img) {
    ImagePlane y(img.width(), img.height());
    const auto& r = img.r.values();
    const auto& g = img.g.values();
    const auto& b = img.b.values();
    auto& out = y.values();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
    return y;
}

inline ImagePlane clamp_plane(const ImagePlane& p, double lo, double hi) {
    ImagePlane out = p;
    for (double& v : out.values()) v = std::clamp(v, lo, hi);
    return out;
}

}  // namespace jed
