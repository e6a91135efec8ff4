#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "jed/core.hpp"
#include "jed/image_io.hpp"

namespace jed {

struct PatchRect {
    int x = 0, y = 0, width = 0, height = 0;
};

// Global per-channel histogram equalization on 256 bins: every value maps
// through the inclusive empirical CDF of its quantized channel, so the top
// occupied bin lands exactly on 1.
inline ColorImage histogram_equalize(const ColorImage& img) {
    auto equalize = [](const ImagePlane& p) {
        std::array<std::size_t, 256> hist{};
        for (double v : p.values()) ++hist[quantize_byte(v)];
        std::array<double, 256> cdf{};
        std::size_t running = 0;
        double total = static_cast<double>(p.pixel_count());
        for (int i = 0; i < 256; ++i) {
            running += hist[i];
            cdf[i] = static_cast<double>(running) / total;
        }
        ImagePlane out(p.width(), p.height());
        for (std::size_t i = 0; i < p.pixel_count(); ++i)
            out.values()[i] = cdf[quantize_byte(p.values()[i])];
        return out;
    };
    return ColorImage(equalize(img.r), equalize(img.g), equalize(img.b));
}

inline double mean_luma(const ColorImage& img) {
    ImagePlane y = rgb_to_luma(img);
    double s = 0.0;
    for (double v : y.values()) s += v;
    return s / static_cast<double>(y.pixel_count());
}

// Population standard deviation of luma over the given patch; the proxy for
// residual noise in a known-uniform region.
inline double flat_patch_noise_std(const ColorImage& img, const PatchRect& patch) {
    if (patch.x < 0 || patch.y < 0 || patch.width < 1 || patch.height < 1 ||
        patch.x + patch.width > img.width() || patch.y + patch.height > img.height())
        throw std::out_of_range("flat_patch_noise_std: patch out of bounds");
    if (static_cast<long>(patch.width) * patch.height < 4)
        throw std::invalid_argument("flat_patch_noise_std: patch area must be >= 4");

    ImagePlane y = rgb_to_luma(img);
    double n = static_cast<double>(patch.width) * patch.height;
    double sum = 0.0, lo = y(patch.x, patch.y), hi = lo;
    for (int py = patch.y; py < patch.y + patch.height; ++py)
        for (int px = patch.x; px < patch.x + patch.width; ++px) {
            double v = y(px, py);
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    if (lo == hi) return 0.0;
    double mean = sum / n;
    // Two-pass form: exact zero on constant patches.
    double sq = 0.0;
    for (int py = patch.y; py < patch.y + patch.height; ++py)
        for (int px = patch.x; px < patch.x + patch.width; ++px) {
            double d = y(px, py) - mean;
            sq += d * d;
        }
    return std::sqrt(sq / n);
}

// Scans 16x16 windows (stride 8) for the most uniform luma patch of the image;
// used to pick the measurement region for run reports. Returns nothing when the
// image is too small for a >= 4 pixel patch.
inline std::optional<PatchRect> find_flat_patch(const ColorImage& img, int size = 16) {
    int pw = std::min(size, img.width());
    int ph = std::min(size, img.height());
    if (static_cast<long>(pw) * ph < 4) return std::nullopt;

    int stride = std::max(1, size / 2);
    std::optional<PatchRect> best;
    double best_std = 0.0;
    for (int y = 0; y + ph <= img.height(); y += stride)
        for (int x = 0; x + pw <= img.width(); x += stride) {
            PatchRect rect{x, y, pw, ph};
            double s = flat_patch_noise_std(img, rect);
            if (!best || s < best_std) {
                best = rect;
                best_std = s;
            }
        }
    return best;
}

}  // namespace jed
