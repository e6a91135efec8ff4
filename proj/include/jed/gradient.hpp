#pragma once

#include <cmath>
#include <stdexcept>

#include "jed/core.hpp"

namespace jed {

enum class Direction { horizontal, vertical };

// Signed forward differences of one plane along both axes.
struct GradientPair {
    ImagePlane h, v;
};

// Per-direction smoothness weights for the illumination system,
// a_d(x) = alpha / (|grad_d l_hat(x)| + eps_stab).
struct IlluminationWeights {
    ImagePlane a_h, a_v;
};

// Per-direction edge-stopping weights for the reflectance system,
// w_d(x) = 1 / (|grad_d s_luma(x)| + eps_stab).
struct ReflectanceWeights {
    ImagePlane w_h, w_v;
};

// Thresholded, amplified gradient target for the reflectance system.
struct AdjustedGradient {
    ImagePlane g_h, g_v;
};

// Forward difference out(x) = p(next along d) - p(x), replicate boundary:
// the last column (horizontal) or last row (vertical) is zero.
inline ImagePlane forward_diff(const ImagePlane& p, Direction d) {
    ImagePlane out(p.width(), p.height(), 0.0);
    if (d == Direction::horizontal) {
        for (int y = 0; y < p.height(); ++y)
            for (int x = 0; x + 1 < p.width(); ++x)
                out(x, y) = p(x + 1, y) - p(x, y);
    } else {
        for (int y = 0; y + 1 < p.height(); ++y)
            for (int x = 0; x < p.width(); ++x)
                out(x, y) = p(x, y + 1) - p(x, y);
    }
    return out;
}

// Adjoint of forward_diff: <forward_diff(p,d), q> == <p, apply_div_transpose(q,d)>
// for any planes of matching size. Realizes the transposed difference matrix
// without materializing it.
inline ImagePlane apply_div_transpose(const ImagePlane& g, Direction d) {
    ImagePlane out(g.width(), g.height(), 0.0);
    if (d == Direction::horizontal) {
        for (int y = 0; y < g.height(); ++y)
            for (int x = 0; x < g.width(); ++x) {
                double v = 0.0;
                if (x + 1 < g.width()) v -= g(x, y);
                if (x > 0) v += g(x - 1, y);
                out(x, y) = v;
            }
    } else {
        for (int y = 0; y < g.height(); ++y)
            for (int x = 0; x < g.width(); ++x) {
                double v = 0.0;
                if (y + 1 < g.height()) v -= g(x, y);
                if (y > 0) v += g(x, y - 1);
                out(x, y) = v;
            }
    }
    return out;
}

inline GradientPair gradient(const ImagePlane& p) {
    return {forward_diff(p, Direction::horizontal), forward_diff(p, Direction::vertical)};
}

inline IlluminationWeights illumination_weights(const ImagePlane& l_hat, double alpha,
                                                double eps_stab) {
    if (alpha <= 0.0) throw std::invalid_argument("illumination_weights: alpha must be > 0");
    if (eps_stab <= 0.0) throw std::invalid_argument("illumination_weights: eps_stab must be > 0");
    GradientPair grad = gradient(l_hat);
    auto weigh = [&](const ImagePlane& g) {
        ImagePlane w(g.width(), g.height());
        for (std::size_t i = 0; i < w.pixel_count(); ++i)
            w.values()[i] = alpha / (std::abs(g.values()[i]) + eps_stab);
        return w;
    };
    return {weigh(grad.h), weigh(grad.v)};
}

inline ReflectanceWeights reflectance_weights(const ImagePlane& s_luma, double eps_stab) {
    if (eps_stab <= 0.0) throw std::invalid_argument("reflectance_weights: eps_stab must be > 0");
    GradientPair grad = gradient(s_luma);
    auto weigh = [&](const ImagePlane& g) {
        ImagePlane w(g.width(), g.height());
        for (std::size_t i = 0; i < w.pixel_count(); ++i)
            w.values()[i] = 1.0 / (std::abs(g.values()[i]) + eps_stab);
        return w;
    };
    return {weigh(grad.h), weigh(grad.v)};
}

// Gradient target: zero small gradients, amplify the rest.
//   thresholded(x) = 0 where |grad(x)| < eps_thresh, grad(x) otherwise
//   g(x) = (1 + lambda * exp(-|thresholded(x)| / sigma)) * thresholded(x)
// The amplification factor lies in [1, 1+lambda] and preserves sign.
inline AdjustedGradient adjusted_gradient(const ImagePlane& s_chan, double lambda, double sigma,
                                          double eps_thresh) {
    if (lambda < 0.0) throw std::invalid_argument("adjusted_gradient: lambda must be >= 0");
    if (sigma <= 0.0) throw std::invalid_argument("adjusted_gradient: sigma must be > 0");
    if (eps_thresh < 0.0) throw std::invalid_argument("adjusted_gradient: eps_thresh must be >= 0");
    GradientPair grad = gradient(s_chan);
    auto adjust = [&](const ImagePlane& g) {
        ImagePlane out(g.width(), g.height(), 0.0);
        for (std::size_t i = 0; i < out.pixel_count(); ++i) {
            double v = g.values()[i];
            if (std::abs(v) < eps_thresh) continue;
            out.values()[i] = (1.0 + lambda * std::exp(-std::abs(v) / sigma)) * v;
        }
        return out;
    };
    return {adjust(grad.h), adjust(grad.v)};
}

}  // namespace jed
