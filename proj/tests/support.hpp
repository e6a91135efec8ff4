#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "jed/analysis.hpp"
#include "jed/core.hpp"
#include "jed/gradient.hpp"
#include "jed/params.hpp"
#include "jed/solver.hpp"

namespace testsup {

// mt19937_64 output mapped to doubles by hand so sequences are identical on
// every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian(double mean, double stddev) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        double u2 = uniform();
        constexpr double two_pi = 6.283185307179586476925286766559;
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = two_pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return mean + stddev * radius * std::cos(angle);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

inline jed::ImagePlane random_plane(Rng& rng, int width, int height, double lo = 0.0,
                                    double hi = 1.0) {
    jed::ImagePlane p(width, height);
    for (double& v : p.values()) v = rng.uniform(lo, hi);
    return p;
}

inline jed::ColorImage random_image(Rng& rng, int width, int height) {
    return jed::ColorImage(random_plane(rng, width, height), random_plane(rng, width, height),
                           random_plane(rng, width, height));
}

inline double dot(const jed::ImagePlane& a, const jed::ImagePlane& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.pixel_count(); ++i) s += a.values()[i] * b.values()[i];
    return s;
}

inline double max_abs_diff(const jed::ImagePlane& a, const jed::ImagePlane& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.pixel_count(); ++i)
        m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
    return m;
}

inline Eigen::MatrixXd to_eigen(const jed::DenseMatrix& m) {
    Eigen::MatrixXd out(m.n, m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) out(i, j) = m.at(i, j);
    return out;
}

inline Eigen::VectorXd to_eigen(const jed::ImagePlane& p) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(p.pixel_count()));
    for (std::size_t i = 0; i < p.pixel_count(); ++i) v(static_cast<Eigen::Index>(i)) = p.values()[i];
    return v;
}

inline jed::ImagePlane from_eigen(const Eigen::VectorXd& v, int width, int height) {
    jed::ImagePlane p(width, height);
    for (std::size_t i = 0; i < p.pixel_count(); ++i) p.values()[i] = v(static_cast<Eigen::Index>(i));
    return p;
}

// Independent reference solve: explicit assembly + LU factorization.
inline jed::ImagePlane dense_reference_solve(const jed::WeightedLaplacianOperator& op,
                                             const jed::ImagePlane& rhs) {
    Eigen::MatrixXd a = to_eigen(jed::assemble_dense(op));
    Eigen::VectorXd x = a.partialPivLu().solve(to_eigen(rhs));
    return from_eigen(x, rhs.width(), rhs.height());
}

// Quadratic objective behind the illumination stage:
//   ||L - l_hat||_F^2 + sum_d sum_x a_d(x) (grad_d L(x))^2
inline double illumination_objective(const jed::ImagePlane& candidate,
                                     const jed::ImagePlane& l_hat,
                                     const jed::IlluminationWeights& a) {
    double obj = 0.0;
    for (std::size_t i = 0; i < candidate.pixel_count(); ++i) {
        double d = candidate.values()[i] - l_hat.values()[i];
        obj += d * d;
    }
    jed::ImagePlane gh = jed::forward_diff(candidate, jed::Direction::horizontal);
    jed::ImagePlane gv = jed::forward_diff(candidate, jed::Direction::vertical);
    for (std::size_t i = 0; i < gh.pixel_count(); ++i) {
        obj += a.a_h.values()[i] * gh.values()[i] * gh.values()[i];
        obj += a.a_v.values()[i] * gv.values()[i] * gv.values()[i];
    }
    return obj;
}

// Quadratic objective behind one reflectance channel, with the printed
// Diag(w_d) quadratic form:
//   ||R - s/l||_F^2 + beta sum w_d (grad_d R)^2 + omega ||grad R - g||_F^2
inline double reflectance_objective(const jed::ImagePlane& candidate,
                                    const jed::ImagePlane& s_over_l,
                                    const jed::ReflectanceWeights& w,
                                    const jed::AdjustedGradient& g, double beta, double omega) {
    double obj = 0.0;
    for (std::size_t i = 0; i < candidate.pixel_count(); ++i) {
        double d = candidate.values()[i] - s_over_l.values()[i];
        obj += d * d;
    }
    jed::ImagePlane gh = jed::forward_diff(candidate, jed::Direction::horizontal);
    jed::ImagePlane gv = jed::forward_diff(candidate, jed::Direction::vertical);
    for (std::size_t i = 0; i < gh.pixel_count(); ++i) {
        obj += beta * w.w_h.values()[i] * gh.values()[i] * gh.values()[i];
        obj += beta * w.w_v.values()[i] * gv.values()[i] * gv.values()[i];
        double dh = gh.values()[i] - g.g_h.values()[i];
        double dv = gv.values()[i] - g.g_v.values()[i];
        obj += omega * (dh * dh + dv * dv);
    }
    return obj;
}

// Central finite-difference gradient of a scalar function over plane entries.
template <typename F>
jed::ImagePlane fd_gradient(const jed::ImagePlane& at, F objective, double step = 1e-6) {
    jed::ImagePlane grad(at.width(), at.height());
    jed::ImagePlane probe = at;
    for (std::size_t i = 0; i < at.pixel_count(); ++i) {
        double orig = probe.values()[i];
        probe.values()[i] = orig + step;
        double up = objective(probe);
        probe.values()[i] = orig - step;
        double down = objective(probe);
        probe.values()[i] = orig;
        grad.values()[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

// Fixed-seed 64x64 dark test scene: piecewise-constant clean image, darkened
// to 20% and perturbed by Gaussian noise. The clean image carries a strong
// vertical edge at x=32 and uniform regions for noise measurement.
struct DarkScene {
    jed::ColorImage clean;
    jed::ColorImage dark;
    int edge_x = 32;
    double clean_edge_magnitude;
    jed::ImagePlane clean_luma;

    static constexpr double kDarkFactor = 0.2;
    static constexpr double kNoiseStd = 0.02;

    DarkScene() : clean(make_clean()), dark(make_dark(clean)), clean_luma(jed::rgb_to_luma(clean)) {
        clean_edge_magnitude = std::abs(clean_luma(edge_x, 0) - clean_luma(edge_x - 1, 0));
    }

    static jed::ColorImage make_clean() {
        int n = 64;
        jed::ColorImage img(n, n);
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                double v = x < 32 ? 0.06 : 0.40;
                img.r(x, y) = v;
                img.g(x, y) = v;
                img.b(x, y) = v;
            }
        return img;
    }

    static jed::ColorImage make_dark(const jed::ColorImage& clean) {
        Rng rng(20260809u);
        jed::ColorImage img = clean;
        for (jed::ImagePlane* p : {&img.r, &img.g, &img.b})
            for (double& v : p->values())
                v = jed::clamp01(v * kDarkFactor + rng.gaussian(0.0, kNoiseStd));
        return img;
    }

    // Uniform region well inside the bright half.
    jed::PatchRect flat_patch() const { return jed::PatchRect{40, 16, 16, 16}; }
};

}  // namespace testsup
