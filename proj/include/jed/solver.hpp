#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "jed/core.hpp"
#include "jed/gradient.hpp"

namespace jed {

struct SolveReport {
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

// v -> c*v + sum_d D_d^T Diag(weights_d) D_d v, applied matrix-free.
// With c > 0 and nonnegative weights the operator is symmetric positive
// definite; constants are eigenvectors with eigenvalue exactly c.
class WeightedLaplacianOperator {
public:
    WeightedLaplacianOperator(ImagePlane weights_h, ImagePlane weights_v, double identity_coeff)
        : weights_h_(std::move(weights_h)),
          weights_v_(std::move(weights_v)),
          identity_coeff_(identity_coeff) {
        if (!weights_h_.same_size(weights_v_))
            throw std::invalid_argument("WeightedLaplacianOperator: weight planes must match");
        if (identity_coeff_ <= 0.0)
            throw std::invalid_argument("WeightedLaplacianOperator: identity coefficient must be > 0");
        for (const auto* w : {&weights_h_, &weights_v_})
            for (double v : w->values())
                if (v < 0.0 || !std::isfinite(v))
                    throw std::invalid_argument("WeightedLaplacianOperator: weights must be >= 0");
    }

    int width() const { return weights_h_.width(); }
    int height() const { return weights_h_.height(); }
    double identity_coeff() const { return identity_coeff_; }
    const ImagePlane& weights(Direction d) const {
        return d == Direction::horizontal ? weights_h_ : weights_v_;
    }

    ImagePlane apply(const ImagePlane& x) const {
        if (x.width() != width() || x.height() != height())
            throw std::invalid_argument("WeightedLaplacianOperator::apply: shape mismatch");
        ImagePlane out(width(), height());
        for (std::size_t i = 0; i < out.pixel_count(); ++i)
            out.values()[i] = identity_coeff_ * x.values()[i];
        for (Direction d : {Direction::horizontal, Direction::vertical}) {
            ImagePlane t = forward_diff(x, d);
            const auto& w = weights(d).values();
            for (std::size_t i = 0; i < t.pixel_count(); ++i) t.values()[i] *= w[i];
            ImagePlane back = apply_div_transpose(t, d);
            for (std::size_t i = 0; i < out.pixel_count(); ++i)
                out.values()[i] += back.values()[i];
        }
        return out;
    }

    // Closed-form diagonal of the operator; feeds the Jacobi preconditioner.
    // Pixel (x,y) appears in row (x,y) of D_d with coefficient -1 (unless on the
    // far boundary) and in the preceding row with +1.
    ImagePlane diagonal() const {
        ImagePlane diag(width(), height(), identity_coeff_);
        for (int y = 0; y < height(); ++y)
            for (int x = 0; x < width(); ++x) {
                double v = 0.0;
                if (x + 1 < width()) v += weights_h_(x, y);
                if (x > 0) v += weights_h_(x - 1, y);
                if (y + 1 < height()) v += weights_v_(x, y);
                if (y > 0) v += weights_v_(x, y - 1);
                diag(x, y) += v;
            }
        return diag;
    }

private:
    ImagePlane weights_h_;
    ImagePlane weights_v_;
    double identity_coeff_;
};

namespace detail {

inline double dot(const ImagePlane& a, const ImagePlane& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.pixel_count(); ++i)
        s += a.values()[i] * b.values()[i];
    return s;
}

inline double norm2(const ImagePlane& a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

// Conjugate gradient with Jacobi preconditioning, zero initial guess.
// Converged means ||A x - rhs||_2 / ||rhs||_2 <= tol; on iteration exhaustion the
// best iterate is returned with converged=false and the caller decides.
inline std::pair<ImagePlane, SolveReport> solve(const WeightedLaplacianOperator& op,
                                                const ImagePlane& rhs, double tol,
                                                int max_iter) {
    if (tol <= 0.0) throw std::invalid_argument("solve: tol must be > 0");
    if (max_iter < 0) throw std::invalid_argument("solve: max_iter must be >= 0");
    if (rhs.width() != op.width() || rhs.height() != op.height())
        throw std::invalid_argument("solve: rhs shape mismatch");

    ImagePlane x(op.width(), op.height(), 0.0);
    double rhs_norm = detail::norm2(rhs);
    if (rhs_norm == 0.0)
        return {std::move(x), SolveReport{0, 0.0, true}};

    ImagePlane inv_diag = op.diagonal();
    for (double& v : inv_diag.values()) v = 1.0 / v;

    ImagePlane r = rhs;  // residual of the zero guess
    ImagePlane z = r;
    for (std::size_t i = 0; i < z.pixel_count(); ++i)
        z.values()[i] *= inv_diag.values()[i];
    ImagePlane p = z;
    double rz = detail::dot(r, z);
    double rel_res = 1.0;

    for (int k = 1; k <= max_iter; ++k) {
        ImagePlane ap = op.apply(p);
        double p_ap = detail::dot(p, ap);
        if (p_ap <= 0.0 || !std::isfinite(p_ap))
            throw std::runtime_error("solve: operator lost positive definiteness");
        double alpha = rz / p_ap;
        for (std::size_t i = 0; i < x.pixel_count(); ++i) {
            x.values()[i] += alpha * p.values()[i];
            r.values()[i] -= alpha * ap.values()[i];
        }
        rel_res = detail::norm2(r) / rhs_norm;
        if (!std::isfinite(rel_res))
            throw std::runtime_error("solve: non-finite residual");
        if (rel_res <= tol)
            return {std::move(x), SolveReport{k, rel_res, true}};
        for (std::size_t i = 0; i < z.pixel_count(); ++i)
            z.values()[i] = r.values()[i] * inv_diag.values()[i];
        double rz_next = detail::dot(r, z);
        double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < p.pixel_count(); ++i)
            p.values()[i] = z.values()[i] + beta * p.values()[i];
    }
    return {std::move(x), SolveReport{max_iter, rel_res, false}};
}

// Row-major dense square matrix; only used by the dense assembly oracle below.
struct DenseMatrix {
    int n = 0;
    std::vector<double> a;

    explicit DenseMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_, 0.0) {}
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Explicit c*I + sum_d D_d^T Diag(w_d) D_d over vectorized (row-major) pixels.
// Test oracle only; refuses grids past the guard so it cannot leak into
// production-size paths.
inline DenseMatrix assemble_dense(const WeightedLaplacianOperator& op) {
    std::size_t n = static_cast<std::size_t>(op.width()) * op.height();
    if (n > 4096)
        throw std::invalid_argument("assemble_dense: grid exceeds the oracle guard (4096 pixels)");
    int w = op.width(), h = op.height();
    auto idx = [w](int x, int y) { return y * w + x; };

    DenseMatrix m(static_cast<int>(n));
    for (std::size_t i = 0; i < n; ++i) m.at(static_cast<int>(i), static_cast<int>(i)) = op.identity_coeff();

    // Each difference row contributes w * (e_next - e_cur)(e_next - e_cur)^T.
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (x + 1 < w) {
                double wt = op.weights(Direction::horizontal)(x, y);
                int i = idx(x, y), j = idx(x + 1, y);
                m.at(i, i) += wt;
                m.at(j, j) += wt;
                m.at(i, j) -= wt;
                m.at(j, i) -= wt;
            }
            if (y + 1 < h) {
                double wt = op.weights(Direction::vertical)(x, y);
                int i = idx(x, y), j = idx(x, y + 1);
                m.at(i, i) += wt;
                m.at(j, j) += wt;
                m.at(i, j) -= wt;
                m.at(j, i) -= wt;
            }
        }
    return m;
}

}  // namespace jed
