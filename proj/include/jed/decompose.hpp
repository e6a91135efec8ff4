#pragma once

#include <array>
#include <utility>

#include "jed/core.hpp"
#include "jed/gradient.hpp"
#include "jed/params.hpp"
#include "jed/solver.hpp"

namespace jed {

// Output of the two estimation stages: the normalized illumination map, the
// clamped per-channel reflectance, and the diagnostics of the four solves.
struct DecompositionResult {
    ImagePlane illumination;
    ColorImage reflectance;
    SolveReport illumination_report;
    std::array<SolveReport, 3> reflectance_reports;
};

// Refines the initial illumination l_hat by the edge-aware quadratic
// smoothness system (I + sum_d D_d^T Diag(a_d) D_d) l = l_hat, where the
// weights a_d are large in flat areas and small across edges. The returned
// plane is not clamped.
inline std::pair<ImagePlane, SolveReport> estimate_illumination(const ImagePlane& l_hat,
                                                                const JedParams& params) {
    params.validate();
    IlluminationWeights a = illumination_weights(l_hat, params.alpha, params.eps_stab);
    WeightedLaplacianOperator op(std::move(a.a_h), std::move(a.a_v), 1.0);
    return solve(op, l_hat, params.tol, params.max_iter);
}

// Clamps the refined illumination into [eps_div, 1] so the later division and
// gamma step stay bounded.
inline ImagePlane normalize_illumination(const ImagePlane& L, double eps_div) {
    if (!(eps_div > 0.0) || eps_div > 1.0)
        throw std::invalid_argument("normalize_illumination: eps_div must be in (0, 1]");
    return clamp_plane(L, eps_div, 1.0);
}

// Estimates per-channel reflectance given the normalized illumination. Each
// channel solves
//   (I + sum_d D_d^T Diag(beta*w_d + omega) D_d) r = s_c / l + sum_d omega D_d^T g_d
// with the edge-stopping weights w_d shared across channels (from the luma of
// S) and the amplified gradient target g_d built per channel. Results are
// clamped to [0,1].
inline std::pair<ColorImage, std::array<SolveReport, 3>> estimate_reflectance(
    const ColorImage& S, const ImagePlane& L, const JedParams& params) {
    params.validate();
    if (L.width() != S.width() || L.height() != S.height())
        throw std::invalid_argument("estimate_reflectance: illumination shape mismatch");
    for (double v : L.values())
        if (v < params.eps_div)
            throw std::invalid_argument("estimate_reflectance: illumination is not normalized");

    ReflectanceWeights w = reflectance_weights(rgb_to_luma(S), params.eps_stab);
    auto fold = [&](ImagePlane& plane) {
        for (double& v : plane.values()) v = params.beta * v + params.omega;
    };
    fold(w.w_h);
    fold(w.w_v);
    WeightedLaplacianOperator op(std::move(w.w_h), std::move(w.w_v), 1.0);

    auto solve_channel = [&](const ImagePlane& s_chan) {
        AdjustedGradient g =
            adjusted_gradient(s_chan, params.lambda, params.sigma, params.eps_thresh);
        ImagePlane rhs(S.width(), S.height());
        for (std::size_t i = 0; i < rhs.pixel_count(); ++i)
            rhs.values()[i] = s_chan.values()[i] / L.values()[i];
        ImagePlane gh = apply_div_transpose(g.g_h, Direction::horizontal);
        ImagePlane gv = apply_div_transpose(g.g_v, Direction::vertical);
        for (std::size_t i = 0; i < rhs.pixel_count(); ++i)
            rhs.values()[i] += params.omega * (gh.values()[i] + gv.values()[i]);
        auto [r, report] = solve(op, rhs, params.tol, params.max_iter);
        return std::make_pair(clamp_plane(r, 0.0, 1.0), report);
    };

    auto [rr, rep_r] = solve_channel(S.r);
    auto [rg, rep_g] = solve_channel(S.g);
    auto [rb, rep_b] = solve_channel(S.b);
    return {ColorImage(std::move(rr), std::move(rg), std::move(rb)), {rep_r, rep_g, rep_b}};
}

}  // namespace jed
