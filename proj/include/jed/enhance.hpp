#pragma once

#include <cmath>
#include <utility>

#include "jed/core.hpp"
#include "jed/decompose.hpp"
#include "jed/params.hpp"

namespace jed {

struct EnhanceResult {
    ColorImage output;
    DecompositionResult decomposition;
    // Set when any of the four solves stopped on the iteration budget; the
    // output is still produced from the best iterates.
    bool solver_warning = false;
};

// Display-space brightening L^(1/gamma). With gamma >= 1 and input in (0,1]
// the output never falls below the input.
inline ImagePlane gamma_correct(const ImagePlane& L_norm, double gamma) {
    if (gamma < 1.0) throw std::invalid_argument("gamma_correct: gamma must be >= 1");
    ImagePlane out = L_norm;
    double inv = 1.0 / gamma;
    for (double& v : out.values()) v = std::pow(v, inv);
    return out;
}

// Full chain: luma -> refined illumination -> normalized -> per-channel
// reflectance -> recomposition with gamma-corrected illumination.
inline EnhanceResult enhance(const ColorImage& S, const JedParams& params = JedParams{}) {
    params.validate();
    ImagePlane l_hat = rgb_to_luma(S);
    auto [L, l_report] = estimate_illumination(l_hat, params);
    ImagePlane L_norm = normalize_illumination(L, params.eps_div);
    auto [R, r_reports] = estimate_reflectance(S, L_norm, params);

    ImagePlane lit = gamma_correct(L_norm, params.gamma);
    auto recompose = [&](const ImagePlane& refl) {
        ImagePlane out(S.width(), S.height());
        for (std::size_t i = 0; i < out.pixel_count(); ++i)
            out.values()[i] = clamp01(refl.values()[i] * lit.values()[i]);
        return out;
    };
    ColorImage output(recompose(R.r), recompose(R.g), recompose(R.b));

    bool warning = !l_report.converged;
    for (const auto& rep : r_reports) warning = warning || !rep.converged;
    return EnhanceResult{std::move(output),
                         DecompositionResult{std::move(L_norm), std::move(R), l_report, r_reports},
                         warning};
}

}  // namespace jed
