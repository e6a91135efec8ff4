#pragma once

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace jed {

// All scalar knobs of the method. Gradient-scale quantities (sigma, eps_thresh)
// live on the [0,1] intensity scale, so byte-scale settings are divided by 255.
struct JedParams {
    double alpha = 0.007;         // illumination smoothness weight
    double beta = 0.001;          // reflectance smoothness weight
    double omega = 0.016;         // gradient-fidelity weight
    double lambda = 6.0;          // gradient amplification strength
    double sigma = 10.0 / 255.0;  // amplification falloff
    double eps_thresh = 10.0 / 255.0;  // small-gradient filter threshold
    double eps_stab = 1e-4;       // weight denominator stabilizer
    double eps_div = 1.0 / 255.0; // illumination floor before division
    double gamma = 2.2;           // display exponent
    double tol = 1e-5;            // solver relative-residual tolerance
    int max_iter = 1000;          // solver iteration budget

    void validate() const {
        if (alpha < 0 || beta < 0 || omega < 0 || lambda < 0)
            throw std::invalid_argument("params: alpha, beta, omega, lambda must be >= 0");
        if (!(sigma > 0) || !(eps_stab > 0) || !(eps_div > 0) || !(tol > 0))
            throw std::invalid_argument("params: sigma, eps_stab, eps_div, tol must be > 0");
        if (eps_thresh < 0)
            throw std::invalid_argument("params: eps_thresh must be >= 0");
        if (gamma < 1)
            throw std::invalid_argument("params: gamma must be >= 1");
        if (max_iter < 1)
            throw std::invalid_argument("params: max_iter must be >= 1");
        for (double v : {alpha, beta, omega, lambda, sigma, eps_thresh, eps_stab, eps_div,
                         gamma, tol})
            if (!std::isfinite(v))
                throw std::invalid_argument("params: non-finite value");
    }
};

inline JedParams default_params() { return JedParams{}; }

namespace detail {

inline void set_param(JedParams& p, const std::string& key, const std::string& value) {
    double* field = nullptr;
    if (key == "alpha") field = &p.alpha;
    else if (key == "beta") field = &p.beta;
    else if (key == "omega") field = &p.omega;
    else if (key == "lambda") field = &p.lambda;
    else if (key == "sigma") field = &p.sigma;
    else if (key == "eps_thresh") field = &p.eps_thresh;
    else if (key == "eps_stab") field = &p.eps_stab;
    else if (key == "eps_div") field = &p.eps_div;
    else if (key == "gamma") field = &p.gamma;
    else if (key == "tol") field = &p.tol;
    else if (key != "max_iter")
        throw std::invalid_argument("params: unknown key '" + key + "'");

    std::size_t used = 0;
    try {
        if (field) *field = std::stod(value, &used);
        else p.max_iter = std::stoi(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("params: bad value for '" + key + "'");
    }
    if (used != value.size())
        throw std::invalid_argument("params: trailing characters in value for '" + key + "'");
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace detail

// Parses a flat "key = value" configuration onto base. Blank lines and
// '#' comments are allowed; unknown keys are an error.
inline JedParams parse_config(const std::string& text, JedParams base = JedParams{}) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("params: line " + std::to_string(line_no) +
                                        " is not 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("params: line " + std::to_string(line_no) +
                                        " is not 'key = value'");
        detail::set_param(base, key, value);
    }
    base.validate();
    return base;
}

inline std::string to_config(const JedParams& p) {
    std::ostringstream out;
    out.precision(17);
    out << "alpha = " << p.alpha << "\n"
        << "beta = " << p.beta << "\n"
        << "omega = " << p.omega << "\n"
        << "lambda = " << p.lambda << "\n"
        << "sigma = " << p.sigma << "\n"
        << "eps_thresh = " << p.eps_thresh << "\n"
        << "eps_stab = " << p.eps_stab << "\n"
        << "eps_div = " << p.eps_div << "\n"
        << "gamma = " << p.gamma << "\n"
        << "tol = " << p.tol << "\n"
        << "max_iter = " << p.max_iter << "\n";
    return out.str();
}

}  // namespace jed
