#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jed/analysis.hpp"
#include "jed/enhance.hpp"
#include "jed/image_io.hpp"
#include "jed/params.hpp"

namespace jed::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace detail {

struct Options {
    std::string command;
    std::vector<std::string> inputs;
    std::string output;
    std::string report_path;
    std::string config_path;
    std::string out_l, out_r;
    std::optional<double> alpha, beta, omega, lambda, sigma, eps_thresh, eps_stab, eps_div,
        gamma, tol;
    std::optional<int> max_iter;
};

inline void add_param_flags(CLI::App* cmd, Options& opt) {
    cmd->add_option("--alpha", opt.alpha, "Illumination smoothness weight");
    cmd->add_option("--beta", opt.beta, "Reflectance smoothness weight");
    cmd->add_option("--omega", opt.omega, "Gradient-fidelity weight");
    cmd->add_option("--lambda", opt.lambda, "Gradient amplification strength");
    cmd->add_option("--sigma", opt.sigma, "Amplification falloff ([0,1] gradient units)");
    cmd->add_option("--eps-thresh", opt.eps_thresh, "Small-gradient filter threshold");
    cmd->add_option("--eps-stab", opt.eps_stab, "Weight denominator stabilizer");
    cmd->add_option("--eps-div", opt.eps_div, "Illumination floor before division");
    cmd->add_option("--gamma", opt.gamma, "Display exponent");
    cmd->add_option("--tol", opt.tol, "Solver relative-residual tolerance");
    cmd->add_option("--max-iter", opt.max_iter, "Solver iteration budget");
}

inline void add_common_flags(CLI::App* cmd, Options& opt, bool with_output) {
    cmd->add_option("inputs", opt.inputs, "Input images (PNG or PPM)")->required();
    if (with_output)
        cmd->add_option("-o,--output", opt.output, "Output file (single input) or directory");
    cmd->add_option("--report", opt.report_path, "Write the JSON run report here instead of stdout");
    cmd->add_option("--config", opt.config_path, "Flat key = value parameter file");
}

inline JedParams resolve_params(const Options& opt) {
    JedParams p;
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw std::invalid_argument("cannot open config: " + opt.config_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        p = parse_config(text, p);
    }
    if (opt.alpha) p.alpha = *opt.alpha;
    if (opt.beta) p.beta = *opt.beta;
    if (opt.omega) p.omega = *opt.omega;
    if (opt.lambda) p.lambda = *opt.lambda;
    if (opt.sigma) p.sigma = *opt.sigma;
    if (opt.eps_thresh) p.eps_thresh = *opt.eps_thresh;
    if (opt.eps_stab) p.eps_stab = *opt.eps_stab;
    if (opt.eps_div) p.eps_div = *opt.eps_div;
    if (opt.gamma) p.gamma = *opt.gamma;
    if (opt.tol) p.tol = *opt.tol;
    if (opt.max_iter) p.max_iter = *opt.max_iter;
    p.validate();
    return p;
}

inline json params_to_json(const JedParams& p) {
    return json{{"alpha", p.alpha},
                {"beta", p.beta},
                {"omega", p.omega},
                {"lambda", p.lambda},
                {"sigma", p.sigma},
                {"eps_thresh", p.eps_thresh},
                {"eps_stab", p.eps_stab},
                {"eps_div", p.eps_div},
                {"gamma", p.gamma},
                {"tol", p.tol},
                {"max_iter", p.max_iter}};
}

inline json report_to_json(const SolveReport& r) {
    return json{{"iterations", r.iterations},
                {"relative_residual", r.relative_residual},
                {"converged", r.converged}};
}

// Output path for one input: explicit file path (single input), directory, or
// a "<stem>_<suffix>" sibling of the input.
inline fs::path output_path_for(const Options& opt, const std::string& input,
                                const std::string& suffix) {
    fs::path in(input);
    std::string name = in.stem().string() + "_" + suffix +
                       (in.has_extension() ? in.extension().string() : ".png");
    if (opt.output.empty()) return in.parent_path() / name;
    fs::path out(opt.output);
    if (fs::is_directory(out)) return out / name;
    return out;  // single-input file path, validated by the caller
}

inline json image_metrics(const ColorImage& img, const std::optional<PatchRect>& patch) {
    json m;
    m["mean_brightness"] = mean_luma(img);
    if (patch)
        m["noise_std"] = flat_patch_noise_std(img, *patch);
    else
        m["noise_std"] = nullptr;
    return m;
}

inline json patch_to_json(const std::optional<PatchRect>& patch) {
    if (!patch) return nullptr;
    return json{{"x", patch->x}, {"y", patch->y}, {"width", patch->width},
                {"height", patch->height}};
}

struct EntryTimer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

inline ColorImage gray_image(const ImagePlane& p) {
    return ColorImage(p, p, p);
}

inline json process_one(const Options& opt, const JedParams& params, const std::string& input) {
    EntryTimer timer;
    json entry;
    entry["input"] = input;
    ColorImage img = load_image(input);
    std::optional<PatchRect> patch = find_flat_patch(img);

    if (opt.command == "enhance" || opt.command == "he") {
        bool plain_he = opt.command == "he";
        fs::path out_path = output_path_for(opt, input, plain_he ? "he" : "enhanced");
        json metrics;
        if (plain_he) {
            ColorImage out = histogram_equalize(img);
            save_image(out_path.string(), out);
            metrics["mean_brightness_in"] = mean_luma(img);
            metrics["mean_brightness_out"] = mean_luma(out);
            if (patch) {
                metrics["noise_std_in"] = flat_patch_noise_std(img, *patch);
                metrics["noise_std_out"] = flat_patch_noise_std(out, *patch);
            } else {
                metrics["noise_std_in"] = nullptr;
                metrics["noise_std_out"] = nullptr;
            }
        } else {
            EnhanceResult res = enhance(img, params);
            save_image(out_path.string(), res.output);
            entry["params"] = params_to_json(params);
            entry["solver"] = {
                {"illumination", report_to_json(res.decomposition.illumination_report)},
                {"reflectance", json::array({report_to_json(res.decomposition.reflectance_reports[0]),
                                             report_to_json(res.decomposition.reflectance_reports[1]),
                                             report_to_json(res.decomposition.reflectance_reports[2])})}};
            entry["solver_warning"] = res.solver_warning;
            metrics["mean_brightness_in"] = mean_luma(img);
            metrics["mean_brightness_out"] = mean_luma(res.output);
            if (patch) {
                metrics["noise_std_in"] = flat_patch_noise_std(img, *patch);
                metrics["noise_std_out"] = flat_patch_noise_std(res.output, *patch);
            } else {
                metrics["noise_std_in"] = nullptr;
                metrics["noise_std_out"] = nullptr;
            }
        }
        double in_mean = metrics["mean_brightness_in"].get<double>();
        double out_mean = metrics["mean_brightness_out"].get<double>();
        metrics["brightness_gain"] = in_mean > 0.0 ? out_mean / in_mean : 1.0;
        metrics["patch"] = patch_to_json(patch);
        entry["metrics"] = metrics;
        entry["output"] = out_path.string();
    } else if (opt.command == "decompose") {
        fs::path l_path = opt.out_l.empty() ? output_path_for(opt, input, "L") : fs::path(opt.out_l);
        fs::path r_path = opt.out_r.empty() ? output_path_for(opt, input, "R") : fs::path(opt.out_r);
        EnhanceResult res = enhance(img, params);
        save_image(l_path.string(), gray_image(res.decomposition.illumination));
        save_image(r_path.string(), res.decomposition.reflectance);
        entry["params"] = params_to_json(params);
        entry["solver"] = {
            {"illumination", report_to_json(res.decomposition.illumination_report)},
            {"reflectance", json::array({report_to_json(res.decomposition.reflectance_reports[0]),
                                         report_to_json(res.decomposition.reflectance_reports[1]),
                                         report_to_json(res.decomposition.reflectance_reports[2])})}};
        entry["solver_warning"] = res.solver_warning;
        entry["output"] = json{{"illumination", l_path.string()},
                               {"reflectance", r_path.string()}};
        json metrics;
        metrics["mean_brightness_in"] = mean_luma(img);
        metrics["noise_std_in"] = patch ? json(flat_patch_noise_std(img, *patch)) : json(nullptr);
        metrics["patch"] = patch_to_json(patch);
        entry["metrics"] = metrics;
    } else {  // metrics
        json metrics;
        metrics["mean_brightness_in"] = mean_luma(img);
        metrics["noise_std_in"] = patch ? json(flat_patch_noise_std(img, *patch)) : json(nullptr);
        metrics["patch"] = patch_to_json(patch);
        metrics["width"] = img.width();
        metrics["height"] = img.height();
        entry["metrics"] = metrics;
        entry["output"] = nullptr;
    }

    entry["success"] = true;
    entry["wall_ms"] = timer.elapsed_ms();
    return entry;
}

}  // namespace detail

// Entry point behind the `jed` binary. Exit code 0 on full success, 1 when any
// image failed (the rest are still processed), 2 on argument errors.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    detail::Options opt;

    CLI::App app{"Joint low-light enhancement and denoising via sequential "
                 "illumination/reflectance decomposition",
                 "jed"};
    app.require_subcommand(1);

    CLI::App* cmd_enhance = app.add_subcommand("enhance", "Enhance low-light images");
    detail::add_common_flags(cmd_enhance, opt, true);
    detail::add_param_flags(cmd_enhance, opt);

    CLI::App* cmd_decompose =
        app.add_subcommand("decompose", "Write the illumination and reflectance maps");
    detail::add_common_flags(cmd_decompose, opt, true);
    detail::add_param_flags(cmd_decompose, opt);
    cmd_decompose->add_option("--out-l", opt.out_l, "Illumination output path (single input)");
    cmd_decompose->add_option("--out-r", opt.out_r, "Reflectance output path (single input)");

    CLI::App* cmd_he =
        app.add_subcommand("he", "Global histogram equalization baseline");
    detail::add_common_flags(cmd_he, opt, true);

    CLI::App* cmd_metrics = app.add_subcommand("metrics", "Report image metrics only");
    detail::add_common_flags(cmd_metrics, opt, false);

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        // Prints the active (sub)command help for --help, the error otherwise.
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    for (CLI::App* cmd : {cmd_enhance, cmd_decompose, cmd_he, cmd_metrics})
        if (cmd->parsed()) opt.command = cmd->get_name();

    // Invalid flag combinations are argument errors, not per-image failures.
    JedParams params;
    try {
        params = detail::resolve_params(opt);
        if (opt.inputs.size() > 1 && !opt.output.empty() &&
            !std::filesystem::is_directory(opt.output))
            throw std::invalid_argument("--output must be a directory for multiple inputs");
        if (opt.inputs.size() > 1 && (!opt.out_l.empty() || !opt.out_r.empty()))
            throw std::invalid_argument("--out-l/--out-r require a single input");
        if (cmd_decompose->parsed() && !opt.output.empty() &&
            !std::filesystem::is_directory(opt.output))
            throw std::invalid_argument(
                "decompose writes two maps: --output must be a directory "
                "(or use --out-l/--out-r)");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    json report;
    report["command"] = opt.command;
    report["entries"] = json::array();
    bool any_failed = false;
    for (const std::string& input : opt.inputs) {
        try {
            report["entries"].push_back(detail::process_one(opt, params, input));
        } catch (const std::exception& e) {
            any_failed = true;
            err << "error: " << input << ": " << e.what() << "\n";
            report["entries"].push_back(
                json{{"input", input}, {"success", false}, {"error", e.what()}});
        }
    }
    int exit_code = any_failed ? 1 : 0;
    report["exit_code"] = exit_code;

    std::string dumped = report.dump(2) + "\n";
    if (opt.report_path.empty()) {
        out << dumped << std::flush;
    } else {
        std::ofstream rf(opt.report_path, std::ios::trunc);
        if (!rf) {
            err << "error: cannot write report: " << opt.report_path << "\n";
            return 1;
        }
        rf << dumped;
    }
    return exit_code;
}

}  // namespace jed::cli
