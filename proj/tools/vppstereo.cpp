// Command-line front end: sample / augment / match / eval / pipeline.

#include "vpp/error.hpp"
#include "vpp/geometry.hpp"
#include "vpp/imgio.hpp"
#include "vpp/occlusion.hpp"
#include "vpp/patterning.hpp"
#include "vpp/sampling_eval.hpp"
#include "vpp/stereo_sgm.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Options {
    std::string left, right, gt, calib, hints, guide, out, debug_dir, pred;
    double density = 0.05;
    std::vector<double> densities;
    std::uint64_t seed = 7;
    std::string pattern = "random";
    int patch = 3;
    bool uniform_patch = false;
    double alpha = 0.4;
    std::string occlusion = "fgd";
    int window_length = 64;
    int max_disp = 192;
    int paths = 8;
    double guide_k = 10.0;
    double guide_w = 10.0;
    std::string modes = "baseline,guided,vpp";
};

vpp::VppConfig vpp_config(const Options& opt) {
    vpp::VppConfig cfg;
    if (opt.pattern == "random") cfg.source = vpp::PatternSource::Random;
    else if (opt.pattern == "hist") cfg.source = vpp::PatternSource::Histogram;
    else throw CLI::ValidationError("--pattern must be 'random' or 'hist'");
    cfg.patch = opt.patch;
    cfg.uniform_patch = opt.uniform_patch;
    cfg.alpha = opt.alpha;
    if (opt.occlusion == "no") cfg.strategy = vpp::OcclusionStrategy::No;
    else if (opt.occlusion == "bkgd") cfg.strategy = vpp::OcclusionStrategy::Bkgd;
    else if (opt.occlusion == "fgd") cfg.strategy = vpp::OcclusionStrategy::Fgd;
    else throw CLI::ValidationError("--occlusion must be 'no', 'bkgd' or 'fgd'");
    cfg.window_length = opt.window_length;
    cfg.rng_seed = opt.seed;
    cfg.validate();
    return cfg;
}

vpp::SgmParams sgm_params(const Options& opt) {
    vpp::SgmParams params;
    params.max_disparity = opt.max_disp;
    params.paths = opt.paths;
    params.validate();
    return params;
}

ordered_json config_json(const Options& opt) {
    ordered_json j;
    j["left"] = opt.left;
    j["right"] = opt.right;
    j["gt"] = opt.gt;
    j["calib"] = opt.calib;
    j["hints"] = opt.hints;
    j["guide"] = opt.guide;
    j["density"] = opt.density;
    j["densities"] = opt.densities;
    j["seed"] = opt.seed;
    j["pattern"] = opt.pattern;
    j["patch"] = opt.patch;
    j["uniform_patch"] = opt.uniform_patch;
    j["alpha"] = opt.alpha;
    j["occlusion"] = opt.occlusion;
    j["window_L"] = opt.window_length;
    j["max_disp"] = opt.max_disp;
    j["paths"] = opt.paths;
    j["guide_k"] = opt.guide_k;
    j["guide_w"] = opt.guide_w;
    j["modes"] = opt.modes;
    return j;
}

void emit_json(const ordered_json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) std::cout << text;
    else vpp::write_text_file(text, out_path);
}

vpp::HintSet classified_hints(vpp::HintSet hints, int width, int height) {
    const vpp::WarpGrid grid = vpp::build_warp_grid(hints, width, height);
    vpp::classify_occlusions(grid, vpp::OcclusionParams{}, hints);
    return hints;
}

void write_hint_overlay(const vpp::ImageBuffer& left, const vpp::HintSet& hints,
                        const std::string& path) {
    vpp::ImageBuffer overlay(left.width(), left.height(), 3);
    for (int c = 0; c < 3; ++c)
        overlay.plane(c) = left.plane(left.channels() == 3 ? c : 0);
    for (const vpp::Hint& h : hints) {
        // green = visible, red = occluded, blue = warps out of target
        const std::uint8_t rgb[3] = {static_cast<std::uint8_t>(h.occluded ? 255 : 0),
                                     static_cast<std::uint8_t>(!h.occluded && !h.out_of_target ? 255 : 0),
                                     static_cast<std::uint8_t>(h.out_of_target ? 255 : 0)};
        for (int c = 0; c < 3; ++c) overlay.at(c, h.y, h.x) = rgb[c];
    }
    vpp::write_image_png(overlay, path);
}

int run_sample(const Options& opt) {
    const vpp::DisparityMap gt = vpp::read_disparity(opt.gt);
    const vpp::HintSet hints = vpp::sample_hints(gt, opt.density, opt.seed);
    vpp::write_hints(hints, opt.out);
    std::cout << hints.size() << " hints -> " << opt.out << "\n";
    return 0;
}

int run_augment(const Options& opt) {
    const vpp::ImageBuffer left = vpp::read_image_png(opt.left);
    const vpp::ImageBuffer right = vpp::read_image_png(opt.right);
    vpp::HintSet hints = vpp::read_hints(opt.hints);
    hints = classified_hints(std::move(hints), left.width(), left.height());

    const auto [aug_left, aug_right] = vpp::apply_vpp(left, right, hints, vpp_config(opt));
    fs::create_directories(opt.out);
    vpp::write_image_png(aug_left, (fs::path(opt.out) / "left.png").string());
    vpp::write_image_png(aug_right, (fs::path(opt.out) / "right.png").string());
    if (!opt.debug_dir.empty()) {
        fs::create_directories(opt.debug_dir);
        write_hint_overlay(left, hints, (fs::path(opt.debug_dir) / "hints_overlay.png").string());
    }
    return 0;
}

int run_match(const Options& opt) {
    const vpp::ImageBuffer left = vpp::read_image_png(opt.left);
    const vpp::ImageBuffer right = vpp::read_image_png(opt.right);
    vpp::HintSet guide;
    if (!opt.guide.empty()) {
        guide = vpp::read_hints(opt.guide);
        vpp::validate_hints(guide, left.width(), left.height());
    }
    const vpp::DisparityMap disp =
        vpp::match_stereo(left, right, sgm_params(opt), opt.guide.empty() ? nullptr : &guide,
                          vpp::GuideParams{opt.guide_k, opt.guide_w});
    vpp::write_disparity(disp, opt.out);
    return 0;
}

int run_eval(const Options& opt) {
    const vpp::DisparityMap pred = vpp::read_disparity(opt.pred);
    const vpp::DisparityMap gt = vpp::read_disparity(opt.gt);
    ordered_json j;
    j["pred"] = opt.pred;
    j["gt"] = opt.gt;
    j["metrics"] = vpp::metrics_to_json(vpp::evaluate(pred, gt));
    emit_json(j, opt.out);
    return 0;
}

std::vector<std::string> parse_modes(const std::string& modes) {
    std::vector<std::string> out;
    std::stringstream ss(modes);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item != "baseline" && item != "vpp" && item != "guided" && item != "vpp+guided")
            throw CLI::ValidationError("unknown mode '" + item + "'");
        out.push_back(item);
    }
    if (out.empty()) throw CLI::ValidationError("--modes is empty");
    return out;
}

std::string density_tag(double density) {
    if (density < 0.0) return "dfile";  // hints came from --hints
    char buf[32];
    std::snprintf(buf, sizeof(buf), "d%g", density);
    return buf;
}

int run_pipeline(const Options& opt) {
    const vpp::ImageBuffer left = vpp::read_image_png(opt.left);
    const vpp::ImageBuffer right = vpp::read_image_png(opt.right);
    const vpp::DisparityMap gt = vpp::read_disparity(opt.gt);
    const auto modes = parse_modes(opt.modes);
    const vpp::SgmParams params = sgm_params(opt);
    const vpp::GuideParams guide{opt.guide_k, opt.guide_w};
    const vpp::VppConfig cfg = vpp_config(opt);

    // with --hints, the given file replaces GT sampling (sensor-sourced seeds)
    vpp::HintSet file_hints;
    if (!opt.hints.empty()) {
        file_hints = vpp::read_hints(opt.hints);
        vpp::validate_hints(file_hints, left.width(), left.height());
    }

    std::vector<double> densities = opt.densities;
    if (densities.empty()) densities.push_back(opt.density);
    if (!opt.hints.empty()) densities.assign(1, -1.0);  // single run, no sampling

    if (!opt.debug_dir.empty()) fs::create_directories(opt.debug_dir);

    ordered_json report;
    report["config"] = config_json(opt);
    if (!opt.calib.empty()) {
        const vpp::Calibration calib = vpp::read_calibration(opt.calib);
        report["config"]["calibration"] = {{"focal_length_px", calib.focal_length_px},
                                           {"baseline", calib.baseline},
                                           {"disparity_offset", calib.disparity_offset}};
    }
    report["results"] = ordered_json::array();

    for (double density : densities) {
        const vpp::HintSet hints =
            density < 0.0 ? file_hints : vpp::sample_hints(gt, density, opt.seed);
        ordered_json entry;
        if (density < 0.0) entry["density"] = nullptr;
        else entry["density"] = density;
        entry["hint_count"] = hints.size();
        entry["modes"] = ordered_json::object();

        for (const std::string& mode : modes) {
            vpp::DisparityMap disp;
            if (mode == "baseline") {
                disp = vpp::match_stereo(left, right, params);
            } else if (mode == "guided") {
                disp = vpp::match_stereo(left, right, params, &hints, guide);
            } else {  // vpp, vpp+guided
                const vpp::HintSet flagged =
                    classified_hints(hints, left.width(), left.height());
                const auto [aug_left, aug_right] = vpp::apply_vpp(left, right, flagged, cfg);
                const bool also_guided = mode == "vpp+guided";
                disp = vpp::match_stereo(aug_left, aug_right, params,
                                         also_guided ? &flagged : nullptr, guide);
                if (!opt.debug_dir.empty()) {
                    const std::string tag = density_tag(density);
                    vpp::write_image_png(aug_left,
                                         (fs::path(opt.debug_dir) / (tag + "_left.png")).string());
                    vpp::write_image_png(aug_right,
                                         (fs::path(opt.debug_dir) / (tag + "_right.png")).string());
                }
            }
            entry["modes"][mode] = vpp::metrics_to_json(vpp::evaluate(disp, gt));
            if (!opt.debug_dir.empty()) {
                const std::string name = density_tag(density) + "_" + mode + ".pfm";
                vpp::write_pfm(disp, (fs::path(opt.debug_dir) / name).string());
            }
            std::cerr << "[pipeline] " << density_tag(density) << " " << mode
                      << " bad2=" << entry["modes"][mode]["bad2"] << "\n";
        }
        report["results"].push_back(entry);
    }
    emit_json(report, opt.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Virtual pattern projection for stereo: paint matching patterns "
                 "from sparse disparity hints, match with SGM, score against GT"};
    app.require_subcommand(1);
    Options opt;

    // key=value config file with a [subcommand] section per command;
    // command-line flags override file values
    app.set_config("--config", "", "config file (TOML-like key=value)");

    auto add_io = [&](CLI::App* cmd) {
        cmd->fallthrough();  // lets --config appear after the subcommand
        cmd->add_option("--left", opt.left, "left (reference) image PNG");
        cmd->add_option("--right", opt.right, "right (target) image PNG");
        cmd->add_option("--gt", opt.gt, "ground-truth disparity (.pfm or 16-bit .png)");
        cmd->add_option("--calib", opt.calib, "Middlebury calib.txt");
        cmd->add_option("--out", opt.out, "output path");
        cmd->add_option("--debug-dir", opt.debug_dir, "directory for debug artifacts");
        cmd->add_option("--seed", opt.seed, "RNG seed");
    };
    auto add_vpp = [&](CLI::App* cmd) {
        cmd->add_option("--pattern", opt.pattern, "random|hist")->capture_default_str();
        cmd->add_option("--patch", opt.patch, "odd patch size, 1 = pointwise")
            ->capture_default_str();
        cmd->add_flag("--uniform-patch", opt.uniform_patch, "one color per patch");
        cmd->add_option("--alpha", opt.alpha, "blend weight in [0,1]")->capture_default_str();
        cmd->add_option("--occlusion", opt.occlusion, "no|bkgd|fgd")->capture_default_str();
        cmd->add_option("--window-L", opt.window_length, "histogram window length")
            ->capture_default_str();
    };
    auto add_sgm = [&](CLI::App* cmd) {
        cmd->add_option("--max-disp", opt.max_disp, "disparity levels")->capture_default_str();
        cmd->add_option("--paths", opt.paths, "SGM paths, 4 or 8")->capture_default_str();
        cmd->add_option("--guide-k", opt.guide_k, "guidance strength")->capture_default_str();
        cmd->add_option("--guide-w", opt.guide_w, "guidance width (disparity levels)")
            ->capture_default_str();
    };

    CLI::App* sample = app.add_subcommand("sample", "sample sparse hints from GT disparity");
    add_io(sample);
    sample->add_option("--density", opt.density, "fraction of valid GT pixels")
        ->capture_default_str();

    CLI::App* augment = app.add_subcommand("augment", "project virtual patterns onto a pair");
    add_io(augment);
    augment->add_option("--hints", opt.hints, "hints CSV");
    add_vpp(augment);

    CLI::App* match = app.add_subcommand("match", "SGM disparity from a (possibly augmented) pair");
    add_io(match);
    match->add_option("--guide", opt.guide, "hints CSV for cost-volume guidance");
    add_sgm(match);

    CLI::App* eval = app.add_subcommand("eval", "score a disparity map against GT");
    add_io(eval);
    eval->add_option("--pred", opt.pred, "predicted disparity (.pfm or 16-bit .png)");

    CLI::App* pipeline =
        app.add_subcommand("pipeline", "sample -> (augment|guide) -> match -> eval");
    add_io(pipeline);
    pipeline->add_option("--hints", opt.hints, "hints CSV (skips GT sampling)");
    pipeline->add_option("--density", opt.density, "fraction of valid GT pixels")
        ->capture_default_str();
    pipeline->add_option("--densities", opt.densities, "comma-separated density sweep")
        ->delimiter(',');
    pipeline->add_option("--modes", opt.modes, "subset of baseline,guided,vpp,vpp+guided")
        ->capture_default_str();
    add_vpp(pipeline);
    add_sgm(pipeline);

    try {
        app.parse(argc, argv);
        if (sample->parsed()) return run_sample(opt);
        if (augment->parsed()) return run_augment(opt);
        if (match->parsed()) return run_match(opt);
        if (eval->parsed()) return run_eval(opt);
        if (pipeline->parsed()) return run_pipeline(opt);
        return 2;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const vpp::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 2;
    } catch (const vpp::FormatError& e) {
        std::cerr << "format error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
