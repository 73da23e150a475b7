// Command-line front end: design, simulate, sweep, sort-images.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "usdmplc/errors.hpp"
#include "usdmplc/runner.hpp"

namespace {

using usdmplc::RunConfig;

struct CommonFlags {
    std::string config_path;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    bool strict = false;
    bool ideal = false;
    std::vector<int> dims;
    std::vector<double> fidelities;
    std::optional<int> sweeps;
    std::optional<std::string> rule;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON configuration file");
    cmd->add_option("--out", flags.out, "output directory");
    cmd->add_option("--seed", flags.seed, "RNG seed for mask initialization");
    cmd->add_option("--jobs", flags.jobs, "parallel sweep cells");
    cmd->add_flag("--strict", flags.strict, "promote warnings and non-convergence to errors");
    cmd->add_flag("--ideal", flags.ideal, "bypass the mask stack, inject analytic outputs");
    cmd->add_option("--d", flags.dims, "state-space dimension(s)")->delimiter(',');
    cmd->add_option("--fidelity", flags.fidelities, "pairwise state fidelity value(s)")
        ->delimiter(',');
    cmd->add_option("--sweeps", flags.sweeps, "wavefront-matching sweep budget");
    cmd->add_option("--rule", flags.rule, "mask update rule: A or B");
}

RunConfig build_config(const CommonFlags& flags) {
    RunConfig cfg;
    if (!flags.config_path.empty()) cfg = RunConfig::load(flags.config_path);
    if (!flags.dims.empty()) cfg.dimensions = flags.dims;
    if (!flags.fidelities.empty()) cfg.fidelities = flags.fidelities;
    if (!flags.out.empty()) cfg.output_dir = flags.out;
    if (flags.seed) cfg.wfm.seed = *flags.seed;
    if (flags.jobs) cfg.jobs = *flags.jobs;
    if (flags.sweeps) cfg.wfm.max_sweeps = *flags.sweeps;
    if (flags.rule) {
        if (*flags.rule == "A") {
            cfg.wfm.rule = usdmplc::UpdateRule::AveragedOverlap;
        } else if (*flags.rule == "B") {
            cfg.wfm.rule = usdmplc::UpdateRule::Incremental;
        } else {
            throw usdmplc::InvalidArgument("--rule must be A or B");
        }
    }
    if (flags.strict) cfg.strict = true;
    if (flags.ideal) cfg.ideal = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"USD mode-sorter design and virtual experiments"};
    app.require_subcommand(1);

    CommonFlags design_flags, simulate_flags, sweep_flags, images_flags;

    CLI::App* design = app.add_subcommand("design", "train a sorter and export its masks");
    add_common(design, design_flags);

    CLI::App* simulate = app.add_subcommand("simulate", "run the virtual experiment");
    add_common(simulate, simulate_flags);
    std::string manifest_path;
    simulate->add_option("--manifest", manifest_path, "manifest.json of an existing design");

    CLI::App* sweep = app.add_subcommand("sweep", "grid of (d, fidelity) runs");
    add_common(sweep, sweep_flags);
    bool resume = false;
    sweep->add_flag("--resume", resume, "skip cells with matching manifests");

    CLI::App* images = app.add_subcommand("sort-images", "USD sorting of overlapping images");
    add_common(images, images_flags);
    std::vector<std::string> image_paths;
    images->add_option("paths", image_paths, "grayscale PGM/PNG images")->required();
    bool gram_only = false;
    images->add_flag("--report-gram-only", gram_only,
                     "print pairwise fidelities without training");
    std::string pixels_are = "amplitude";
    images->add_option("--pixels-are", pixels_are, "amplitude|intensity")
        ->check(CLI::IsMember({"amplitude", "intensity"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : usdmplc::kExitValidation;
    }

    return usdmplc::run_cli_action([&] {
        if (design->parsed()) {
            cmd_design(build_config(design_flags));
        } else if (simulate->parsed()) {
            RunConfig cfg = build_config(simulate_flags);
            std::optional<std::filesystem::path> manifest;
            if (!manifest_path.empty()) manifest = manifest_path;
            cmd_simulate(cfg, manifest);
        } else if (sweep->parsed()) {
            RunConfig cfg = build_config(sweep_flags);
            cfg.resume = resume;
            cmd_sweep(cfg);
        } else if (images->parsed()) {
            RunConfig cfg = build_config(images_flags);
            cfg.pixels_are_intensity = pixels_are == "intensity";
            std::vector<std::filesystem::path> paths(image_paths.begin(), image_paths.end());
            cmd_sort_images(paths, cfg, gram_only);
        }
    });
}
