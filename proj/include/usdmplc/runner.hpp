#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "usdmplc/config.hpp"

namespace usdmplc {

/// Exit codes shared by the CLI verbs.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitIo = 2,
    kExitNumerical = 3,
};

/// Trains the sorter for the first (dimension, fidelity) cell of the config
/// and writes masks (text + PGM), the run manifest, and the training report
/// under the output directory.
void cmd_design(const RunConfig& config);

/// Simulates a designed run. With `manifest` the masks are loaded from an
/// existing design; otherwise the sorter is trained first. `config.ideal`
/// bypasses the mask stack and injects the analytic target fields.
void cmd_simulate(const RunConfig& config,
                  const std::optional<std::filesystem::path>& manifest = std::nullopt);

/// Runs every (dimension, fidelity) cell, up to `config.jobs` in parallel,
/// and writes one report per cell plus an aggregate CSV/JSON. Cell failures
/// are recorded in the aggregate without aborting the sweep. With
/// `config.resume`, cells whose manifest hash matches are not re-trained.
void cmd_sweep(const RunConfig& config);

/// USD image sorting over the given grayscale images. With `gram_only` the
/// pairwise fidelity matrix is computed and written without any training.
void cmd_sort_images(const std::vector<std::filesystem::path>& image_paths,
                     const RunConfig& config, bool gram_only = false);

/// Maps library exceptions onto CLI exit codes, printing the message to
/// stderr. Returns kExitOk when `fn` completes.
int run_cli_action(const std::function<void()>& fn);

}  // namespace usdmplc
