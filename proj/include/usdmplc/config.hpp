#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "usdmplc/experiment.hpp"

namespace usdmplc {

/// Run configuration shared by every CLI verb. A single flat JSON document
/// with sections mirroring the module options; CLI flags override file
/// values. validate() checks every module precondition up front and
/// reports violations with field-path messages.
struct RunConfig {
    std::vector<int> dimensions = {3};
    std::vector<double> fidelities = {0.5};
    Geometry geometry;
    WFMOptions wfm;
    std::string output_dir = "runs/out";
    bool strict = false;
    int jobs = 1;
    bool ideal = false;
    bool resume = false;
    bool pixels_are_intensity = false;

    void validate() const;

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);
    static RunConfig load(const std::filesystem::path& path);

    /// Stable hash of everything that determines one sweep cell's numeric
    /// output (geometry, training options, d, fidelity). Used by --resume.
    std::string cell_hash(int d, double fidelity) const;
};

nlohmann::json geometry_to_json(const Geometry& g);
Geometry geometry_from_json(const nlohmann::json& j);
nlohmann::json wfm_to_json(const WFMOptions& w);
WFMOptions wfm_from_json(const nlohmann::json& j);

}  // namespace usdmplc
