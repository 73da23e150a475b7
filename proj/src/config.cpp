#include "usdmplc/config.hpp"

#include <set>

#include "usdmplc/errors.hpp"
#include "usdmplc/io.hpp"

namespace usdmplc {

namespace {

void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                         const std::string& section) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) {
            throw InvalidArgument("config: unknown key '" +
                                  (section.empty() ? key : section + "." + key) + "'");
        }
    }
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

}  // namespace

nlohmann::json geometry_to_json(const Geometry& g) {
    return {
        {"planes", g.n_planes},
        {"plane_spacing", g.plane_spacing},
        {"lead_in", g.lead_in},
        {"lead_out", g.lead_out},
        {"wavelength", g.wavelength},
        {"grid_nx", g.nx},
        {"grid_ny", g.ny},
        {"pitch", g.pitch},
        {"hg_waist", g.hg_waist},
        {"spot_waist", g.spot_waist},
        {"spot_radius", g.spot_radius},
        {"detector_radius_factor", g.detector_radius_factor},
    };
}

Geometry geometry_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j,
                        {"planes", "plane_spacing", "lead_in", "lead_out", "wavelength",
                         "grid_nx", "grid_ny", "pitch", "hg_waist", "spot_waist", "spot_radius",
                         "detector_radius_factor"},
                        "geometry");
    Geometry g;
    maybe(j, "planes", g.n_planes);
    maybe(j, "plane_spacing", g.plane_spacing);
    maybe(j, "lead_in", g.lead_in);
    maybe(j, "lead_out", g.lead_out);
    maybe(j, "wavelength", g.wavelength);
    maybe(j, "grid_nx", g.nx);
    maybe(j, "grid_ny", g.ny);
    maybe(j, "pitch", g.pitch);
    maybe(j, "hg_waist", g.hg_waist);
    maybe(j, "spot_waist", g.spot_waist);
    maybe(j, "spot_radius", g.spot_radius);
    maybe(j, "detector_radius_factor", g.detector_radius_factor);
    return g;
}

nlohmann::json wfm_to_json(const WFMOptions& w) {
    return {
        {"rule", w.rule == UpdateRule::AveragedOverlap ? "A" : "B"},
        {"max_sweeps", w.max_sweeps},
        {"tolerance", w.tolerance},
        {"init", w.init == MaskInit::FlatZero ? "flat" : "random"},
        {"seed", w.seed},
        {"cache_fields", w.cache_fields},
    };
}

WFMOptions wfm_from_json(const nlohmann::json& j) {
    reject_unknown_keys(j, {"rule", "max_sweeps", "tolerance", "init", "seed", "cache_fields"},
                        "wfm");
    WFMOptions w;
    if (j.contains("rule")) {
        const auto rule = j.at("rule").get<std::string>();
        if (rule == "A") {
            w.rule = UpdateRule::AveragedOverlap;
        } else if (rule == "B") {
            w.rule = UpdateRule::Incremental;
        } else {
            throw InvalidArgument("config: wfm.rule must be \"A\" or \"B\"");
        }
    }
    maybe(j, "max_sweeps", w.max_sweeps);
    maybe(j, "tolerance", w.tolerance);
    if (j.contains("init")) {
        const auto init = j.at("init").get<std::string>();
        if (init == "flat") {
            w.init = MaskInit::FlatZero;
        } else if (init == "random") {
            w.init = MaskInit::SeededRandom;
        } else {
            throw InvalidArgument("config: wfm.init must be \"flat\" or \"random\"");
        }
    }
    maybe(j, "seed", w.seed);
    maybe(j, "cache_fields", w.cache_fields);
    return w;
}

void RunConfig::validate() const {
    if (dimensions.empty()) throw InvalidArgument("config: dimension list is empty");
    for (int d : dimensions) {
        if (d < 2 || d > 8) {
            throw InvalidArgument("config: dimension must lie in [2, 8], got " +
                                  std::to_string(d));
        }
    }
    if (fidelities.empty()) throw InvalidArgument("config: fidelity list is empty");
    for (double f : fidelities) {
        if (!(f >= 0.0 && f < 1.0)) {
            throw InvalidArgument("config: fidelity must lie in [0, 1), got " + format_double(f));
        }
    }
    if (geometry.n_planes < 1) throw InvalidArgument("config: geometry.planes must be >= 1");
    if (!(geometry.plane_spacing > 0.0))
        throw InvalidArgument("config: geometry.plane_spacing must be > 0");
    if (!(geometry.lead_in > 0.0)) throw InvalidArgument("config: geometry.lead_in must be > 0");
    if (!(geometry.lead_out > 0.0))
        throw InvalidArgument("config: geometry.lead_out must be > 0");
    if (!(geometry.wavelength > 0.0))
        throw InvalidArgument("config: geometry.wavelength must be > 0");
    if (geometry.nx < 2 || geometry.ny < 2 || geometry.nx % 2 != 0 || geometry.ny % 2 != 0) {
        throw InvalidArgument("config: geometry.grid_nx/grid_ny must be even and >= 2");
    }
    if (!(geometry.pitch > 0.0)) throw InvalidArgument("config: geometry.pitch must be > 0");
    if (!(geometry.hg_waist > 0.0))
        throw InvalidArgument("config: geometry.hg_waist must be > 0");
    if (!(geometry.spot_waist > 0.0))
        throw InvalidArgument("config: geometry.spot_waist must be > 0");
    if (!(geometry.spot_radius >= 0.0))
        throw InvalidArgument("config: geometry.spot_radius must be >= 0");
    if (!(geometry.detector_radius_factor > 0.0))
        throw InvalidArgument("config: geometry.detector_radius_factor must be > 0");
    if (wfm.max_sweeps < 1) throw InvalidArgument("config: wfm.max_sweeps must be >= 1");
    if (!(wfm.tolerance > 0.0)) throw InvalidArgument("config: wfm.tolerance must be > 0");
    if (jobs < 1) throw InvalidArgument("config: jobs must be >= 1");
    if (output_dir.empty()) throw InvalidArgument("config: output_dir is empty");
}

nlohmann::json RunConfig::to_json() const {
    return {
        {"dimension", dimensions},
        {"fidelity", fidelities},
        {"geometry", geometry_to_json(geometry)},
        {"wfm", wfm_to_json(wfm)},
        {"output_dir", output_dir},
        {"strict", strict},
        {"jobs", jobs},
    };
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    reject_unknown_keys(
        j, {"dimension", "fidelity", "geometry", "wfm", "output_dir", "strict", "jobs"}, "");
    RunConfig cfg;
    if (j.contains("dimension")) {
        const auto& dim = j.at("dimension");
        cfg.dimensions = dim.is_array() ? dim.get<std::vector<int>>()
                                        : std::vector<int>{dim.get<int>()};
    }
    if (j.contains("fidelity")) {
        const auto& fid = j.at("fidelity");
        cfg.fidelities = fid.is_array() ? fid.get<std::vector<double>>()
                                        : std::vector<double>{fid.get<double>()};
    }
    if (j.contains("geometry")) cfg.geometry = geometry_from_json(j.at("geometry"));
    if (j.contains("wfm")) cfg.wfm = wfm_from_json(j.at("wfm"));
    maybe(j, "output_dir", cfg.output_dir);
    maybe(j, "strict", cfg.strict);
    maybe(j, "jobs", cfg.jobs);
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("config parse error at " + path.string() + ": " + e.what());
    }
    return from_json(j);
}

std::string RunConfig::cell_hash(int d, double fidelity) const {
    nlohmann::json j = {
        {"d", d},
        {"fidelity", fidelity},
        {"geometry", geometry_to_json(geometry)},
        {"wfm", wfm_to_json(wfm)},
    };
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(j.dump())));
    return std::string(buf);
}

}  // namespace usdmplc
