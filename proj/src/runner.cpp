#include "usdmplc/runner.hpp"

#include <atomic>
#include <functional>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "usdmplc/errors.hpp"
#include "usdmplc/io.hpp"

namespace usdmplc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json matrix_to_json(const OutcomeMatrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(m.at(i, j));
        rows.push_back(std::move(row));
    }
    return {{"rows", m.rows},
            {"cols", m.cols},
            {"row_labels", m.row_labels},
            {"col_labels", m.col_labels},
            {"values", std::move(rows)}};
}

json report_json(const WFMReport& r) {
    return {{"eta_trace", r.eta_trace},
            {"final_overlaps", r.final_overlaps},
            {"sweeps", r.sweeps},
            {"converged", r.converged},
            {"final_eta", r.final_eta()}};
}

void require_converged_if_strict(const RunConfig& config, const WFMReport& report,
                                 const std::string& what) {
    if (config.strict && !report.converged) {
        throw NumericalFailure(what + ": wavefront matching did not converge within " +
                               std::to_string(config.wfm.max_sweeps) + " sweeps (strict mode)");
    }
}

struct DesignArtifacts {
    fs::path dir;
    std::vector<std::string> mask_files;
    std::vector<std::string> pgm_files;
};

DesignArtifacts write_design(const RunConfig& config, const SorterDesign& design,
                             const fs::path& dir, const std::string& hash) {
    fs::create_directories(dir);
    DesignArtifacts art;
    art.dir = dir;
    const Grid grid = design.system.grid;
    for (int p = 0; p < design.system.n_planes(); ++p) {
        const std::string stem = "mask_" + std::to_string(p);
        write_mask_text(design.system.masks[static_cast<size_t>(p)], grid, dir / (stem + ".txt"));
        write_mask_pgm(design.system.masks[static_cast<size_t>(p)], grid, dir / (stem + ".pgm"));
        art.mask_files.push_back(stem + ".txt");
        art.pgm_files.push_back(stem + ".pgm");
    }
    json manifest = {
        {"d", design.d},
        {"fidelity", design.fidelity},
        {"theta", design.theta},
        {"geometry", geometry_to_json(config.geometry)},
        {"wfm", wfm_to_json(config.wfm)},
        {"masks", art.mask_files},
        {"mask_pgms", art.pgm_files},
        {"config_hash", hash},
    };
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    write_text_file(dir / "wfm_report.json", report_json(design.report).dump(2) + "\n");
    return art;
}

struct CellResult {
    int d = 0;
    double fidelity = 0.0;
    double eta = 0.0;
    double p_err = 0.0;
    double bound = 0.0;
    bool below_bound = false;
    std::string error;  // empty on success
};

json simulation_report(const RunConfig& config, const SorterDesign& design,
                       const SimulatedOutcome& sim, const fs::path& dir) {
    // The ideal matrix serves as the correction reference M; the simulated
    // normalized matrix plays the measured E.
    const double amb = design.fidelity;
    OutcomeMatrix ideal(design.d, design.d + 1);
    ideal.row_labels = sim.normalized.row_labels;
    ideal.col_labels = sim.normalized.col_labels;
    for (int i = 0; i < design.d; ++i) {
        ideal.at(i, i) = 1.0 - amb;
        ideal.at(i, design.d) = amb;
    }
    const auto v = correction_vector(sim.normalized, ideal);
    const OutcomeMatrix corrected = apply_correction(ideal, v);
    const OutcomeMatrix confusion = confusion_matrix(sim.normalized);
    const ErrorProbability perr = error_probability(sim.normalized);
    const double bound = mesd_bound(design.fidelity);

    write_text_file(dir / "outcome_raw.csv", outcome_matrix_csv(sim.raw));
    write_text_file(dir / "outcome_normalized.csv", outcome_matrix_csv(sim.normalized));
    write_text_file(dir / "outcome_corrected.csv", outcome_matrix_csv(corrected));
    write_text_file(dir / "confusion.csv", outcome_matrix_csv(confusion));

    json report = {
        {"d", design.d},
        {"fidelity", design.fidelity},
        {"theta", design.theta},
        {"geometry", geometry_to_json(config.geometry)},
        {"wfm", wfm_to_json(config.wfm)},
        {"eta_trace", design.report.eta_trace},
        {"final_eta", design.report.final_eta()},
        {"raw", matrix_to_json(sim.raw)},
        {"normalized", matrix_to_json(sim.normalized)},
        {"correction_vector", v},
        {"corrected", matrix_to_json(corrected)},
        {"confusion", matrix_to_json(confusion)},
        {"p_err_per_input", perr.per_row},
        {"p_err_mean", perr.mean},
        {"mesd_bound", bound},
        {"below_mesd_bound", perr.mean < bound},
    };
    write_text_file(dir / "report.json", report.dump(2) + "\n");
    return report;
}

CellResult run_cell(const RunConfig& config, int d, double fidelity, const fs::path& dir) {
    CellResult cell;
    cell.d = d;
    cell.fidelity = fidelity;
    const std::string hash = config.cell_hash(d, fidelity);

    SorterDesign design;
    bool reused = false;
    if (config.resume && fs::exists(dir / "manifest.json")) {
        try {
            const json manifest = json::parse(read_text_file(dir / "manifest.json"));
            if (manifest.value("config_hash", "") == hash) {
                design = prepare_sorter(d, fidelity, config.geometry);
                const Grid grid = design.system.grid;
                for (int p = 0; p < design.system.n_planes(); ++p) {
                    const auto file =
                        manifest.at("masks").at(static_cast<size_t>(p)).get<std::string>();
                    design.system.masks[static_cast<size_t>(p)] =
                        read_mask_text(grid, dir / file);
                }
                const json stored = json::parse(read_text_file(dir / "wfm_report.json"));
                design.report.eta_trace = stored.at("eta_trace").get<std::vector<double>>();
                design.report.final_overlaps =
                    stored.at("final_overlaps").get<std::vector<double>>();
                design.report.sweeps = stored.at("sweeps").get<int>();
                design.report.converged = stored.at("converged").get<bool>();
                reused = true;
            }
        } catch (const Error&) {
            reused = false;  // fall through to a fresh run
        } catch (const json::exception&) {
            reused = false;
        }
    }
    if (!reused) {
        design = build_sorter(d, fidelity, config.geometry, config.wfm);
        require_converged_if_strict(config, design.report,
                                    "d=" + std::to_string(d) + " F=" + format_double(fidelity));
        write_design(config, design, dir, hash);
    }

    const DetectorLayout detector = make_detector(config.geometry, d + 1);
    const SimulatedOutcome sim = config.ideal ? simulate_ideal(design, detector)
                                              : simulate_outcomes(design, detector);
    const json report = simulation_report(config, design, sim, dir);
    cell.eta = design.report.final_eta();
    cell.p_err = report.at("p_err_mean").get<double>();
    cell.bound = report.at("mesd_bound").get<double>();
    cell.below_bound = report.at("below_mesd_bound").get<bool>();
    return cell;
}

std::string cell_dir_name(int d, double fidelity) {
    return "d" + std::to_string(d) + "_F" + format_double(fidelity);
}

}  // namespace

void cmd_design(const RunConfig& config) {
    config.validate();
    const int d = config.dimensions.front();
    const double fidelity = config.fidelities.front();
    SorterDesign design = build_sorter(d, fidelity, config.geometry, config.wfm);
    require_converged_if_strict(config, design.report, "design");
    write_design(config, design, config.output_dir, config.cell_hash(d, fidelity));
    std::cout << "designed d=" << d << " F=" << format_double(fidelity)
              << " eta=" << format_double(design.report.final_eta()) << " sweeps="
              << design.report.sweeps << "\n";
}

void cmd_simulate(const RunConfig& config, const std::optional<fs::path>& manifest_path) {
    config.validate();
    fs::create_directories(config.output_dir);

    SorterDesign design;
    if (manifest_path) {
        json manifest;
        try {
            manifest = json::parse(read_text_file(*manifest_path));
        } catch (const json::exception& e) {
            throw IoError("manifest parse error at " + manifest_path->string() + ": " + e.what());
        }
        const Geometry geometry = geometry_from_json(manifest.at("geometry"));
        const int d = manifest.at("d").get<int>();
        const double fidelity = manifest.at("fidelity").get<double>();
        design = prepare_sorter(d, fidelity, geometry);
        const fs::path dir = manifest_path->parent_path();
        for (int p = 0; p < design.system.n_planes(); ++p) {
            const auto file = manifest.at("masks").at(static_cast<size_t>(p)).get<std::string>();
            design.system.masks[static_cast<size_t>(p)] =
                read_mask_text(design.system.grid, dir / file);
        }
        if (fs::exists(dir / "wfm_report.json")) {
            const json stored = json::parse(read_text_file(dir / "wfm_report.json"));
            design.report.eta_trace = stored.at("eta_trace").get<std::vector<double>>();
            design.report.final_overlaps = stored.at("final_overlaps").get<std::vector<double>>();
            design.report.sweeps = stored.at("sweeps").get<int>();
            design.report.converged = stored.at("converged").get<bool>();
        }
        RunConfig effective = config;
        effective.geometry = geometry;
        const DetectorLayout detector = make_detector(geometry, design.d + 1);
        const SimulatedOutcome sim = config.ideal ? simulate_ideal(design, detector)
                                                  : simulate_outcomes(design, detector);
        simulation_report(effective, design, sim, config.output_dir);
    } else {
        const int d = config.dimensions.front();
        const double fidelity = config.fidelities.front();
        design = build_sorter(d, fidelity, config.geometry, config.wfm);
        require_converged_if_strict(config, design.report, "simulate");
        write_design(config, design, config.output_dir, config.cell_hash(d, fidelity));
        const DetectorLayout detector = make_detector(config.geometry, d + 1);
        const SimulatedOutcome sim = config.ideal ? simulate_ideal(design, detector)
                                                  : simulate_outcomes(design, detector);
        simulation_report(config, design, sim, config.output_dir);
    }
    std::cout << "simulated d=" << design.d << " F=" << format_double(design.fidelity)
              << (config.ideal ? " (ideal injection)" : "") << "\n";
}

void cmd_sweep(const RunConfig& config) {
    config.validate();
    const fs::path root = config.output_dir;
    fs::create_directories(root);

    struct Cell {
        int d;
        double fidelity;
        fs::path dir;
    };
    std::vector<Cell> cells;
    for (int d : config.dimensions) {
        for (double f : config.fidelities) {
            cells.push_back({d, f, root / cell_dir_name(d, f)});
        }
    }

    std::vector<CellResult> results(cells.size());
    std::atomic<size_t> next{0};
    const int jobs = std::min<int>(config.jobs, static_cast<int>(cells.size()));
    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
            const Cell& cell = cells[i];
            try {
                results[i] = run_cell(config, cell.d, cell.fidelity, cell.dir);
            } catch (const std::exception& e) {
                results[i].d = cell.d;
                results[i].fidelity = cell.fidelity;
                results[i].error = e.what();
            }
        }
    };
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::string csv = "d,fidelity,p_err,mesd_bound,below_bound,eta,error\n";
    json rows = json::array();
    for (const CellResult& r : results) {
        csv += std::to_string(r.d) + "," + format_double(r.fidelity);
        if (r.error.empty()) {
            csv += "," + format_double(r.p_err) + "," + format_double(r.bound) + "," +
                   (r.below_bound ? "true" : "false") + "," + format_double(r.eta) + ",\n";
        } else {
            std::string flat = r.error;
            for (char& c : flat) {
                if (c == ',' || c == '\n') c = ';';
            }
            csv += ",,,,," + flat + "\n";
        }
        rows.push_back({{"d", r.d},
                        {"fidelity", r.fidelity},
                        {"p_err", r.p_err},
                        {"mesd_bound", r.bound},
                        {"below_bound", r.below_bound},
                        {"eta", r.eta},
                        {"error", r.error}});
    }
    write_text_file(root / "aggregate.csv", csv);
    write_text_file(root / "aggregate.json", rows.dump(2) + "\n");

    size_t failed = 0;
    for (const auto& r : results) {
        if (!r.error.empty()) ++failed;
    }
    std::cout << "sweep finished: " << results.size() - failed << "/" << results.size()
              << " cells ok\n";
    if (failed == results.size()) {
        throw NumericalFailure("sweep: every cell failed");
    }
}

void cmd_sort_images(const std::vector<fs::path>& image_paths, const RunConfig& config,
                     bool gram_only) {
    config.validate();
    if (image_paths.size() < 2) {
        throw InvalidArgument("sort-images: need at least two images");
    }
    const Grid grid = config.geometry.grid();
    std::vector<Field> fields;
    int w = -1, h = -1;
    for (const auto& path : image_paths) {
        const GrayImage img = load_gray_image(path);
        if (w < 0) {
            w = img.width;
            h = img.height;
        } else if (img.width != w || img.height != h) {
            throw InvalidArgument("sort-images: image sizes differ (" + path.string() + ")");
        }
        fields.push_back(normalized(image_to_field(img, grid, config.pixels_are_intensity)));
    }

    fs::create_directories(config.output_dir);
    const fs::path dir = config.output_dir;

    const int d = static_cast<int>(fields.size());
    Eigen::MatrixXcd gram(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            gram(i, j) = inner_product(fields[static_cast<size_t>(i)],
                                       fields[static_cast<size_t>(j)]);

    std::string gram_csv = "i,j,re,im,fidelity\n";
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            gram_csv += std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                        format_double(gram(i, j).real()) + "," +
                        format_double(gram(i, j).imag()) + "," +
                        format_double(std::norm(gram(i, j))) + "\n";
        }
    }
    write_text_file(dir / "gram.csv", gram_csv);
    if (gram_only) {
        double mean_f = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j) mean_f += std::norm(gram(i, j));
        mean_f /= static_cast<double>(d * (d - 1));
        std::cout << "pairwise mean fidelity " << format_double(mean_f) << " over " << d
                  << " images\n";
        return;
    }

    ImageSortResult result = image_usd(fields, config.geometry, config.wfm, nullptr, 0.05,
                                       config.strict);
    require_converged_if_strict(config, result.design.report, "sort-images");
    for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";

    write_design(config, result.design, dir, config.cell_hash(d, result.mean_fidelity));
    write_text_file(dir / "outcome_raw.csv", outcome_matrix_csv(result.outcome.raw));
    write_text_file(dir / "outcome_normalized.csv",
                    outcome_matrix_csv(result.outcome.normalized));
    write_text_file(dir / "confusion.csv", outcome_matrix_csv(result.confusion));
    json report = {
        {"images", json::array()},
        {"mean_fidelity", result.mean_fidelity},
        {"eta_trace", result.design.report.eta_trace},
        {"final_eta", result.design.report.final_eta()},
        {"normalized", matrix_to_json(result.outcome.normalized)},
        {"confusion", matrix_to_json(result.confusion)},
        {"accuracy", result.accuracy},
        {"warnings", result.warnings},
    };
    for (const auto& p : image_paths) report["images"].push_back(p.string());
    write_text_file(dir / "report.json", report.dump(2) + "\n");
    std::cout << "image sorting accuracy " << format_double(result.accuracy) << "\n";
}

int run_cli_action(const std::function<void()>& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const NumericalFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

}  // namespace usdmplc
