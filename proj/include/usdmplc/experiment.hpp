#pragma once

#include <optional>
#include <string>
#include <vector>

#include "usdmplc/mplc.hpp"
#include "usdmplc/usd_states.hpp"

namespace usdmplc {

/// Experiment geometry. Defaults mirror the reference device: four phase
/// planes with 17 mm hops at 633 nm, simulated on a 256x256 grid of 8 um
/// pixels. Waists and the output circle radius are free design parameters.
struct Geometry {
    int n_planes = 4;
    double plane_spacing = 0.017;
    double lead_in = 0.017;
    double lead_out = 0.017;
    double wavelength = 633e-9;
    int nx = 256;
    int ny = 256;
    double pitch = 8e-6;
    double hg_waist = 150e-6;
    double spot_waist = 60e-6;
    double spot_radius = 450e-6;
    double detector_radius_factor = 1.5;  ///< disk radius in spot waists

    Grid grid() const { return make_grid(nx, ny, pitch, wavelength); }
};

/// One trained sorter: the d input fields, the d+1 output spots (ambiguous
/// last), the per-input training targets, and the trained mask stack.
///
/// `fidelity` is the common pairwise overlap magnitude of the prepared
/// states, so the ideal sorter discriminates with probability 1 - fidelity
/// and routes fidelity into the ambiguous port. For image sorters it is
/// instead the measured mean pairwise |<f_i|f_j>|^2 of the images.
struct SorterDesign {
    int d = 0;
    double fidelity = 0.0;
    double theta = 0.0;  ///< mixing angle of the state set (0 for images)
    ModeBasis basis;     ///< HG encoding basis; empty for image sorters
    std::vector<Field> inputs;
    std::vector<Field> spot_fields;    ///< d+1 spots, ambiguous last
    std::vector<Field> train_targets;  ///< d combined target fields
    std::vector<Point2> spot_centers;  ///< snapped to grid pixels
    MPLCSystem system;
    WFMReport report;
};

/// Camera model: one integration disk per outcome, pixel membership
/// precomputed. Disks must be pairwise disjoint.
struct DetectorLayout {
    std::vector<Point2> centers;
    double radius = 0.0;
    std::vector<std::vector<int>> membership;  ///< pixel indices per outcome
};

struct SimulatedOutcome {
    OutcomeMatrix raw;         ///< integrated power per disk
    OutcomeMatrix normalized;  ///< rows scaled to unit total detected power
};

/// Everything in build_sorter except the training: symmetric states over
/// the HG family m+n = d as inputs, snapped spots, training targets
/// sqrt(1-F) spot_i + sqrt(F) spot_? (common phase zero), zero masks.
SorterDesign prepare_sorter(int d, double fidelity, const Geometry& geometry);

/// Builds and trains a USD sorter for d states at the given fidelity
/// (pairwise overlap; states are prepared via theta_for_fidelity(d, F^2)).
SorterDesign build_sorter(int d, double fidelity, const Geometry& geometry,
                          const WFMOptions& wfm_opts);

/// Detector disks at the snapped spot positions for `outcomes` outputs.
DetectorLayout make_detector(const Geometry& geometry, int outcomes);

/// Forward-propagates each input through the trained stack and integrates
/// |field|^2 over each outcome disk.
SimulatedOutcome simulate_outcomes(const SorterDesign& design, const DetectorLayout& detector);

/// Detector sanity path: injects the analytic target fields directly,
/// bypassing the mask stack.
SimulatedOutcome simulate_ideal(const SorterDesign& design, const DetectorLayout& detector);

/// Per-outcome loss vector between a measured matrix E and a reference M:
/// v_k = E_kk / M_kk for the d discrimination columns and the ratio of
/// ambiguous-column sums for the last entry.
std::vector<double> correction_vector(const OutcomeMatrix& E, const OutcomeMatrix& M);

/// Column-wise application M'_ij = M_ij * v_j.
OutcomeMatrix apply_correction(const OutcomeMatrix& M, const std::vector<double>& v);

/// Drops the ambiguous column and renormalizes each row.
OutcomeMatrix confusion_matrix(const OutcomeMatrix& m);

struct ErrorProbability {
    std::vector<double> per_row;
    double mean = 0.0;
};

/// p_err(i) = sum of row i over the wrong discrimination columns (ambiguous
/// mass does not count as an error). Expects row-normalized d x (d+1).
ErrorProbability error_probability(const OutcomeMatrix& m);

/// Mean diagonal of a confusion matrix.
double classification_accuracy(const OutcomeMatrix& confusion);

struct SorterRunSummary {
    int d = 0;
    double fidelity = 0.0;
    double eta = 0.0;
    OutcomeMatrix normalized;
};

struct MesdComparisonRow {
    int d = 0;
    double fidelity = 0.0;
    double p_err = 0.0;
    double mesd_bound = 0.0;
    bool below_bound = false;
    double eta = 0.0;
};

std::vector<MesdComparisonRow> usd_vs_mesd_report(const std::vector<SorterRunSummary>& runs);

struct ImageSortResult {
    Eigen::MatrixXcd gram;        ///< of the normalized input images
    double mean_fidelity = 0.0;   ///< mean off-diagonal |gram|^2
    Field auxiliary;              ///< extra direction orthonormal to the images
    SorterDesign design;
    SimulatedOutcome outcome;
    OutcomeMatrix confusion;
    double accuracy = 0.0;
    std::vector<std::string> warnings;
};

/// USD sorting of arbitrary (near-uniformly overlapping) images: builds the
/// discrimination structure inside the spanned subspace plus one auxiliary
/// direction, trains images -> spots(+?), and reports confusion accuracy.
/// `aux` overrides the auxiliary direction seed (default: fundamental
/// Gaussian of the geometry's HG waist, orthonormalized against the images).
ImageSortResult image_usd(const std::vector<Field>& images, const Geometry& geometry,
                          const WFMOptions& wfm_opts, const Field* aux = nullptr,
                          double uniformity_tolerance = 0.05, bool strict = false);

}  // namespace usdmplc
