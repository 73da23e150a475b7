#pragma once

#include <vector>

#include <Eigen/Core>

#include "usdmplc/modes.hpp"

namespace usdmplc {

/// Set of d symmetric unit states in d dimensions with a common pairwise
/// overlap beta = cos^2(theta) - sin^2(theta)/(d-1). The stored `fidelity`
/// is the squared overlap |beta|^2. Note that the discrimination
/// probability of the measurement built from such a set is 1 - |beta|
/// (see usd_measurement), so the operational "success = 1 - F" convention
/// used by the experiment layer identifies its F with |beta|, not |beta|^2.
struct SymmetricStateSet {
    int d = 0;
    double theta = 0.0;             ///< mixing angle, radians
    std::vector<StateVec> states;   ///< d unit vectors of length d
    Complex beta{0.0, 0.0};         ///< common pairwise overlap
    double fidelity = 0.0;          ///< |beta|^2
};

/// d+1 orthonormal measurement vectors in the extended space: D_1..D_d
/// discriminate the inputs (never clicking for the wrong one) and
/// `ambiguous` collects the inconclusive mass.
struct USDMeasurement {
    int d = 0;
    std::vector<StateVec> vectors;  ///< d unit vectors of length d+1
    StateVec ambiguous;             ///< unit vector of length d+1
    double alpha = 0.0;             ///< discrimination amplitude <D_i|psi_i>
};

/// d real unit vectors in d-1 dimensions with all pairwise overlaps equal
/// to -1/(d-1), built by the lower-triangular casework recurrence.
std::vector<StateVec> symmetric_frame(int d);

/// Mixes the symmetric frame into an extra coordinate:
/// psi_i = sin(theta) * frame_i (+) cos(theta) * e_d, theta in [0, pi/2].
SymmetricStateSet symmetric_states(int d, double theta);

enum class OverlapBranch {
    Positive,  ///< beta = +sqrt(F): overlapping, "close together" states
    Negative,  ///< beta = -sqrt(F); feasible only while sqrt(F) <= 1/(d-1)
};

/// Inverts beta(theta) = cos^2(theta) - sin^2(theta)/(d-1) for the theta
/// producing squared overlap F on the chosen branch.
double theta_for_fidelity(int d, double fidelity, OverlapBranch branch = OverlapBranch::Positive);

/// Unit vector orthogonal to every state but states[i], with the phase
/// fixed so that <perp|states[i]> is real and positive. Computed from the
/// SVD null space of the other states stacked as a matrix; singular values
/// below 1e-10 of the largest mean a degenerate set.
StateVec orthocomplement(const std::vector<StateVec>& states, int i);

/// The extended-space USD measurement:
/// D_i = perp_i (+) sqrt(-<perp_1|perp_2>) e_{d+1}, normalized, and the
/// ambiguous vector obtained by orthonormalizing e_{d+1} against {D_i}.
/// Requires the cross-overlap <perp_1|perp_2> to be real and <= 0, which
/// holds for symmetric sets with beta >= 0.
USDMeasurement usd_measurement(const SymmetricStateSet& set);

/// Detection-probability matrix of the ideal measurement: d rows (inputs)
/// by d+1 columns (outcomes 1..d then the ambiguous one). Row i carries
/// the discrimination probability 1 - |beta| on the diagonal and |beta|
/// in the ambiguous column; rows sum to 1.
struct OutcomeMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> values;  ///< row-major
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;

    OutcomeMatrix() = default;
    OutcomeMatrix(int r, int c) : rows(r), cols(c), values(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return values[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return values[static_cast<size_t>(i) * cols + j]; }
};

OutcomeMatrix ideal_outcome_matrix(const SymmetricStateSet& set);

/// Minimum-error bound 0.5 * (1 - sqrt(1 - F)) for uniform-fidelity sets.
double mesd_bound(double fidelity);

}  // namespace usdmplc
