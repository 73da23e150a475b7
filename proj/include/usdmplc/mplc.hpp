#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "usdmplc/field.hpp"

namespace usdmplc {

/// Multi-plane light converter: phase-only masks separated by free-space
/// hops. Masks are stored as real phases in (-pi, pi]; applying a mask
/// multiplies the field elementwise by exp(i*phase).
struct MPLCSystem {
    Grid grid;
    double plane_spacing = 0.0;  ///< hop between consecutive masks, meters
    double lead_in = 0.0;        ///< input plane to first mask
    double lead_out = 0.0;       ///< last mask to output plane
    std::vector<std::vector<double>> masks;

    int n_planes() const { return static_cast<int>(masks.size()); }
};

/// Zero-mask system with n_planes phase planes.
MPLCSystem make_mplc(const Grid& grid, int n_planes, double plane_spacing, double lead_in,
                     double lead_out);

enum class UpdateRule {
    AveragedOverlap,  ///< rule A: phase of the phase-referenced mode average
    Incremental,      ///< rule B: small-step form from the overlap expansion
};

enum class MaskInit {
    FlatZero,
    SeededRandom,  ///< uniform (-pi, pi] from the seed in WFMOptions
};

struct WFMOptions {
    int max_sweeps = 300;
    double tolerance = 1e-5;  ///< stop when |delta eta| per sweep drops below
    UpdateRule rule = UpdateRule::AveragedOverlap;
    MaskInit init = MaskInit::FlatZero;
    std::uint64_t seed = 0;
    std::vector<double> mode_weights;  ///< empty = uniform
    bool cache_fields = true;  ///< false recomputes plane fields from scratch (verification mode)
};

struct WFMReport {
    /// Mean overlap eta; entry 0 is the pre-training value, then one entry
    /// per executed sweep.
    std::vector<double> eta_trace;
    std::vector<double> final_overlaps;  ///< per mode |<target|U|input>|^2
    int sweeps = 0;
    bool converged = false;

    double final_eta() const { return eta_trace.empty() ? 0.0 : eta_trace.back(); }
};

/// lead_in hop, then per plane mask + hop (the last hop is lead_out).
Field apply_forward(const MPLCSystem& system, const Field& field);

/// Exact adjoint of apply_forward: conjugated masks, negated distances,
/// reversed order, so that <apply_forward(f)|g> == <f|apply_backward(g)>.
Field apply_backward(const MPLCSystem& system, const Field& field);

/// One mask update from per-mode forward fields a_i (just before the mask)
/// and backward fields b_i (the conjugate of the adjoint-propagated target
/// at the same plane; equivalently conj(target) carried back through the
/// later planes with positive hops and unconjugated masks).
///
/// Rule A sets the new mask to arg(sum_i w_i conj(a_i b_i) exp(i arg v_i))
/// with v_i = sum_x (a_i b_i exp(i phi)) dA the current per-mode overlap;
/// the exp(i arg v_i) factor references each mode's free output phase to
/// the current mask so the contributions add constructively.
/// Rule B applies phi += -sum_i w_i Im(conj(v_i) a_i b_i exp(i phi)) dA.
std::vector<double> mask_update(const std::vector<Field>& forward_fields,
                                const std::vector<Field>& backward_fields,
                                const std::vector<double>& current_mask,
                                UpdateRule rule = UpdateRule::AveragedOverlap,
                                const std::vector<double>& weights = {});

/// Iterative wavefront matching: each sweep visits planes 1..n then n..1,
/// refreshing cached plane fields incrementally. Deterministic for fixed
/// options (including the seed); mode reductions always run in ascending
/// mode order.
std::pair<MPLCSystem, WFMReport> wavefront_match(const MPLCSystem& system,
                                                 const std::vector<Field>& inputs,
                                                 const std::vector<Field>& targets,
                                                 const WFMOptions& opts = {});

/// T(j, i) = <output_j | apply_forward(system, input_i)>.
Eigen::MatrixXcd transfer_matrix(const MPLCSystem& system, const std::vector<Field>& input_basis,
                                 const std::vector<Field>& output_basis);

/// Wraps a phase to (-pi, pi].
double wrap_phase(double phi);

}  // namespace usdmplc
