#include "usdmplc/mplc.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "usdmplc/errors.hpp"
#include "usdmplc/propagation.hpp"

namespace usdmplc {

namespace {

constexpr double kPi = std::numbers::pi;

using Amps = std::vector<Complex>;

Amps cis_of(const std::vector<double>& mask) {
    Amps out(mask.size());
    for (size_t i = 0; i < mask.size(); ++i) out[i] = std::polar(1.0, mask[i]);
    return out;
}

void check_grid(const MPLCSystem& system, const Field& field, const char* where) {
    if (!(field.grid == system.grid)) {
        throw InvalidArgument(std::string(where) + ": field grid does not match the system grid");
    }
}

}  // namespace

double wrap_phase(double phi) {
    double r = std::remainder(phi, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

MPLCSystem make_mplc(const Grid& grid, int n_planes, double plane_spacing, double lead_in,
                     double lead_out) {
    if (n_planes < 1) throw InvalidArgument("make_mplc: n_planes must be >= 1");
    if (!(plane_spacing > 0.0) || !(lead_in > 0.0) || !(lead_out > 0.0)) {
        throw InvalidArgument("make_mplc: spacings must be positive");
    }
    MPLCSystem s;
    s.grid = grid;
    s.plane_spacing = plane_spacing;
    s.lead_in = lead_in;
    s.lead_out = lead_out;
    s.masks.assign(static_cast<size_t>(n_planes),
                   std::vector<double>(static_cast<size_t>(grid.pixels()), 0.0));
    return s;
}

Field apply_forward(const MPLCSystem& system, const Field& field) {
    check_grid(system, field, "apply_forward");
    const int n = system.n_planes();
    Field f = propagate(field, system.lead_in);
    for (int p = 0; p < n; ++p) {
        const auto& mask = system.masks[static_cast<size_t>(p)];
        for (size_t i = 0; i < f.amplitude.size(); ++i) {
            f.amplitude[i] *= std::polar(1.0, mask[i]);
        }
        f = propagate(f, p == n - 1 ? system.lead_out : system.plane_spacing);
    }
    return f;
}

Field apply_backward(const MPLCSystem& system, const Field& field) {
    check_grid(system, field, "apply_backward");
    const int n = system.n_planes();
    Field f = propagate(field, -system.lead_out);
    for (int p = n - 1; p >= 0; --p) {
        const auto& mask = system.masks[static_cast<size_t>(p)];
        for (size_t i = 0; i < f.amplitude.size(); ++i) {
            f.amplitude[i] *= std::polar(1.0, -mask[i]);
        }
        f = propagate(f, p == 0 ? -system.lead_in : -system.plane_spacing);
    }
    return f;
}

namespace {

// Core of mask_update on raw amplitude buffers; `area` is pitch^2.
std::vector<double> update_mask_core(const std::vector<const Amps*>& fwd,
                                     const std::vector<const Amps*>& bwd,
                                     const std::vector<double>& current, double area,
                                     UpdateRule rule, const std::vector<double>& weights) {
    const size_t n_modes = fwd.size();
    const size_t n_px = current.size();
    const Amps cis = cis_of(current);

    // Per-mode overlap v_i at this plane (equals the end-to-end overlap).
    std::vector<Complex> v(n_modes, Complex{0.0, 0.0});
    for (size_t m = 0; m < n_modes; ++m) {
        Complex acc{0.0, 0.0};
        const Amps& a = *fwd[m];
        const Amps& b = *bwd[m];
        for (size_t i = 0; i < n_px; ++i) acc += a[i] * b[i] * cis[i];
        v[m] = acc * area;
    }

    std::vector<double> next(n_px, 0.0);
    if (rule == UpdateRule::AveragedOverlap) {
        std::vector<Complex> align(n_modes);
        for (size_t m = 0; m < n_modes; ++m) {
            const double mag = std::abs(v[m]);
            align[m] = mag > 0.0 ? std::conj(v[m]) / mag : Complex{1.0, 0.0};
        }
        for (size_t i = 0; i < n_px; ++i) {
            Complex acc{0.0, 0.0};
            for (size_t m = 0; m < n_modes; ++m) {
                const Complex ab = (*fwd[m])[i] * (*bwd[m])[i];
                // conj(ab * conj(v)/|v|) == conj(ab) * exp(i arg v)
                acc += weights[m] * std::conj(ab * align[m]);
            }
            next[i] = acc == Complex{0.0, 0.0} ? 0.0 : wrap_phase(std::arg(acc));
        }
    } else {
        for (size_t i = 0; i < n_px; ++i) {
            double delta = 0.0;
            for (size_t m = 0; m < n_modes; ++m) {
                const Complex ab = (*fwd[m])[i] * (*bwd[m])[i];
                delta -= weights[m] * std::imag(std::conj(v[m]) * ab * cis[i] * area);
            }
            next[i] = wrap_phase(current[i] + delta);
        }
    }
    return next;
}

std::vector<double> resolve_weights(size_t n_modes, const std::vector<double>& weights,
                                    const char* where) {
    if (weights.empty()) return std::vector<double>(n_modes, 1.0);
    if (weights.size() != n_modes) {
        throw InvalidArgument(std::string(where) + ": weight count does not match mode count");
    }
    return weights;
}

}  // namespace

std::vector<double> mask_update(const std::vector<Field>& forward_fields,
                                const std::vector<Field>& backward_fields,
                                const std::vector<double>& current_mask, UpdateRule rule,
                                const std::vector<double>& weights) {
    if (forward_fields.empty()) throw InvalidArgument("mask_update: empty mode list");
    if (forward_fields.size() != backward_fields.size()) {
        throw InvalidArgument("mask_update: forward/backward mode counts differ");
    }
    const Grid& grid = forward_fields.front().grid;
    if (current_mask.size() != static_cast<size_t>(grid.pixels())) {
        throw InvalidArgument("mask_update: mask size does not match the grid");
    }
    std::vector<const Amps*> fwd, bwd;
    for (size_t m = 0; m < forward_fields.size(); ++m) {
        if (!(forward_fields[m].grid == grid) || !(backward_fields[m].grid == grid)) {
            throw InvalidArgument("mask_update: fields live on different grids");
        }
        fwd.push_back(&forward_fields[m].amplitude);
        bwd.push_back(&backward_fields[m].amplitude);
    }
    const auto w = resolve_weights(forward_fields.size(), weights, "mask_update");
    return update_mask_core(fwd, bwd, current_mask, grid.cell_area(), rule, w);
}

namespace {

// Training state: per-plane unit-modulus mask factors plus cached per-mode
// plane fields. a[m][p] is mode m just before mask p; b[m][p] is the
// conjugate backward wave at the same plane.
struct Trainer {
    const Grid grid;
    const double spacing, lead_in, lead_out;
    const int n_planes;
    const size_t n_modes;
    const double area;

    std::vector<std::vector<double>> masks;
    std::vector<Amps> cis;

    std::vector<Amps> inputs, conj_targets;
    const std::vector<Field>& targets;

    std::vector<std::vector<Amps>> a, b;

    Trainer(const MPLCSystem& sys, const std::vector<Field>& ins, const std::vector<Field>& tgts)
        : grid(sys.grid),
          spacing(sys.plane_spacing),
          lead_in(sys.lead_in),
          lead_out(sys.lead_out),
          n_planes(sys.n_planes()),
          n_modes(ins.size()),
          area(sys.grid.cell_area()),
          masks(sys.masks),
          targets(tgts) {
        for (const auto& m : masks) cis.push_back(cis_of(m));
        for (const auto& f : ins) inputs.push_back(f.amplitude);
        for (const auto& f : tgts) {
            Amps c(f.amplitude.size());
            for (size_t i = 0; i < c.size(); ++i) c[i] = std::conj(f.amplitude[i]);
            conj_targets.push_back(std::move(c));
        }
        a.assign(n_modes, std::vector<Amps>(static_cast<size_t>(n_planes)));
        b.assign(n_modes, std::vector<Amps>(static_cast<size_t>(n_planes)));
    }

    Amps prop(const Amps& src, double dist) const {
        Field f(grid);
        f.amplitude = src;
        return propagate(f, dist).amplitude;
    }

    Amps masked(const Amps& src, int plane) const {
        Amps out(src.size());
        const Amps& c = cis[static_cast<size_t>(plane)];
        for (size_t i = 0; i < src.size(); ++i) out[i] = src[i] * c[i];
        return out;
    }

    void set_mask(int p, std::vector<double> next) {
        cis[static_cast<size_t>(p)] = cis_of(next);
        masks[static_cast<size_t>(p)] = std::move(next);
    }

    // Fill a[m][p] for all planes; returns the output-plane fields.
    std::vector<Amps> fill_forward() {
        std::vector<Amps> outs(n_modes);
        for (size_t m = 0; m < n_modes; ++m) {
            Amps cur = prop(inputs[m], lead_in);
            for (int p = 0; p < n_planes; ++p) {
                a[m][static_cast<size_t>(p)] = cur;
                cur = prop(masked(cur, p), p == n_planes - 1 ? lead_out : spacing);
            }
            outs[m] = std::move(cur);
        }
        return outs;
    }

    // Fill b[m][p] for all planes from the current masks.
    void fill_backward() {
        for (size_t m = 0; m < n_modes; ++m) {
            Amps cur = prop(conj_targets[m], lead_out);
            for (int p = n_planes - 1; p >= 0; --p) {
                b[m][static_cast<size_t>(p)] = cur;
                if (p > 0) cur = prop(masked(cur, p), spacing);
            }
        }
    }

    // Recompute a[m][p] (cache-off verification path).
    void fresh_a(int p) {
        for (size_t m = 0; m < n_modes; ++m) {
            Amps cur = prop(inputs[m], lead_in);
            for (int q = 0; q < p; ++q) cur = prop(masked(cur, q), spacing);
            a[m][static_cast<size_t>(p)] = std::move(cur);
        }
    }

    void fresh_b(int p) {
        for (size_t m = 0; m < n_modes; ++m) {
            Amps cur = prop(conj_targets[m], lead_out);
            for (int q = n_planes - 1; q > p; --q) cur = prop(masked(cur, q), spacing);
            b[m][static_cast<size_t>(p)] = std::move(cur);
        }
    }

    void update_plane(int p, UpdateRule rule, const std::vector<double>& w) {
        std::vector<const Amps*> fa, fb;
        for (size_t m = 0; m < n_modes; ++m) {
            fa.push_back(&a[m][static_cast<size_t>(p)]);
            fb.push_back(&b[m][static_cast<size_t>(p)]);
        }
        set_mask(p, update_mask_core(fa, fb, masks[static_cast<size_t>(p)], area, rule, w));
    }

    // Mean overlap from output-plane fields.
    std::pair<double, std::vector<double>> eta_of(const std::vector<Amps>& outs) const {
        std::vector<double> per_mode(n_modes);
        double mean = 0.0;
        for (size_t m = 0; m < n_modes; ++m) {
            Complex acc{0.0, 0.0};
            const Amps& t = conj_targets[m];
            for (size_t i = 0; i < t.size(); ++i) acc += t[i] * outs[m][i];
            per_mode[m] = std::norm(acc * area);
            mean += per_mode[m];
        }
        return {mean / static_cast<double>(n_modes), per_mode};
    }
};

}  // namespace

std::pair<MPLCSystem, WFMReport> wavefront_match(const MPLCSystem& system,
                                                 const std::vector<Field>& inputs,
                                                 const std::vector<Field>& targets,
                                                 const WFMOptions& opts) {
    if (inputs.empty() || inputs.size() != targets.size()) {
        throw InvalidArgument("wavefront_match: need equally many inputs and targets (>= 1)");
    }
    if (opts.max_sweeps < 1) throw InvalidArgument("wavefront_match: max_sweeps must be >= 1");
    if (!(opts.tolerance > 0.0)) throw InvalidArgument("wavefront_match: tolerance must be > 0");
    for (const auto& f : inputs) {
        check_grid(system, f, "wavefront_match");
        if (std::abs(field_norm(f) - 1.0) > 1e-3) {
            throw InvalidArgument("wavefront_match: inputs must be normalized");
        }
    }
    for (const auto& f : targets) {
        check_grid(system, f, "wavefront_match");
        if (std::abs(field_norm(f) - 1.0) > 1e-3) {
            throw InvalidArgument("wavefront_match: targets must be normalized");
        }
    }
    const auto weights = resolve_weights(inputs.size(), opts.mode_weights, "wavefront_match");

    MPLCSystem start = system;
    if (opts.init == MaskInit::SeededRandom) {
        std::mt19937_64 rng(opts.seed);
        std::uniform_real_distribution<double> dist(-kPi, kPi);
        for (auto& mask : start.masks) {
            for (double& phi : mask) phi = wrap_phase(dist(rng));
        }
    } else {
        for (auto& mask : start.masks) std::fill(mask.begin(), mask.end(), 0.0);
    }

    Trainer tr(start, inputs, targets);
    WFMReport report;

    auto outs = tr.fill_forward();
    auto [eta, per_mode] = tr.eta_of(outs);
    report.eta_trace.push_back(eta);
    report.final_overlaps = per_mode;

    const int n = tr.n_planes;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        // Forward half: masks 1..n. a[] is current from the previous
        // evaluation pass; b[] must reflect the masks behind each plane.
        tr.fill_backward();
        for (int p = 0; p < n; ++p) {
            if (!opts.cache_fields) {
                tr.fresh_a(p);
                tr.fresh_b(p);
            }
            tr.update_plane(p, opts.rule, weights);
            if (p < n - 1) {
                for (size_t m = 0; m < tr.n_modes; ++m) {
                    tr.a[m][static_cast<size_t>(p + 1)] =
                        tr.prop(tr.masked(tr.a[m][static_cast<size_t>(p)], p), tr.spacing);
                }
            }
        }
        // Backward half: masks n..1, carrying b down incrementally.
        for (int p = n - 1; p >= 0; --p) {
            if (p == n - 1) {
                for (size_t m = 0; m < tr.n_modes; ++m) {
                    tr.b[m][static_cast<size_t>(p)] = tr.prop(tr.conj_targets[m], tr.lead_out);
                }
            }
            if (!opts.cache_fields) {
                tr.fresh_a(p);
                tr.fresh_b(p);
            }
            tr.update_plane(p, opts.rule, weights);
            if (p > 0) {
                for (size_t m = 0; m < tr.n_modes; ++m) {
                    tr.b[m][static_cast<size_t>(p - 1)] =
                        tr.prop(tr.masked(tr.b[m][static_cast<size_t>(p)], p), tr.spacing);
                }
            }
        }

        outs = tr.fill_forward();  // also refreshes a[] for the next sweep
        auto [eta_s, per_mode_s] = tr.eta_of(outs);
        report.eta_trace.push_back(eta_s);
        report.final_overlaps = per_mode_s;
        report.sweeps = sweep + 1;
        const double delta = eta_s - report.eta_trace[report.eta_trace.size() - 2];
        if (std::abs(delta) < opts.tolerance) {
            report.converged = true;
            break;
        }
    }

    MPLCSystem trained = system;
    trained.masks = tr.masks;
    return {std::move(trained), std::move(report)};
}

Eigen::MatrixXcd transfer_matrix(const MPLCSystem& system, const std::vector<Field>& input_basis,
                                 const std::vector<Field>& output_basis) {
    if (input_basis.empty() || output_basis.empty()) {
        throw InvalidArgument("transfer_matrix: empty basis");
    }
    Eigen::MatrixXcd T(output_basis.size(), input_basis.size());
    for (size_t i = 0; i < input_basis.size(); ++i) {
        const Field out = apply_forward(system, input_basis[i]);
        for (size_t j = 0; j < output_basis.size(); ++j) {
            T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                inner_product(output_basis[j], out);
        }
    }
    return T;
}

}  // namespace usdmplc
