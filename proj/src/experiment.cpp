#include "usdmplc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "usdmplc/errors.hpp"
#include "usdmplc/propagation.hpp"

namespace usdmplc {

namespace {

Point2 snap_to_grid(const Grid& grid, Point2 p) {
    // Pixel coordinates are integer multiples of the pitch. Snapping every
    // spot center to a pixel keeps the disk pixel pattern identical across
    // outcomes, so disk capture fractions cancel exactly under row
    // normalization.
    return {std::round(p.x / grid.pitch) * grid.pitch, std::round(p.y / grid.pitch) * grid.pitch};
}

std::vector<std::string> outcome_col_labels(int d) {
    std::vector<std::string> labels;
    for (int j = 0; j < d; ++j) labels.push_back(std::to_string(j + 1));
    labels.push_back("?");
    return labels;
}

OutcomeMatrix integrate_rows(const std::vector<Field>& fields, const DetectorLayout& detector,
                             const std::vector<std::string>& row_labels) {
    const int d = static_cast<int>(fields.size());
    const int outcomes = static_cast<int>(detector.membership.size());
    OutcomeMatrix m(d, outcomes);
    m.row_labels = row_labels;
    m.col_labels = outcome_col_labels(outcomes - 1);
    for (int i = 0; i < d; ++i) {
        const auto& amp = fields[static_cast<size_t>(i)].amplitude;
        const double area = fields[static_cast<size_t>(i)].grid.cell_area();
        for (int k = 0; k < outcomes; ++k) {
            double acc = 0.0;
            for (int px : detector.membership[static_cast<size_t>(k)]) {
                acc += std::norm(amp[static_cast<size_t>(px)]);
            }
            m.at(i, k) = acc * area;
        }
    }
    return m;
}

OutcomeMatrix row_normalized(const OutcomeMatrix& raw) {
    OutcomeMatrix out = raw;
    for (int i = 0; i < raw.rows; ++i) {
        double total = 0.0;
        for (int j = 0; j < raw.cols; ++j) total += raw.at(i, j);
        if (!(total > 0.0)) {
            throw UndefinedRow("simulate: no detected power for input " + std::to_string(i + 1));
        }
        for (int j = 0; j < raw.cols; ++j) out.at(i, j) = raw.at(i, j) / total;
    }
    return out;
}

std::vector<std::string> state_row_labels(int d) {
    std::vector<std::string> labels;
    for (int i = 0; i < d; ++i) labels.push_back("psi_" + std::to_string(i + 1));
    return labels;
}

}  // namespace

SorterDesign prepare_sorter(int d, double fidelity, const Geometry& geometry) {
    if (d < 2 || d > 8) throw InvalidArgument("build_sorter: dimension must lie in [2, 8]");
    if (!(fidelity >= 0.0 && fidelity < 1.0)) {
        throw InvalidArgument("build_sorter: fidelity must lie in [0, 1)");
    }
    const Grid grid = geometry.grid();

    SorterDesign design;
    design.d = d;
    design.fidelity = fidelity;
    // fidelity is the pairwise overlap; theta_for_fidelity takes |beta|^2.
    design.theta = theta_for_fidelity(d, fidelity * fidelity, OverlapBranch::Positive);
    const SymmetricStateSet set = symmetric_states(d, design.theta);

    design.basis = hg_family(grid, d, geometry.hg_waist);
    for (int i = 0; i < d; ++i) {
        StateVec coeffs = StateVec::Zero(d + 1);
        coeffs.head(d) = set.states[static_cast<size_t>(i)];
        design.inputs.push_back(normalized(superpose(coeffs, design.basis)));
    }

    const auto layout = spot_layout(d + 1, geometry.spot_radius);
    for (const Point2& p : layout) {
        const Point2 c = snap_to_grid(grid, p);
        design.spot_centers.push_back(c);
        design.spot_fields.push_back(gaussian_spot(grid, geometry.spot_waist, c));
    }

    const double succ_amp = std::sqrt(1.0 - fidelity);
    const double amb_amp = std::sqrt(fidelity);
    for (int i = 0; i < d; ++i) {
        Field t(grid);
        const auto& spot_i = design.spot_fields[static_cast<size_t>(i)].amplitude;
        const auto& spot_q = design.spot_fields[static_cast<size_t>(d)].amplitude;
        for (size_t px = 0; px < t.amplitude.size(); ++px) {
            t.amplitude[px] = succ_amp * spot_i[px] + amb_amp * spot_q[px];
        }
        design.train_targets.push_back(normalized(t));
    }

    design.system = make_mplc(grid, geometry.n_planes, geometry.plane_spacing, geometry.lead_in,
                              geometry.lead_out);
    return design;
}

SorterDesign build_sorter(int d, double fidelity, const Geometry& geometry,
                          const WFMOptions& wfm_opts) {
    SorterDesign design = prepare_sorter(d, fidelity, geometry);
    auto [trained, report] =
        wavefront_match(design.system, design.inputs, design.train_targets, wfm_opts);
    design.system = std::move(trained);
    design.report = std::move(report);
    return design;
}

DetectorLayout make_detector(const Geometry& geometry, int outcomes) {
    if (outcomes < 1) throw InvalidArgument("make_detector: need at least one outcome");
    const Grid grid = geometry.grid();
    DetectorLayout det;
    det.radius = geometry.detector_radius_factor * geometry.spot_waist;
    for (const Point2& p : spot_layout(outcomes, geometry.spot_radius)) {
        det.centers.push_back(snap_to_grid(grid, p));
    }
    for (size_t i = 0; i < det.centers.size(); ++i) {
        for (size_t j = i + 1; j < det.centers.size(); ++j) {
            const double dx = det.centers[i].x - det.centers[j].x;
            const double dy = det.centers[i].y - det.centers[j].y;
            if (std::hypot(dx, dy) <= 2.0 * det.radius) {
                throw InvalidArgument("make_detector: integration disks overlap");
            }
        }
    }
    const double r2 = det.radius * det.radius;
    for (const Point2& c : det.centers) {
        std::vector<int> member;
        for (int iy = 0; iy < grid.ny; ++iy) {
            const double dy = grid.y(iy) - c.y;
            for (int ix = 0; ix < grid.nx; ++ix) {
                const double dx = grid.x(ix) - c.x;
                if (dx * dx + dy * dy <= r2) member.push_back(iy * grid.nx + ix);
            }
        }
        det.membership.push_back(std::move(member));
    }
    return det;
}

SimulatedOutcome simulate_outcomes(const SorterDesign& design, const DetectorLayout& detector) {
    if (detector.membership.size() != static_cast<size_t>(design.d) + 1) {
        throw InvalidArgument("simulate_outcomes: detector outcome count must be d+1");
    }
    std::vector<Field> outputs;
    outputs.reserve(design.inputs.size());
    for (const Field& in : design.inputs) {
        outputs.push_back(apply_forward(design.system, in));
    }
    SimulatedOutcome result;
    result.raw = integrate_rows(outputs, detector, state_row_labels(design.d));
    result.normalized = row_normalized(result.raw);
    return result;
}

SimulatedOutcome simulate_ideal(const SorterDesign& design, const DetectorLayout& detector) {
    if (detector.membership.size() != static_cast<size_t>(design.d) + 1) {
        throw InvalidArgument("simulate_ideal: detector outcome count must be d+1");
    }
    SimulatedOutcome result;
    result.raw = integrate_rows(design.train_targets, detector, state_row_labels(design.d));
    result.normalized = row_normalized(result.raw);
    return result;
}

std::vector<double> correction_vector(const OutcomeMatrix& E, const OutcomeMatrix& M) {
    if (E.rows != M.rows || E.cols != M.cols) {
        throw InvalidArgument("correction_vector: matrices must share a shape");
    }
    if (E.cols != E.rows + 1) {
        throw InvalidArgument("correction_vector: expected d x (d+1) outcome matrices");
    }
    const int d = E.rows;
    std::vector<double> v(static_cast<size_t>(d) + 1, 1.0);
    for (int k = 0; k < d; ++k) {
        if (M.at(k, k) == 0.0) {
            throw InvalidArgument("correction_vector: zero reference diagonal entry");
        }
        v[static_cast<size_t>(k)] = E.at(k, k) / M.at(k, k);
    }
    double e_amb = 0.0, m_amb = 0.0;
    for (int i = 0; i < d; ++i) {
        e_amb += E.at(i, d);
        m_amb += M.at(i, d);
    }
    if (m_amb == 0.0) throw InvalidArgument("correction_vector: zero reference ambiguous column");
    v[static_cast<size_t>(d)] = e_amb / m_amb;
    return v;
}

OutcomeMatrix apply_correction(const OutcomeMatrix& M, const std::vector<double>& v) {
    if (v.size() != static_cast<size_t>(M.cols)) {
        throw InvalidArgument("apply_correction: vector length must match column count");
    }
    OutcomeMatrix out = M;
    for (int i = 0; i < M.rows; ++i) {
        for (int j = 0; j < M.cols; ++j) out.at(i, j) = M.at(i, j) * v[static_cast<size_t>(j)];
    }
    return out;
}

OutcomeMatrix confusion_matrix(const OutcomeMatrix& m) {
    if (m.cols != m.rows + 1) {
        throw InvalidArgument("confusion_matrix: expected d x (d+1) outcome matrix");
    }
    const int d = m.rows;
    OutcomeMatrix out(d, d);
    out.row_labels = m.row_labels;
    out.col_labels.assign(m.col_labels.begin(),
                          m.col_labels.empty() ? m.col_labels.end() : m.col_labels.end() - 1);
    for (int i = 0; i < d; ++i) {
        double s = 0.0;
        for (int j = 0; j < d; ++j) s += m.at(i, j);
        if (!(s > 0.0)) {
            throw UndefinedRow("confusion_matrix: row " + std::to_string(i + 1) +
                               " is entirely ambiguous");
        }
        for (int j = 0; j < d; ++j) out.at(i, j) = m.at(i, j) / s;
    }
    return out;
}

ErrorProbability error_probability(const OutcomeMatrix& m) {
    if (m.cols != m.rows + 1) {
        throw InvalidArgument("error_probability: expected d x (d+1) outcome matrix");
    }
    ErrorProbability e;
    for (int i = 0; i < m.rows; ++i) {
        double p = 0.0;
        for (int j = 0; j < m.rows; ++j) {
            if (j != i) p += m.at(i, j);
        }
        e.per_row.push_back(p);
        e.mean += p;
    }
    e.mean /= static_cast<double>(m.rows);
    return e;
}

double classification_accuracy(const OutcomeMatrix& confusion) {
    if (confusion.rows != confusion.cols) {
        throw InvalidArgument("classification_accuracy: expected a square confusion matrix");
    }
    double acc = 0.0;
    for (int i = 0; i < confusion.rows; ++i) acc += confusion.at(i, i);
    return acc / static_cast<double>(confusion.rows);
}

std::vector<MesdComparisonRow> usd_vs_mesd_report(const std::vector<SorterRunSummary>& runs) {
    if (runs.empty()) throw InvalidArgument("usd_vs_mesd_report: need at least one run");
    std::vector<MesdComparisonRow> rows;
    rows.reserve(runs.size());
    for (const auto& run : runs) {
        MesdComparisonRow row;
        row.d = run.d;
        row.fidelity = run.fidelity;
        row.p_err = error_probability(run.normalized).mean;
        row.mesd_bound = mesd_bound(run.fidelity);
        row.below_bound = row.p_err < row.mesd_bound;
        row.eta = run.eta;
        rows.push_back(row);
    }
    return rows;
}

ImageSortResult image_usd(const std::vector<Field>& images, const Geometry& geometry,
                          const WFMOptions& wfm_opts, const Field* aux,
                          double uniformity_tolerance, bool strict) {
    const int d = static_cast<int>(images.size());
    if (d < 2) throw InvalidArgument("image_usd: need at least two images");
    const Grid grid = geometry.grid();
    for (const Field& f : images) {
        if (!(f.grid == grid)) throw InvalidArgument("image_usd: image grid mismatch");
    }

    ImageSortResult result;
    std::vector<Field> norm_images;
    norm_images.reserve(images.size());
    for (const Field& f : images) norm_images.push_back(normalized(f));

    Eigen::MatrixXcd G(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            G(i, j) = inner_product(norm_images[static_cast<size_t>(i)],
                                    norm_images[static_cast<size_t>(j)]);
        }
    }
    result.gram = G;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
    const auto& evals = eig.eigenvalues();
    if (evals(0) < 1e-10 * evals(d - 1)) {
        throw DegenerateInput("image_usd: image set is rank-deficient");
    }

    double mean_f = 0.0, max_dev = 0.0;
    {
        std::vector<double> offdiag;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                if (i != j) offdiag.push_back(std::norm(G(i, j)));
        mean_f = std::accumulate(offdiag.begin(), offdiag.end(), 0.0) /
                 static_cast<double>(offdiag.size());
        for (double f : offdiag) max_dev = std::max(max_dev, std::abs(f - mean_f));
    }
    result.mean_fidelity = mean_f;
    if (max_dev > uniformity_tolerance) {
        const std::string msg = "image_usd: pairwise fidelities deviate up to " +
                                std::to_string(max_dev) + " from their mean";
        if (strict) throw InvalidArgument(msg);
        result.warnings.push_back(msg);
    }

    // Abstract coordinates: psi_i = column i of the Hermitian square root
    // of the Gram matrix, so <psi_i|psi_j> = G_ij.
    Eigen::MatrixXcd sqrtG = eig.operatorSqrt();
    std::vector<StateVec> psi;
    for (int i = 0; i < d; ++i) psi.push_back(sqrtG.col(i));

    std::vector<StateVec> perps;
    for (int i = 0; i < d; ++i) perps.push_back(orthocomplement(psi, i));

    double cross_mean = 0.0, cross_imag = 0.0;
    int pairs = 0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            const Complex c = perps[static_cast<size_t>(i)].dot(perps[static_cast<size_t>(j)]);
            cross_mean += c.real();
            cross_imag = std::max(cross_imag, std::abs(c.imag()));
            ++pairs;
        }
    }
    cross_mean /= static_cast<double>(pairs);
    if (cross_mean > 1e-9) {
        throw ConstructionViolated("image_usd: mean orthocomplement cross-overlap is positive");
    }
    if (cross_imag > 1e-6) {
        result.warnings.push_back("image_usd: orthocomplement cross-overlaps have imaginary part");
    }
    const double lift = std::sqrt(std::max(0.0, -cross_mean));

    Eigen::MatrixXcd D(d + 1, d);
    for (int i = 0; i < d; ++i) {
        StateVec v = StateVec::Zero(d + 1);
        v.head(d) = perps[static_cast<size_t>(i)];
        v[d] = lift;
        D.col(i) = v.normalized();
    }
    // Symmetric orthonormalization absorbs the slight non-orthogonality a
    // non-uniform image set leaves in the D vectors.
    {
        Eigen::MatrixXcd S = D.adjoint() * D;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S);
        Eigen::VectorXd inv_sqrt = es.eigenvalues().cwiseMax(1e-30).cwiseSqrt().cwiseInverse();
        D = D * (es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint());
    }

    StateVec q = StateVec::Zero(d + 1);
    q[d] = 1.0;
    q -= D * (D.adjoint() * q);
    if (q.norm() < 1e-10) {
        q = StateVec::Zero(d + 1);
        q.head(d) = psi[0];
        q -= D * (D.adjoint() * q);
        if (q.norm() < 1e-10) {
            throw ConstructionViolated("image_usd: cannot complete the ambiguous outcome");
        }
    }
    q.normalize();

    std::vector<StateVec> psi_emb;
    for (int i = 0; i < d; ++i) {
        StateVec v = StateVec::Zero(d + 1);
        v.head(d) = psi[static_cast<size_t>(i)];
        psi_emb.push_back(std::move(v));
    }
    Complex gamma_sum{0.0, 0.0};
    std::vector<Complex> gamma(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        gamma[static_cast<size_t>(i)] = q.dot(psi_emb[static_cast<size_t>(i)]);
        gamma_sum += gamma[static_cast<size_t>(i)];
    }
    const Complex chi =
        std::abs(gamma_sum) > 1e-12 ? std::polar(1.0, -std::arg(gamma_sum)) : Complex{1.0, 0.0};

    SorterDesign& design = result.design;
    design.d = d;
    design.fidelity = mean_f;
    design.inputs = norm_images;
    const auto layout = spot_layout(d + 1, geometry.spot_radius);
    for (const Point2& p : layout) {
        const Point2 c = snap_to_grid(grid, p);
        design.spot_centers.push_back(c);
        design.spot_fields.push_back(gaussian_spot(grid, geometry.spot_waist, c));
    }
    for (int i = 0; i < d; ++i) {
        Field t(grid);
        for (int k = 0; k < d; ++k) {
            const Complex c = D.col(k).dot(psi_emb[static_cast<size_t>(i)]);
            const auto& spot = design.spot_fields[static_cast<size_t>(k)].amplitude;
            for (size_t px = 0; px < t.amplitude.size(); ++px) t.amplitude[px] += c * spot[px];
        }
        const Complex c_amb = chi * gamma[static_cast<size_t>(i)];
        const auto& spot_q = design.spot_fields[static_cast<size_t>(d)].amplitude;
        for (size_t px = 0; px < t.amplitude.size(); ++px) t.amplitude[px] += c_amb * spot_q[px];
        design.train_targets.push_back(normalized(t));
    }

    // Auxiliary direction: the configured seed orthonormalized against the
    // images (reported for completeness; the d training pairs fix the map).
    {
        Field seed = aux ? *aux : hermite_gaussian(grid, 0, 0, geometry.hg_waist);
        if (!(seed.grid == grid)) throw InvalidArgument("image_usd: auxiliary grid mismatch");
        // Orthonormal image-space basis u_k = sum_j (G^{-1/2})_{jk} f_j.
        Eigen::MatrixXcd inv_sqrtG = eig.operatorInverseSqrt();
        std::vector<Field> ortho;
        for (int k = 0; k < d; ++k) {
            Field u(grid);
            for (int j = 0; j < d; ++j) {
                const Complex c = inv_sqrtG(j, k);
                const auto& src = norm_images[static_cast<size_t>(j)].amplitude;
                for (size_t px = 0; px < u.amplitude.size(); ++px) u.amplitude[px] += c * src[px];
            }
            ortho.push_back(std::move(u));
        }
        for (const Field& u : ortho) {
            const Complex c = inner_product(u, seed);
            for (size_t px = 0; px < seed.amplitude.size(); ++px) {
                seed.amplitude[px] -= c * u.amplitude[px];
            }
        }
        if (field_norm(seed) < 1e-6) {
            throw InvalidArgument("image_usd: auxiliary field lies in the image span");
        }
        result.auxiliary = normalized(seed);
    }

    MPLCSystem blank = make_mplc(grid, geometry.n_planes, geometry.plane_spacing,
                                 geometry.lead_in, geometry.lead_out);
    auto [trained, report] = wavefront_match(blank, design.inputs, design.train_targets, wfm_opts);
    design.system = std::move(trained);
    design.report = std::move(report);

    const DetectorLayout detector = make_detector(geometry, d + 1);
    result.outcome = simulate_outcomes(design, detector);
    result.confusion = confusion_matrix(result.outcome.normalized);
    result.accuracy = classification_accuracy(result.confusion);
    return result;
}

}  // namespace usdmplc
