#include "usdmplc/usd_states.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "usdmplc/errors.hpp"

namespace usdmplc {

std::vector<StateVec> symmetric_frame(int d) {
    if (d < 2) throw InvalidArgument("symmetric_frame: d must be >= 2");
    const double target = -1.0 / (d - 1);
    // Real lower-triangular construction: component j of vector i is fixed
    // by the overlap equations against vectors 1..j, the diagonal by unit
    // norm, everything above the diagonal is zero. The last vector is fully
    // determined by overlap equations alone.
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(d, d - 1);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d - 1; ++j) {
            if (i == 0 && j == 0) {
                psi(0, 0) = 1.0;
            } else if (j < i) {
                double acc = 0.0;
                for (int a = 0; a < j; ++a) acc += psi(i, a) * psi(j, a);
                psi(i, j) = (target - acc) / psi(j, j);
            } else if (j == i) {
                double acc = 0.0;
                for (int a = 0; a < j; ++a) acc += psi(i, a) * psi(i, a);
                psi(i, j) = std::sqrt(1.0 - acc);
            }
        }
    }
    std::vector<StateVec> out(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) out[static_cast<size_t>(i)] = psi.row(i).transpose().cast<Complex>();
    return out;
}

SymmetricStateSet symmetric_states(int d, double theta) {
    if (d < 2) throw InvalidArgument("symmetric_states: d must be >= 2");
    if (!(theta >= 0.0 && theta <= 0.5 * std::numbers::pi + 1e-12)) {
        throw InvalidArgument("symmetric_states: theta must lie in [0, pi/2]");
    }
    const auto frame = symmetric_frame(d);
    const double s = std::sin(theta);
    const double c = std::cos(theta);

    SymmetricStateSet set;
    set.d = d;
    set.theta = theta;
    set.beta = Complex{c * c - s * s / (d - 1), 0.0};
    set.fidelity = std::norm(set.beta);
    set.states.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        StateVec v = StateVec::Zero(d);
        v.head(d - 1) = s * frame[static_cast<size_t>(i)];
        v[d - 1] = c;
        set.states.push_back(std::move(v));
    }
    return set;
}

double theta_for_fidelity(int d, double fidelity, OverlapBranch branch) {
    if (d < 2) throw InvalidArgument("theta_for_fidelity: d must be >= 2");
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
        throw InvalidArgument("theta_for_fidelity: fidelity must lie in [0, 1]");
    }
    const double beta =
        branch == OverlapBranch::Positive ? std::sqrt(fidelity) : -std::sqrt(fidelity);
    // beta(theta) = ((d-2) + d*cos(2 theta)) / (2(d-1)); feasible range
    // is [-1/(d-1), 1], so the negative branch dies at sqrt(F) > 1/(d-1).
    const double c2 = (2.0 * (d - 1) * beta - (d - 2)) / d;
    if (c2 < -1.0 - 1e-12 || c2 > 1.0 + 1e-12) {
        throw NoSolution("theta_for_fidelity: requested overlap branch is infeasible for d=" +
                         std::to_string(d));
    }
    return 0.5 * std::acos(std::clamp(c2, -1.0, 1.0));
}

StateVec orthocomplement(const std::vector<StateVec>& states, int i) {
    const int d = static_cast<int>(states.size());
    if (d < 2) throw InvalidArgument("orthocomplement: need at least two states");
    if (i < 0 || i >= d) throw InvalidArgument("orthocomplement: index out of range");
    const auto dim = states.front().size();

    Eigen::MatrixXcd others(d - 1, dim);
    int r = 0;
    for (int j = 0; j < d; ++j) {
        if (j == i) continue;
        others.row(r++) = states[static_cast<size_t>(j)].adjoint();
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(others, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (sv(sv.size() - 1) < 1e-10 * sv(0)) {
        throw DegenerateInput("orthocomplement: state set is rank-deficient");
    }
    StateVec perp = svd.matrixV().col(dim - 1);

    const Complex ip = perp.dot(states[static_cast<size_t>(i)]);  // <perp|psi_i>
    if (std::abs(ip) < 1e-10) {
        throw DegenerateInput("orthocomplement: state lies in the span of the others");
    }
    perp *= std::polar(1.0, std::arg(ip));  // make <perp|psi_i> real positive
    return perp;
}

USDMeasurement usd_measurement(const SymmetricStateSet& set) {
    const int d = set.d;
    if (set.fidelity >= 1.0 - 1e-12) {
        throw ConstructionViolated("usd_measurement: fidelity must be < 1");
    }

    std::vector<StateVec> perps;
    perps.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) perps.push_back(orthocomplement(set.states, i));

    const Complex cross = perps[0].dot(perps[1]);  // <perp_1|perp_2>
    if (std::abs(cross.imag()) > 1e-9 || cross.real() > 1e-9) {
        throw ConstructionViolated(
            "usd_measurement: cross-overlap of orthocomplements must be real and <= 0 "
            "(non-symmetric or negative-overlap input)");
    }
    const double lift = std::sqrt(std::max(0.0, -cross.real()));

    USDMeasurement m;
    m.d = d;
    m.vectors.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) {
        StateVec v = StateVec::Zero(d + 1);
        v.head(d) = perps[static_cast<size_t>(i)];
        v[d] = lift;
        v.normalize();
        m.vectors.push_back(std::move(v));
    }

    // Ambiguous outcome: orthonormalize e_{d+1} against the D_i; if that
    // direction is degenerate, fall back to the embedded psi_1.
    StateVec q = StateVec::Zero(d + 1);
    q[d] = 1.0;
    for (const auto& v : m.vectors) q -= v.dot(q) * v;
    if (q.norm() < 1e-10) {
        q = StateVec::Zero(d + 1);
        q.head(d) = set.states[0];
        for (const auto& v : m.vectors) q -= v.dot(q) * v;
        if (q.norm() < 1e-10) {
            throw ConstructionViolated("usd_measurement: cannot complete the ambiguous outcome");
        }
    }
    q.normalize();
    m.ambiguous = std::move(q);

    StateVec psi1 = StateVec::Zero(d + 1);
    psi1.head(d) = set.states[0];
    m.alpha = std::abs(m.vectors[0].dot(psi1));
    return m;
}

OutcomeMatrix ideal_outcome_matrix(const SymmetricStateSet& set) {
    const int d = set.d;
    // Probabilities of the constructed measurement: 1 - |beta| on the
    // diagonal, |beta| in the ambiguous column, zero elsewhere.
    const double amb = std::abs(set.beta);
    if (amb > 1.0 + 1e-12) throw ConstructionViolated("ideal_outcome_matrix: |beta| > 1");
    OutcomeMatrix m(d, d + 1);
    for (int i = 0; i < d; ++i) {
        m.at(i, i) = 1.0 - amb;
        m.at(i, d) = amb;
        m.row_labels.push_back("psi_" + std::to_string(i + 1));
    }
    for (int j = 0; j < d; ++j) m.col_labels.push_back(std::to_string(j + 1));
    m.col_labels.push_back("?");
    return m;
}

double mesd_bound(double fidelity) {
    if (!(fidelity >= 0.0 && fidelity <= 1.0)) {
        throw InvalidArgument("mesd_bound: fidelity must lie in [0, 1]");
    }
    return 0.5 * (1.0 - std::sqrt(1.0 - fidelity));
}

}  // namespace usdmplc
