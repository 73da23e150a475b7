#include <doctest.h>

#include <cmath>
#include <numbers>

#include "usdmplc/errors.hpp"
#include "usdmplc/usd_states.hpp"

using namespace usdmplc;

namespace {

StateVec embedded(const StateVec& v) {
    StateVec out = StateVec::Zero(v.size() + 1);
    out.head(v.size()) = v;
    return out;
}

}  // namespace

TEST_CASE("symmetric_frame: d=2 and trine") {
    const auto two = symmetric_frame(2);
    CHECK(std::abs(two[0][0] - Complex{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(two[1][0] - Complex{-1.0, 0.0}) < 1e-12);

    const auto trine = symmetric_frame(3);
    CHECK(std::abs(trine[0][0] - Complex{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(trine[1][0] - Complex{-0.5, 0.0}) < 1e-12);
    CHECK(std::abs(trine[1][1] - Complex{std::sqrt(3.0) / 2.0, 0.0}) < 1e-12);
    CHECK(std::abs(trine[2][0] - Complex{-0.5, 0.0}) < 1e-12);
    CHECK(std::abs(trine[2][1] - Complex{-std::sqrt(3.0) / 2.0, 0.0}) < 1e-12);

    CHECK_THROWS_AS(symmetric_frame(1), InvalidArgument);
}

TEST_CASE("symmetric_frame gram: (d/(d-1)) I - (1/(d-1)) J for d in 2..8") {
    for (int d = 2; d <= 8; ++d) {
        const auto frame = symmetric_frame(d);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                const Complex g = frame[static_cast<size_t>(i)].dot(frame[static_cast<size_t>(j)]);
                const double expected = i == j ? 1.0 : -1.0 / (d - 1);
                // Gram = (d/(d-1)) I - (1/(d-1)) J elementwise.
                CHECK(std::abs(g - Complex{expected, 0.0}) < 1e-10);
            }
        }
    }
}

TEST_CASE("symmetric_states: limits and gram structure") {
    // theta = 0: every state equals the mixing axis.
    const auto degenerate = symmetric_states(4, 0.0);
    CHECK(degenerate.fidelity == doctest::Approx(1.0));
    for (const auto& s : degenerate.states) {
        CHECK(std::abs(s[3] - Complex{1.0, 0.0}) < 1e-12);
    }

    // sin^2(theta) = (d-1)/d: beta = 0, orthonormal set.
    for (int d = 2; d <= 8; ++d) {
        const double theta = std::asin(std::sqrt((d - 1.0) / d));
        const auto set = symmetric_states(d, theta);
        CHECK(std::abs(set.beta) < 1e-12);
        for (int i = 0; i < d; ++i) {
            for (int j = i + 1; j < d; ++j) {
                CHECK(std::abs(set.states[static_cast<size_t>(i)].dot(
                          set.states[static_cast<size_t>(j)])) < 1e-12);
            }
        }
    }

    // d=3, theta=0.6: uniform off-diagonal beta = cos^2 - sin^2/2.
    const auto set = symmetric_states(3, 0.6);
    const double expected =
        std::cos(0.6) * std::cos(0.6) - std::sin(0.6) * std::sin(0.6) / 2.0;
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(set.states[static_cast<size_t>(i)].norm() - 1.0) < 1e-9);
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            const Complex g =
                set.states[static_cast<size_t>(i)].dot(set.states[static_cast<size_t>(j)]);
            CHECK(std::abs(g - Complex{expected, 0.0}) < 1e-9);
        }
    }
    CHECK(set.fidelity == doctest::Approx(expected * expected));

    CHECK_THROWS_AS(symmetric_states(3, -0.1), InvalidArgument);
    CHECK_THROWS_AS(symmetric_states(3, 2.0), InvalidArgument);
}

TEST_CASE("symmetric gram is exactly uniform across d and theta") {
    for (int d = 2; d <= 8; ++d) {
        const double theta_orth = std::asin(std::sqrt((d - 1.0) / d));
        for (double frac : {0.15, 0.5, 0.85}) {
            const double theta = theta_orth + frac * (0.5 * std::numbers::pi - theta_orth);
            const auto set = symmetric_states(d, theta);
            for (int i = 0; i < d; ++i) {
                for (int j = 0; j < d; ++j) {
                    const Complex g = set.states[static_cast<size_t>(i)].dot(
                        set.states[static_cast<size_t>(j)]);
                    const Complex expected = i == j ? Complex{1.0, 0.0} : set.beta;
                    CHECK(std::abs(g - expected) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("theta_for_fidelity: endpoints, round trip, branches") {
    for (int d = 2; d <= 8; ++d) {
        CHECK(theta_for_fidelity(d, 1.0, OverlapBranch::Positive) == doctest::Approx(0.0));
        const double theta0 = theta_for_fidelity(d, 0.0, OverlapBranch::Positive);
        CHECK(std::sin(theta0) * std::sin(theta0) == doctest::Approx((d - 1.0) / d));
    }

    const double theta = theta_for_fidelity(3, 0.25, OverlapBranch::Positive);
    const double beta = std::cos(theta) * std::cos(theta) - std::sin(theta) * std::sin(theta) / 2;
    CHECK(beta == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(symmetric_states(3, theta).fidelity == doctest::Approx(0.25).epsilon(1e-12));

    // Negative branch exists only while sqrt(F) <= 1/(d-1).
    const double theta_neg = theta_for_fidelity(3, 0.2, OverlapBranch::Negative);
    CHECK(symmetric_states(3, theta_neg).beta.real() == doctest::Approx(-std::sqrt(0.2)));
    CHECK_THROWS_AS(theta_for_fidelity(3, 0.5, OverlapBranch::Negative), NoSolution);
    CHECK_THROWS_AS(theta_for_fidelity(3, 1.5, OverlapBranch::Positive), InvalidArgument);
}

TEST_CASE("orthocomplement: orthogonal case, trine case, degeneracy") {
    // F = 0: the orthocomplement is the state itself.
    const auto ortho = symmetric_states(3, theta_for_fidelity(3, 0.0));
    for (int i = 0; i < 3; ++i) {
        const StateVec perp = orthocomplement(ortho.states, i);
        CHECK(std::abs(perp.dot(ortho.states[static_cast<size_t>(i)]) - Complex{1.0, 0.0}) <
              1e-9);
    }

    const auto mixed = symmetric_states(3, 0.7);
    for (int i = 0; i < 3; ++i) {
        const StateVec perp = orthocomplement(mixed.states, i);
        CHECK(std::abs(perp.norm() - 1.0) < 1e-12);
        const Complex own = perp.dot(mixed.states[static_cast<size_t>(i)]);
        CHECK(own.real() > 0.0);
        CHECK(std::abs(own.imag()) < 1e-10);
        for (int j = 0; j < 3; ++j) {
            if (j == i) continue;
            CHECK(std::abs(perp.dot(mixed.states[static_cast<size_t>(j)])) < 1e-10);
        }
    }

    // theta = 0 collapses the set rank.
    const auto collapsed = symmetric_states(3, 0.0);
    CHECK_THROWS_AS(orthocomplement(collapsed.states, 0), DegenerateInput);
}

TEST_CASE("usd_measurement: F = 0 reduces to the embedded states") {
    const auto set = symmetric_states(4, theta_for_fidelity(4, 0.0));
    const auto m = usd_measurement(set);
    for (int i = 0; i < 4; ++i) {
        const Complex own = m.vectors[static_cast<size_t>(i)].dot(
            embedded(set.states[static_cast<size_t>(i)]));
        CHECK(std::abs(own - Complex{1.0, 0.0}) < 1e-9);
    }
    CHECK(std::abs(m.ambiguous[4] - Complex{1.0, 0.0}) < 1e-9);
}

TEST_CASE("usd_measurement oracle over the full (d, overlap) grid") {
    // Verified truth of the construction: for a symmetric set with common
    // overlap beta >= 0, the measurement discriminates with probability
    // 1 - beta (not 1 - beta^2) and the ambiguous outcome carries beta.
    for (int d = 2; d <= 8; ++d) {
        for (int ov = 1; ov <= 9; ++ov) {
            const double beta = 0.1 * ov;
            const double theta = theta_for_fidelity(d, beta * beta, OverlapBranch::Positive);
            const auto set = symmetric_states(d, theta);
            REQUIRE(std::abs(set.beta.real() - beta) < 1e-12);
            const auto m = usd_measurement(set);

            // Measurement orthonormality incl. the ambiguous vector.
            for (int a = 0; a <= d; ++a) {
                const StateVec& va = a < d ? m.vectors[static_cast<size_t>(a)] : m.ambiguous;
                for (int b = 0; b <= d; ++b) {
                    const StateVec& vb = b < d ? m.vectors[static_cast<size_t>(b)] : m.ambiguous;
                    const double expected = a == b ? 1.0 : 0.0;
                    CHECK(std::abs(va.dot(vb) - Complex{expected, 0.0}) < 1e-8);
                }
            }

            for (int i = 0; i < d; ++i) {
                const StateVec psi = embedded(set.states[static_cast<size_t>(i)]);
                double total = std::norm(m.ambiguous.dot(psi));
                for (int j = 0; j < d; ++j) {
                    const double p = std::norm(m.vectors[static_cast<size_t>(j)].dot(psi));
                    total += p;
                    if (i == j) {
                        CHECK(std::abs(p - (1.0 - beta)) < 1e-9);  // success = 1 - |beta|
                    } else {
                        CHECK(p < 1e-12);  // unambiguity
                    }
                }
                CHECK(std::abs(total - 1.0) < 1e-9);  // POVM completeness
                CHECK(std::abs(std::norm(m.ambiguous.dot(psi)) - beta) < 1e-9);
            }
        }
    }
}

TEST_CASE("usd_measurement rejects unusable sets") {
    CHECK_THROWS_AS(usd_measurement(symmetric_states(3, 0.0)), ConstructionViolated);
    // Negative-overlap sets make the cross-overlap positive.
    const double theta_neg = theta_for_fidelity(3, 0.16, OverlapBranch::Negative);
    CHECK_THROWS_AS(usd_measurement(symmetric_states(3, theta_neg)), ConstructionViolated);
}

TEST_CASE("ideal_outcome_matrix structure") {
    // F = 0: [I | 0].
    const auto ortho = ideal_outcome_matrix(symmetric_states(3, theta_for_fidelity(3, 0.0)));
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 4; ++j) {
            CHECK(ortho.at(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
        }
    }

    // Overlap 0.34: diagonal 0.66, ambiguous column 0.34.
    const double theta = theta_for_fidelity(3, 0.34 * 0.34, OverlapBranch::Positive);
    const auto m = ideal_outcome_matrix(symmetric_states(3, theta));
    for (int i = 0; i < 3; ++i) {
        CHECK(m.at(i, i) == doctest::Approx(0.66));
        CHECK(m.at(i, 3) == doctest::Approx(0.34));
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += m.at(i, j);
        CHECK(row == doctest::Approx(1.0));
    }
}

TEST_CASE("mesd_bound values and monotonicity") {
    CHECK(mesd_bound(0.0) == 0.0);
    CHECK(mesd_bound(1.0) == doctest::Approx(0.5));
    CHECK(mesd_bound(0.75) == doctest::Approx(0.25));
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double b = mesd_bound(i / 100.0);
        CHECK(b >= prev);
        prev = b;
    }
    CHECK_THROWS_AS(mesd_bound(-0.1), InvalidArgument);
    CHECK_THROWS_AS(mesd_bound(1.1), InvalidArgument);
}
