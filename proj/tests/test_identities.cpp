// Unit tests for the phase identities, resonance bounds, the descending
// logarithmic sequence, and the interaction-case classifier.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "speclab/identities.hpp"
#include "speclab/rng.hpp"

using namespace speclab;

namespace {

// Log-uniform magnitude in [2^-10, 2^10] with random sign.
double random_frequency(counter_rng& rng) {
    const double mag = std::exp2(rng.uniform(-10.0, 10.0));
    return rng.uniform01() < 0.5 ? -mag : mag;
}

FrequencyTriple random_triple(counter_rng& rng, bool with_taus) {
    for (;;) {
        const double x1 = random_frequency(rng);
        const double x2 = random_frequency(rng);
        if (x1 + x2 == 0.0) continue;
        if (!with_taus) return FrequencyTriple(x1, x2);
        return FrequencyTriple(x1, x2, rng.uniform(-1e6, 1e6), rng.uniform(-1e6, 1e6));
    }
}

}  // namespace

TEST_CASE("quartered-phase identity: frozen values and degenerate cases") {
    const identity_eval eq = quartered_phase_identity(2.0, 1.0);
    REQUIRE(std::abs(eq.lhs - 25.0 / 12.0) < 1e-13);
    REQUIRE(eq.relative_residual() < 1e-12);

    const identity_eval zero = quartered_phase_identity(1.0, 1.0);
    REQUIRE(std::abs(zero.lhs) < 1e-14);
    REQUIRE(std::abs(zero.rhs) < 1e-14);

    const identity_eval mixed = quartered_phase_identity(1.0, -0.5);
    REQUIRE(mixed.relative_residual() < 1e-12);

    REQUIRE_THROWS_AS(quartered_phase_identity(0.0, 1.0), std::domain_error);
    REQUIRE_THROWS_AS(quartered_phase_identity(1.0, -1.0), std::domain_error);
}

TEST_CASE("phase-increment identity: frozen values and positivity") {
    const identity_eval eq = phase_increment_identity(1.0, 1.0);
    REQUIRE(std::abs(eq.lhs - 7.5) < 1e-13);
    REQUIRE(std::abs(eq.rhs - 7.5) < 1e-13);

    const identity_eval mixed = phase_increment_identity(1.0, -2.0);
    REQUIRE(std::abs(mixed.lhs - 7.5) < 1e-13);
    REQUIRE(mixed.relative_residual() < 1e-12);

    counter_rng rng(301);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = std::exp2(rng.uniform(-6.0, 6.0));
        const double b = std::exp2(rng.uniform(-6.0, 6.0));
        const identity_eval e = phase_increment_identity(a, b);
        REQUIRE(e.lhs > 0.0);  // both summands positive for a, b > 0
        REQUIRE(e.rhs > 0.0);
    }
}

TEST_CASE("resonance: closed form, tau independence, and frozen value") {
    const FrequencyTriple t(1.0, 1.0);
    REQUIRE(std::abs(resonance(t) + 7.5) < 1e-13);

    counter_rng rng(302);
    for (int trial = 0; trial < 500; ++trial) {
        const FrequencyTriple a = random_triple(rng, true);
        const FrequencyTriple b(a.xi1, a.xi2, a.tau1 + 3.25, a.tau2 - 3.25);
        REQUIRE(resonance(a) == resonance(b));  // depends only on frequencies
        REQUIRE(resonance_identity(a).relative_residual() < 1e-12);
    }

    REQUIRE_THROWS_AS(resonance(FrequencyTriple(1.0, -1.0)), std::domain_error);
    REQUIRE_THROWS_AS(FrequencyTriple(0.0, 1.0), std::domain_error);
}

TEST_CASE("resonance bounds sandwich |h| between M and 2M") {
    const resonance_sandwich unit = resonance_bounds(FrequencyTriple(1.0, 1.0));
    REQUIRE(unit.lower == 6.0);
    REQUIRE(unit.upper == 12.0);

    const resonance_sandwich big = resonance_bounds(FrequencyTriple(100.0, 100.0));
    REQUIRE(std::abs(big.lower - 6e6) < 1.0);

    const FrequencyTriple small(0.01, 0.01);
    const resonance_sandwich s = resonance_bounds(small);
    REQUIRE(s.lower > 100.0);  // fraction term dominates at low frequency

    counter_rng rng(303);
    for (int trial = 0; trial < 5000; ++trial) {
        const FrequencyTriple t = random_triple(rng, false);
        const double h = std::abs(resonance(t));
        const resonance_sandwich sw = resonance_bounds(t);
        REQUIRE(sw.lower * (1.0 - 1e-12) <= h);
        REQUIRE(h <= sw.upper * (1.0 + 1e-12));
    }
}

TEST_CASE("modulation-telescope identities: frozen values and invariances") {
    const identity_eval sum = modulation_sum_identity(FrequencyTriple(2.0, 1.0));
    REQUIRE(std::abs(sum.lhs - 25.0 / 12.0) < 1e-13);
    REQUIRE(sum.relative_residual() < 1e-12);

    const identity_eval d1 = modulation_difference_identity(3.0, 1.0, 0.0, 0.0);
    REQUIRE(std::abs(d1.lhs - 80.0 / 3.0) < 1e-12);
    REQUIRE(d1.relative_residual() < 1e-12);

    const identity_eval d2 = modulation_difference_identity(2.0, 1.0, 0.0, 0.0);
    REQUIRE(std::abs(d2.lhs - 45.0 / 4.0) < 1e-12);

    // Adding c to both tau and tau1 leaves the difference arrangement fixed.
    const identity_eval shifted = modulation_difference_identity(2.0, 1.0, 17.0, 17.0);
    REQUIRE(std::abs(shifted.lhs - d2.lhs) < 1e-12);

    // Equal split kills the sum arrangement's right side.
    const identity_eval equal = modulation_sum_identity(FrequencyTriple(1.5, 1.5));
    REQUIRE(std::abs(equal.rhs) < 1e-14);

    REQUIRE_THROWS_AS(modulation_difference_identity(2.0, 2.0, 0.0, 0.0),
                      std::domain_error);
}

TEST_CASE("identity suite: 1e5 log-uniform samples at 1e-12 relative residual") {
    counter_rng rng(7001);
    const int n = 100000;
    double worst = 0.0;
    for (int trial = 0; trial < n; ++trial) {
        const FrequencyTriple t = random_triple(rng, true);
        worst = std::max(worst, quartered_phase_identity(t.xi1, t.xi2).relative_residual());
        worst = std::max(worst, phase_increment_identity(t.xi1, t.xi2).relative_residual());
        worst = std::max(worst, resonance_identity(t).relative_residual());
        worst = std::max(worst, modulation_sum_identity(t).relative_residual());
        worst = std::max(worst,
                         modulation_difference_identity(t.xi(), t.xi1, t.tau(), t.tau1)
                             .relative_residual());
    }
    REQUIRE(worst <= 1e-12);
}

TEST_CASE("gamma sequence: frozen small cases") {
    const GammaSequence s16 = gamma_sequence(16);
    REQUIRE(s16.values.size() == 2);
    REQUIRE(s16.values[0] == 8.0);
    REQUIRE(s16.values[1] == 6.0);
    REQUIRE(std::abs(s16.partial_sum - 1.0 / std::sqrt(8.0)) < 1e-15);
    REQUIRE(s16.terminal_in_range);
    REQUIRE(s16.doubling_lower_bound);

    const GammaSequence s4096 = gamma_sequence(4096);
    REQUIRE(s4096.values.size() == 4);
    REQUIRE(s4096.values[0] == 2048.0);
    REQUIRE(s4096.values[1] == 22.0);
    REQUIRE(std::abs(s4096.values[2] - 8.918863237274595) < 1e-12);
    REQUIRE(s4096.values[3] >= 6.0);
    REQUIRE(s4096.values[3] < 8.0);
    REQUIRE(std::abs(s4096.partial_sum - 0.570145) < 1e-4);

    REQUIRE_THROWS_AS(gamma_sequence(8), std::domain_error);
}

TEST_CASE("gamma sequence: uniform bound and structure across the dyadic sweep") {
    for (std::uint64_t j = 16; j <= (1ull << 20); j *= 2) {
        const GammaSequence s = gamma_sequence(j);
        // Strictly decreasing until the stopping index.
        for (std::size_t n = 0; n + 1 < s.values.size(); ++n)
            REQUIRE(s.values[n + 1] < s.values[n]);
        REQUIRE(s.values.back() < 8.0);
        REQUIRE(static_cast<double>(s.steps()) <= std::log2(static_cast<double>(j)) + 4.0);
        if (s.terminal_in_range) {
            REQUIRE(s.partial_sum <= (std::sqrt(2.0) + 1.0) / 2.0 + 1e-12);
            REQUIRE(s.doubling_lower_bound);
        }
    }
}

TEST_CASE("case classifier: pinned labels, precedence, window property") {
    REQUIRE(case_condition(FrequencyTriple(1.0, -2.0)) == CaseLabel::SIGN_SPLIT);
    REQUIRE(case_condition(FrequencyTriple(10.0, 10.0)) == CaseLabel::FACTOR_LARGE);

    // Equal frequencies with ξ1(ξ−ξ1) = 2/ξ²: ξ1⁴ = 1/2 puts the factor at 1/3.
    const double x = std::pow(0.5, 0.25);
    REQUIRE(case_condition(FrequencyTriple(x, x)) == CaseLabel::FACTOR_SMALL);

    counter_rng rng(304);
    for (int trial = 0; trial < 20000; ++trial) {
        const FrequencyTriple t = random_triple(rng, false);
        const CaseLabel label = case_condition(t);
        if (t.xi1 * t.xi2 < 0.0) {
            REQUIRE(label == CaseLabel::SIGN_SPLIT);
        } else {
            REQUIRE(label != CaseLabel::SIGN_SPLIT);
        }
        if (label == CaseLabel::FACTOR_SMALL) {
            // Window membership is an exact consequence of the factor bound.
            const double xi = t.xi();
            const double w = t.xi1 * (xi - t.xi1);
            REQUIRE(w >= 8.0 / (9.0 * xi * xi) * (1.0 - 1e-12));
            REQUIRE(w <= 8.0 / (3.0 * xi * xi) * (1.0 + 1e-12));
        }
    }
}
