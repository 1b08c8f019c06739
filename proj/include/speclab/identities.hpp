#pragma once
// Exact algebraic identities for the dispersion phase p(ξ) = ξ³ − 1/ξ, the
// resonance function with its two-sided bound, the descending logarithmic
// sequence, and the interaction-case classifier.
//
// Every identity is evaluated on BOTH sides in double-double arithmetic:
// the left sides subtract O(ξ³) terms to produce O(1) results, and plain
// doubles lose ~9 digits at |ξ| ~ 2^10, which would break the 1e−12
// relative-residual contract.  Double-double keeps ~31 digits end to end.
//
// All identities here are stated at γ = 1 (normalized phase), matching the
// case classifier and the bilinear analysis that consume them.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "summation.hpp"

namespace speclab {

// Both sides of an identity, evaluated independently.
struct identity_eval {
    double lhs = 0.0;
    double rhs = 0.0;

    double residual() const { return std::abs(lhs - rhs); }
    // Relative residual against 1 + |lhs| (absolute near zero, relative when large).
    double relative_residual() const { return residual() / (1.0 + std::abs(lhs)); }
};

namespace detail {

inline dd dd_cube(dd x) { return dd_mul(dd_mul(x, x), x); }

// p(x) = x³ − 1/x in double-double.
inline dd dd_phase(dd x) { return dd_sub(dd_cube(x), dd_div(dd(1.0), x)); }

// Quarter-scaled phase q(x) = x³/4 − 4/x.
inline dd dd_quarter_phase(dd x) {
    return dd_sub(dd_div(dd_cube(x), dd(4.0)), dd_div(dd(4.0), x));
}

}  // namespace detail

// ── frequency triples ──────────────────────────────────────────────────────

// A convolution pair (ξ1, τ1), (ξ2, τ2) and its output point ξ = ξ1 + ξ2,
// τ = τ1 + τ2 (the sums are definitional, never set independently).
struct FrequencyTriple {
    double xi1, xi2, tau1, tau2;

    FrequencyTriple(double x1, double x2, double t1 = 0.0, double t2 = 0.0)
        : xi1(x1), xi2(x2), tau1(t1), tau2(t2) {
        if (xi1 == 0.0 || xi2 == 0.0)
            throw std::domain_error("FrequencyTriple: xi1, xi2 must be nonzero");
    }

    double xi() const { return xi1 + xi2; }
    double tau() const { return tau1 + tau2; }

    void require_output_nonzero() const {
        if (xi1 + xi2 == 0.0)
            throw std::domain_error("FrequencyTriple: xi1 + xi2 = 0 is outside the phase domain");
    }
};

// ── the two generating identities ──────────────────────────────────────────

// Quartered-phase identity:
//   p(a) + p(b) − q(a+b) = (3/4)(a+b)(a−b)² [1 − 4/(3ab(a+b)²)],
// where q is the quarter-scaled phase.  Drives the opposite-sign and
// large-factor interaction cases.
inline identity_eval quartered_phase_identity(double a, double b) {
    if (a == 0.0 || b == 0.0 || a + b == 0.0)
        throw std::domain_error("quartered_phase_identity: a, b, a+b must be nonzero");
    const dd A(a), B(b), S = dd_add(A, B);
    const dd lhs = dd_sub(dd_add(detail::dd_phase(A), detail::dd_phase(B)),
                          detail::dd_quarter_phase(S));
    const dd ab = dd_mul(A, B);
    const dd diff = dd_sub(A, B);
    const dd factor =
        dd_sub(dd(1.0), dd_div(dd(4.0), dd_mul(dd(3.0), dd_mul(ab, dd_mul(S, S)))));
    const dd rhs = dd_mul(dd_mul(dd_mul(dd(0.75), S), dd_mul(diff, diff)), factor);
    return {lhs.to_double(), rhs.to_double()};
}

// Phase-increment identity:
//   p(a+b) − p(a) − p(b) = 3ab(a+b) + (a² + ab + b²)/(ab(a+b)).
// Both right-hand summands share the sign of ab(a+b); this is the closed
// form behind the resonance function and its sandwich bound.
inline identity_eval phase_increment_identity(double a, double b) {
    if (a == 0.0 || b == 0.0 || a + b == 0.0)
        throw std::domain_error("phase_increment_identity: a, b, a+b must be nonzero");
    const dd A(a), B(b), S = dd_add(A, B);
    const dd lhs =
        dd_sub(dd_sub(detail::dd_phase(S), detail::dd_phase(A)), detail::dd_phase(B));
    const dd ab = dd_mul(A, B);
    const dd quad = dd_add(dd_add(dd_mul(A, A), ab), dd_mul(B, B));
    const dd rhs = dd_add(dd_mul(dd(3.0), dd_mul(ab, S)), dd_div(quad, dd_mul(ab, S)));
    return {lhs.to_double(), rhs.to_double()};
}

// ── resonance function ─────────────────────────────────────────────────────

// h = (τ − p(ξ)) − (τ1 − p(ξ1)) − (τ2 − p(ξ2))
//   = −[ 3ξξ1ξ2 + (ξ1² + ξ1ξ2 + ξ2²)/(ξξ1ξ2) ]          (closed form).
inline double resonance(const FrequencyTriple& t) {
    t.require_output_nonzero();
    const dd X1(t.xi1), X2(t.xi2), X = dd_add(X1, X2);
    const dd prod = dd_mul(X, dd_mul(X1, X2));
    const dd quad = dd_add(dd_add(dd_mul(X1, X1), dd_mul(X1, X2)), dd_mul(X2, X2));
    return dd_neg(dd_add(dd_mul(dd(3.0), prod), dd_div(quad, prod))).to_double();
}

// Both sides of the resonance closed form: lhs from the modulation telescope
// (the defining expression), rhs from the closed form.
inline identity_eval resonance_identity(const FrequencyTriple& t) {
    t.require_output_nonzero();
    const dd X1(t.xi1), X2(t.xi2), X = dd_add(X1, X2);
    const dd T1(t.tau1), T2(t.tau2), T = dd_add(T1, T2);
    const dd lhs = dd_sub(dd_sub(dd_sub(T, detail::dd_phase(X)),
                                 dd_sub(T1, detail::dd_phase(X1))),
                          dd_sub(T2, detail::dd_phase(X2)));
    return {lhs.to_double(), resonance(t)};
}

// Two-sided bound: with M = max{3|ξξ1ξ2|, (ξ1²+ξ1ξ2+ξ2²)/|ξξ1ξ2|},
//   M ≤ |h| ≤ 2M   (exact: the two summands of −h share a sign).
struct resonance_sandwich {
    double lower = 0.0;
    double upper = 0.0;
};

inline resonance_sandwich resonance_bounds(const FrequencyTriple& t) {
    t.require_output_nonzero();
    const dd X1(t.xi1), X2(t.xi2), X = dd_add(X1, X2);
    const dd prod = dd_mul(X, dd_mul(X1, X2));
    const dd quad = dd_add(dd_add(dd_mul(X1, X1), dd_mul(X1, X2)), dd_mul(X2, X2));
    const double cubic_term = dd_abs(dd_mul(dd(3.0), prod)).to_double();
    const double fraction_term = dd_abs(dd_div(quad, prod)).to_double();
    const double m = std::max(cubic_term, fraction_term);
    return {m, 2.0 * m};
}

// ── modulation-telescope identities at the quartered phase ─────────────────

// Sum arrangement:
//   τ − q(ξ) − (τ1 − p(ξ1)) − (τ2 − p(ξ2)) = (3/4)ξ(ξ1−ξ2)² [1 − 4/(3ξ²ξ1ξ2)].
inline identity_eval modulation_sum_identity(const FrequencyTriple& t) {
    t.require_output_nonzero();
    const dd X1(t.xi1), X2(t.xi2), X = dd_add(X1, X2);
    const dd T1(t.tau1), T2(t.tau2), T = dd_add(T1, T2);
    const dd lhs = dd_sub(dd_sub(dd_sub(T, detail::dd_quarter_phase(X)),
                                 dd_sub(T1, detail::dd_phase(X1))),
                          dd_sub(T2, detail::dd_phase(X2)));
    const dd diff = dd_sub(X1, X2);
    const dd factor = dd_sub(
        dd(1.0),
        dd_div(dd(4.0), dd_mul(dd(3.0), dd_mul(dd_mul(X, X), dd_mul(X1, X2)))));
    const dd rhs = dd_mul(dd_mul(dd_mul(dd(0.75), X), dd_mul(diff, diff)), factor);
    return {lhs.to_double(), rhs.to_double()};
}

// Difference arrangement (inputs: output pair (ξ, τ) and one factor (ξ1, τ1);
// the partner is ξ2 = ξ − ξ1, τ2 = τ − τ1):
//   τ2 − q(ξ2) − (τ − p(ξ)) + (τ1 − p(ξ1)) = (3/4)ξ2(2ξ−ξ2)² [1 + 4/(3ξξ1ξ2²)].
inline identity_eval modulation_difference_identity(double xi, double xi1, double tau,
                                                    double tau1) {
    const double xi2 = xi - xi1;
    if (xi == 0.0 || xi1 == 0.0 || xi2 == 0.0)
        throw std::domain_error(
            "modulation_difference_identity: xi, xi1, xi-xi1 must be nonzero");
    const dd X(xi), X1(xi1), X2 = dd_sub(X, X1);
    const dd T(tau), T1(tau1), T2 = dd_sub(T, T1);
    const dd lhs = dd_add(dd_sub(dd_sub(T2, detail::dd_quarter_phase(X2)),
                                 dd_sub(T, detail::dd_phase(X))),
                          dd_sub(T1, detail::dd_phase(X1)));
    const dd twist = dd_sub(dd_mul(dd(2.0), X), X2);
    const dd factor = dd_add(
        dd(1.0),
        dd_div(dd(4.0), dd_mul(dd(3.0), dd_mul(X, dd_mul(X1, dd_mul(X2, X2))))));
    const dd rhs = dd_mul(dd_mul(dd_mul(dd(0.75), X2), dd_mul(twist, twist)), factor);
    return {lhs.to_double(), rhs.to_double()};
}

// ── descending logarithmic sequence ────────────────────────────────────────

// γ_0 = j/2, γ_{n+1} = 2 log₂ γ_n, stopped at the first γ_N < 8.
// partial_sum = Σ_{n<N} γ_n^{−1/2} is uniformly bounded by (√2+1)/2 whenever
// the terminal value lands in [6, 8).
struct GammaSequence {
    std::vector<double> values;        // γ_0 … γ_N
    double partial_sum = 0.0;          // Σ_{n=0}^{N−1} γ_n^{−1/2}
    bool terminal_in_range = false;    // γ_N ∈ [6, 8)
    bool doubling_lower_bound = false; // γ_n ≥ 2^{N+2−n} for all n ≤ N

    std::size_t steps() const { return values.size() - 1; }  // N
};

inline GammaSequence gamma_sequence(std::uint64_t j) {
    if (j < 16)
        throw std::domain_error("gamma_sequence: j must be >= 16 so the recursion descends");
    GammaSequence seq;
    double g = static_cast<double>(j) / 2.0;
    seq.values.push_back(g);
    while (g >= 8.0) {
        if (seq.values.size() > 200)
            throw std::runtime_error("gamma_sequence: recursion failed to descend");
        g = 2.0 * std::log2(g);
        seq.values.push_back(g);
    }
    const std::size_t N = seq.values.size() - 1;
    std::vector<double> terms(N);
    for (std::size_t n = 0; n < N; ++n) terms[n] = 1.0 / std::sqrt(seq.values[n]);
    seq.partial_sum = pairwise_sum(terms);
    seq.terminal_in_range = (seq.values[N] >= 6.0 && seq.values[N] < 8.0);
    seq.doubling_lower_bound = true;
    for (std::size_t n = 0; n <= N; ++n)
        if (seq.values[n] <
            std::pow(2.0, static_cast<double>(N) + 2.0 - static_cast<double>(n)))
            seq.doubling_lower_bound = false;
    return seq;
}

// ── interaction-case classifier ────────────────────────────────────────────

// Which convolution estimate governs the pair (ξ1, ξ2):
//   SIGN_SPLIT   — opposite signs ξ1ξ2 < 0;
//   FACTOR_LARGE — same signs with |1 − 4/(3ξ²ξ1ξ2)| > 1/2 (the quartered-
//                  phase factor gives full strength);
//   FACTOR_SMALL — same signs with the factor ≤ 1/2, equivalently
//                  ξ1(ξ−ξ1) inside the window [8/(9ξ²), 8/(3ξ²)].
enum class CaseLabel { SIGN_SPLIT, FACTOR_LARGE, FACTOR_SMALL };

inline const char* to_string(CaseLabel c) {
    switch (c) {
        case CaseLabel::SIGN_SPLIT: return "SIGN_SPLIT";
        case CaseLabel::FACTOR_LARGE: return "FACTOR_LARGE";
        case CaseLabel::FACTOR_SMALL: return "FACTOR_SMALL";
    }
    return "?";
}

inline CaseLabel case_condition(const FrequencyTriple& t) {
    t.require_output_nonzero();
    if (t.xi1 * t.xi2 < 0.0) return CaseLabel::SIGN_SPLIT;
    const double xi = t.xi();
    const double factor = 1.0 - 4.0 / (3.0 * xi * xi * t.xi1 * t.xi2);
    return std::abs(factor) > 0.5 ? CaseLabel::FACTOR_LARGE : CaseLabel::FACTOR_SMALL;
}

}  // namespace speclab
