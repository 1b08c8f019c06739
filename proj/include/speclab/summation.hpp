#pragma once
// Reproducible and compensated summation, plus double-double arithmetic.
//
// Three tools with distinct jobs:
//   • pairwise_sum   — fixed-shape binary-tree reduction.  The evaluation
//                      order depends only on the length, so results are
//                      bit-identical across runs and platforms with IEEE
//                      doubles, and the error grows like O(log n)·eps.
//   • neumaier_sum   — improved Kahan summation (Neumaier variant); one
//                      pass, error independent of n for well-scaled data.
//   • dd (double-double) — an unevaluated sum hi+lo of two doubles giving
//                      ~31 significant digits.  Built on the error-free
//                      transforms TwoSum and TwoProd (via std::fma).
//                      Needed wherever two O(1e9) quantities must agree to
//                      1e-12 *relative* accuracy after cancellation.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace speclab {

// ── pairwise (binary tree) summation ──────────────────────────────────────

inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = xs[0];
        for (std::size_t i = 1; i < n; ++i) s += xs[i];
        return s;
    }
    // Split at the largest power of two strictly below n so the tree shape
    // is a function of n alone.
    std::size_t half = 1;
    while (half * 2 < n) half *= 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& xs) {
    return pairwise_sum(std::span<const double>(xs));
}

// ── Neumaier compensated summation ────────────────────────────────────────

inline double neumaier_sum(std::span<const double> xs) {
    double sum = 0.0;
    double comp = 0.0;  // running compensation for lost low-order bits
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

inline double neumaier_sum(const std::vector<double>& xs) {
    return neumaier_sum(std::span<const double>(xs));
}

// ── error-free transforms ──────────────────────────────────────────────────

struct two_part {
    double value;
    double error;
};

// s = fl(a+b) and the exact rounding error, no branch (Knuth).
inline two_part two_sum(double a, double b) {
    const double s = a + b;
    const double bp = s - a;
    const double err = (a - (s - bp)) + (b - bp);
    return {s, err};
}

// Requires |a| >= |b| (or a == 0); cheaper variant (Dekker).
inline two_part quick_two_sum(double a, double b) {
    const double s = a + b;
    const double err = b - (s - a);
    return {s, err};
}

// p = fl(a*b) and the exact error, using fused multiply-add.
inline two_part two_prod(double a, double b) {
    const double p = a * b;
    const double err = std::fma(a, b, -p);
    return {p, err};
}

// ── double-double arithmetic ───────────────────────────────────────────────

struct dd {
    double hi = 0.0;
    double lo = 0.0;

    constexpr dd() = default;
    constexpr dd(double h) : hi(h), lo(0.0) {}
    constexpr dd(double h, double l) : hi(h), lo(l) {}

    double to_double() const { return hi + lo; }
};

inline dd dd_add(dd a, dd b) {
    two_part s = two_sum(a.hi, b.hi);
    two_part t = two_sum(a.lo, b.lo);
    s.error += t.value;
    s = quick_two_sum(s.value, s.error);
    s.error += t.error;
    s = quick_two_sum(s.value, s.error);
    return {s.value, s.error};
}

inline dd dd_neg(dd a) { return {-a.hi, -a.lo}; }

inline dd dd_sub(dd a, dd b) { return dd_add(a, dd_neg(b)); }

inline dd dd_mul(dd a, dd b) {
    two_part p = two_prod(a.hi, b.hi);
    p.error += a.hi * b.lo + a.lo * b.hi;
    p = quick_two_sum(p.value, p.error);
    return {p.value, p.error};
}

inline dd dd_div(dd a, dd b) {
    if (b.hi == 0.0) throw std::domain_error("dd_div: division by zero");
    const double q1 = a.hi / b.hi;
    dd r = dd_sub(a, dd_mul(b, dd(q1)));
    const double q2 = r.hi / b.hi;
    r = dd_sub(r, dd_mul(b, dd(q2)));
    const double q3 = r.hi / b.hi;
    two_part q = quick_two_sum(q1, q2);
    return dd_add(dd(q.value, q.error), dd(q3));
}

inline dd dd_abs(dd a) { return (a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0)) ? dd_neg(a) : a; }

inline bool dd_less(dd a, dd b) {
    return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}

}  // namespace speclab
