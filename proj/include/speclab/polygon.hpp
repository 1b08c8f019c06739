#pragma once
// Convex geometry in the (τ, ξ) plane: shoelace areas, Sutherland–Hodgman
// clipping, and validated parallelograms.
//
// The indicator-support experiments work with parallelograms whose τ extent
// (∼N³) dwarfs their ξ extent (∼N^{−1/2}); areas and overlaps are therefore
// computed from exact vertex geometry, never by rasterizing onto a lattice.
// A Parallelogram keeps its four defining vertices separate from a
// translation offset so recentering a far-from-origin shape does not disturb
// the edge vectors.
//
// Polygons are vertex lists; the empty list is the empty set.  Clipping
// accepts either orientation and normalizes internally.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace speclab {

struct PlanePoint {
    double tau = 0.0;
    double xi = 0.0;
};

inline PlanePoint operator+(PlanePoint a, PlanePoint b) { return {a.tau + b.tau, a.xi + b.xi}; }
inline PlanePoint operator-(PlanePoint a, PlanePoint b) { return {a.tau - b.tau, a.xi - b.xi}; }
inline PlanePoint operator*(double c, PlanePoint p) { return {c * p.tau, c * p.xi}; }
inline PlanePoint operator-(PlanePoint p) { return {-p.tau, -p.xi}; }

// 2-D cross product of the vectors a and b.
inline double cross(PlanePoint a, PlanePoint b) { return a.tau * b.xi - a.xi * b.tau; }

using Polygon = std::vector<PlanePoint>;

// Signed shoelace area: positive for counter-clockwise vertex order.
inline double signed_area(const Polygon& poly) {
    if (poly.size() < 3) return 0.0;
    double twice = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const PlanePoint& a = poly[i];
        const PlanePoint& b = poly[(i + 1) % poly.size()];
        twice += cross(a, b);
    }
    return 0.5 * twice;
}

inline double polygon_area(const Polygon& poly) { return std::abs(signed_area(poly)); }

inline Polygon ensure_counterclockwise(Polygon poly) {
    if (signed_area(poly) < 0.0) {
        Polygon rev(poly.rbegin(), poly.rend());
        return rev;
    }
    return poly;
}

// Intersection of two convex polygons by Sutherland–Hodgman clipping of the
// subject against each window edge.  Returns a (possibly empty) convex
// polygon; boundary points count as inside.
inline Polygon clip_convex(const Polygon& subject, const Polygon& window) {
    if (subject.size() < 3 || window.size() < 3) return {};
    Polygon out = ensure_counterclockwise(subject);
    const Polygon win = ensure_counterclockwise(window);
    for (std::size_t e = 0; e < win.size() && !out.empty(); ++e) {
        const PlanePoint a = win[e];
        const PlanePoint b = win[(e + 1) % win.size()];
        const PlanePoint dir = b - a;
        Polygon next;
        next.reserve(out.size() + 1);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const PlanePoint p = out[i];
            const PlanePoint q = out[(i + 1) % out.size()];
            const double sp = cross(dir, p - a);  // ≥ 0: p left of edge (inside)
            const double sq = cross(dir, q - a);
            if (sp >= 0.0) next.push_back(p);
            if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
                const double t = sp / (sp - sq);  // p + t·(q − p) lies on the edge
                next.push_back(p + t * (q - p));
            }
        }
        out = std::move(next);
    }
    if (out.size() < 3) return {};
    return out;
}

// Point-in-convex-polygon test; boundary points count as inside.
inline bool point_in_convex(const Polygon& poly, PlanePoint z) {
    if (poly.size() < 3) return false;
    const Polygon p = ensure_counterclockwise(poly);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const PlanePoint a = p[i];
        const PlanePoint b = p[(i + 1) % p.size()];
        if (cross(b - a, z - a) < 0.0) return false;
    }
    return true;
}

// Parallelogram with vertices listed in boundary order.  The opposite-vertex
// sums must agree (v0 + v2 = v1 + v3) within 1e−9 relative per coordinate,
// and the area must be strictly positive.  `origin_offset` translates every
// vertex; it participates in geometry but not in the closure check.
struct Parallelogram {
    std::array<PlanePoint, 4> vertices;
    PlanePoint origin_offset{};

    explicit Parallelogram(std::array<PlanePoint, 4> vs, PlanePoint offset = {})
        : vertices(vs), origin_offset(offset) {
        const PlanePoint r = (vs[0] + vs[2]) - (vs[1] + vs[3]);
        double scale_tau = 1.0, scale_xi = 1.0;
        for (const PlanePoint& v : vs) {
            scale_tau = std::max(scale_tau, std::abs(v.tau));
            scale_xi = std::max(scale_xi, std::abs(v.xi));
        }
        if (std::abs(r.tau) > 1e-9 * scale_tau || std::abs(r.xi) > 1e-9 * scale_xi)
            throw std::domain_error(
                "Parallelogram: opposite-vertex sums disagree (closure violated)");
        if (!(area() > 0.0))
            throw std::domain_error("Parallelogram: degenerate (zero area)");
    }

    PlanePoint vertex(std::size_t i) const { return vertices[i] + origin_offset; }

    // Edge vectors out of vertex 0; every point is v0 + a·e1 + c·e2 with
    // (a, c) ∈ [0,1]².
    PlanePoint edge1() const { return vertices[1] - vertices[0]; }
    PlanePoint edge2() const { return vertices[3] - vertices[0]; }

    double area() const { return std::abs(cross(edge1(), edge2())); }

    PlanePoint center() const {
        return 0.25 * (vertices[0] + vertices[1] + vertices[2] + vertices[3]) +
               origin_offset;
    }

    Polygon polygon() const {
        return {vertex(0), vertex(1), vertex(2), vertex(3)};
    }

    Parallelogram translated(PlanePoint delta) const {
        return Parallelogram(vertices, origin_offset + delta);
    }

    // Shape recentered at the origin (offset absorbs the current center).
    Parallelogram centered() const {
        return Parallelogram(vertices, origin_offset - center());
    }

    // Point reflection through the origin: z ↦ −z.
    Parallelogram reflected() const {
        return Parallelogram({-vertices[0], -vertices[1], -vertices[2], -vertices[3]},
                             -origin_offset);
    }

    // Minkowski sum with another parallelogram that has the SAME edge vectors
    // (or their negatives): a parallelogram with doubled edges centered at the
    // sum of centers.
    Parallelogram minkowski_double(const Parallelogram& other) const {
        const PlanePoint e1 = edge1(), e2 = edge2();
        const PlanePoint oe1 = other.edge1(), oe2 = other.edge2();
        const double scale1 = std::max({1.0, std::abs(e1.tau), std::abs(e1.xi)});
        const double scale2 = std::max({1.0, std::abs(e2.tau), std::abs(e2.xi)});
        auto matches = [](PlanePoint a, PlanePoint b, double scale) {
            const PlanePoint d1 = a - b, d2 = a + b;
            const double m1 = std::max(std::abs(d1.tau), std::abs(d1.xi));
            const double m2 = std::max(std::abs(d2.tau), std::abs(d2.xi));
            return std::min(m1, m2) <= 1e-9 * scale;
        };
        if (!matches(e1, oe1, scale1) || !matches(e2, oe2, scale2))
            throw std::invalid_argument(
                "minkowski_double: edge vectors differ between the two shapes");
        const PlanePoint c = center() + other.center();
        const std::array<PlanePoint, 4> vs = {c - e1 - e2, c + e1 - e2, c + e1 + e2,
                                              c - e1 + e2};
        return Parallelogram(vs);
    }
};

// Exact overlap area of a parallelogram with its own copy translated by
// d = a·e1 + c·e2: area·(1−|a|)⁺·(1−|c|)⁺.  Oracle for clipping and for
// indicator autocorrelations.
inline double parallelogram_self_overlap(const Parallelogram& p, double a, double c) {
    const double fa = std::max(0.0, 1.0 - std::abs(a));
    const double fc = std::max(0.0, 1.0 - std::abs(c));
    return p.area() * fa * fc;
}

}  // namespace speclab
