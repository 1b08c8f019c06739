// Convex-geometry primitives: shoelace areas, Sutherland–Hodgman clipping,
// point membership, and validated parallelograms.
//
// Clipping is cross-checked three ways: against hand-computed rectangle
// overlaps, against the exact translated-copy overlap formula
// area·(1−|a|)(1−|c|), and against a 10⁵-point Monte-Carlo membership count.

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "speclab/polygon.hpp"
#include "speclab/rng.hpp"

using namespace speclab;

namespace {

Polygon unit_square() {
    return {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
}

// Random parallelogram with moderate slant and O(1) edges.
Parallelogram random_parallelogram(std::uint64_t seed) {
    counter_rng rng(seed, 21);
    const PlanePoint v0{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    const PlanePoint e1{rng.uniform(1.0, 2.0), rng.uniform(-0.4, 0.4)};
    const PlanePoint e2{rng.uniform(-0.4, 0.4), rng.uniform(1.0, 2.0)};
    return Parallelogram({v0, v0 + e1, v0 + e1 + e2, v0 + e2});
}

}  // namespace

TEST_CASE("shoelace area matches hand-computed polygons") {
    CHECK(polygon_area(unit_square()) == Catch::Approx(1.0));
    const Polygon tri = {{0.0, 0.0}, {2.0, 0.0}, {0.0, 1.0}};
    CHECK(polygon_area(tri) == Catch::Approx(1.0));

    // Orientation invariance: reversing the vertex list flips the sign only.
    Polygon rev(tri.rbegin(), tri.rend());
    CHECK(signed_area(tri) == Catch::Approx(-signed_area(rev)));
    CHECK(polygon_area(rev) == polygon_area(tri));

    CHECK(polygon_area({}) == 0.0);
    CHECK(polygon_area({{0.0, 0.0}, {1.0, 1.0}}) == 0.0);
}

TEST_CASE("clipping reproduces hand-computed overlaps") {
    const Polygon sq = unit_square();

    SECTION("self-intersection returns the full area") {
        CHECK(polygon_area(clip_convex(sq, sq)) == Catch::Approx(1.0).epsilon(1e-12));
    }
    SECTION("shifted squares overlap in a rectangle") {
        Polygon shifted;
        for (PlanePoint p : sq) shifted.push_back(p + PlanePoint{0.25, 0.5});
        CHECK(polygon_area(clip_convex(sq, shifted)) ==
              Catch::Approx(0.75 * 0.5).epsilon(1e-12));
    }
    SECTION("disjoint shapes clip to the empty set") {
        Polygon far;
        for (PlanePoint p : sq) far.push_back(p + PlanePoint{5.0, 0.0});
        CHECK(clip_convex(sq, far).empty());
    }
    SECTION("clipping works regardless of vertex orientation") {
        Polygon cw(sq.rbegin(), sq.rend());
        Polygon shifted;
        for (PlanePoint p : sq) shifted.push_back(p + PlanePoint{0.5, 0.25});
        CHECK(polygon_area(clip_convex(cw, shifted)) ==
              Catch::Approx(0.5 * 0.75).epsilon(1e-12));
    }
}

TEST_CASE("clipping is symmetric in its arguments") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Parallelogram P = random_parallelogram(seed);
        const Parallelogram Q = random_parallelogram(seed + 1000);
        const double pq = polygon_area(clip_convex(P.polygon(), Q.polygon()));
        const double qp = polygon_area(clip_convex(Q.polygon(), P.polygon()));
        CHECK(std::abs(pq - qp) <= 1e-12 * (1.0 + pq));
    }
}

TEST_CASE("translated-copy overlap matches the exact product formula") {
    counter_rng rng(7, 22);
    for (int trial = 0; trial < 40; ++trial) {
        const Parallelogram P = random_parallelogram(100 + trial);
        const double a = rng.uniform(-0.9, 0.9);
        const double c = rng.uniform(-0.9, 0.9);
        const PlanePoint delta = a * P.edge1() + c * P.edge2();
        const Parallelogram Q = P.translated(delta);
        const double clipped = polygon_area(clip_convex(P.polygon(), Q.polygon()));
        const double exact = parallelogram_self_overlap(P, a, c);
        CHECK(std::abs(clipped - exact) <= 1e-10 * (1.0 + exact));
    }
}

TEST_CASE("clipped area agrees with Monte-Carlo membership counting") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Parallelogram P = random_parallelogram(seed);
        counter_rng shift_rng(seed, 23);
        const PlanePoint delta = shift_rng.uniform(-0.3, 0.3) * P.edge1() +
                                 shift_rng.uniform(-0.3, 0.3) * P.edge2();
        const Parallelogram Q = P.translated(delta);

        const Polygon inter = clip_convex(P.polygon(), Q.polygon());
        REQUIRE(!inter.empty());
        const double exact = polygon_area(inter);

        // Sample inside the bounding box of the clipped region.
        double tlo = inter[0].tau, thi = tlo, xlo = inter[0].xi, xhi = xlo;
        for (const PlanePoint& v : inter) {
            tlo = std::min(tlo, v.tau);
            thi = std::max(thi, v.tau);
            xlo = std::min(xlo, v.xi);
            xhi = std::max(xhi, v.xi);
        }
        counter_rng rng(seed, 24);
        const std::size_t n_points = 100000;
        std::size_t hits = 0;
        const Polygon pp = P.polygon(), qp = Q.polygon();
        for (std::size_t i = 0; i < n_points; ++i) {
            const PlanePoint z{rng.uniform(tlo, thi), rng.uniform(xlo, xhi)};
            if (point_in_convex(pp, z) && point_in_convex(qp, z)) ++hits;
        }
        const double mc = (thi - tlo) * (xhi - xlo) * static_cast<double>(hits) /
                          static_cast<double>(n_points);
        CHECK(std::abs(mc - exact) <= 0.01 * exact);
    }
}

TEST_CASE("point membership includes boundary and excludes exterior") {
    const Polygon sq = unit_square();
    CHECK(point_in_convex(sq, {0.5, 0.5}));
    CHECK(point_in_convex(sq, {0.0, 0.5}));   // edge
    CHECK(point_in_convex(sq, {1.0, 1.0}));   // vertex
    CHECK(!point_in_convex(sq, {1.5, 0.5}));
    CHECK(!point_in_convex(sq, {0.5, -0.01}));
}

TEST_CASE("parallelogram validation accepts closed shapes and rejects others") {
    SECTION("valid slanted shape") {
        const Parallelogram P({PlanePoint{0.0, 0.0}, PlanePoint{2.0, 0.1},
                               PlanePoint{2.5, 1.1}, PlanePoint{0.5, 1.0}});
        CHECK(P.area() == Catch::Approx(2.0 * 1.0 - 0.1 * 0.5));
    }
    SECTION("closure violation throws") {
        CHECK_THROWS_AS(Parallelogram({PlanePoint{0.0, 0.0}, PlanePoint{1.0, 0.0},
                                       PlanePoint{2.0, 1.1}, PlanePoint{1.0, 1.0}}),
                        std::domain_error);
    }
    SECTION("degenerate (zero area) throws") {
        CHECK_THROWS_AS(Parallelogram({PlanePoint{0.0, 0.0}, PlanePoint{1.0, 0.0},
                                       PlanePoint{2.0, 0.0}, PlanePoint{1.0, 0.0}}),
                        std::domain_error);
    }
}

TEST_CASE("parallelogram transforms preserve shape") {
    const Parallelogram P = random_parallelogram(9);

    SECTION("translation moves vertices, keeps area") {
        const Parallelogram T = P.translated({3.0, -1.0});
        CHECK(T.area() == P.area());
        CHECK(T.vertex(2).tau == Catch::Approx(P.vertex(2).tau + 3.0));
        CHECK(T.vertex(2).xi == Catch::Approx(P.vertex(2).xi - 1.0));
    }
    SECTION("centering puts the center at the origin") {
        const Parallelogram C = P.centered();
        CHECK(std::abs(C.center().tau) <= 1e-12 * (1.0 + std::abs(P.center().tau)));
        CHECK(std::abs(C.center().xi) <= 1e-12 * (1.0 + std::abs(P.center().xi)));
        CHECK(C.area() == P.area());
    }
    SECTION("reflection negates the center, keeps area") {
        const Parallelogram R = P.reflected();
        CHECK(R.area() == P.area());
        CHECK(R.center().tau == Catch::Approx(-P.center().tau));
        CHECK(R.center().xi == Catch::Approx(-P.center().xi));
    }
}

TEST_CASE("minkowski_double builds the doubled-edge sum parallelogram") {
    const Parallelogram P = random_parallelogram(11);

    SECTION("sum with own reflection is centered at the origin") {
        const Parallelogram S = P.minkowski_double(P.reflected());
        CHECK(S.area() == Catch::Approx(4.0 * P.area()).epsilon(1e-12));
        CHECK(std::abs(S.center().tau) <= 1e-9 * (1.0 + std::abs(P.center().tau)));
        CHECK(std::abs(S.center().xi) <= 1e-9 * (1.0 + std::abs(P.center().xi)));
    }
    SECTION("sum with the centered copy sits at the original center") {
        const Parallelogram S = P.minkowski_double(P.centered());
        CHECK(S.area() == Catch::Approx(4.0 * P.area()).epsilon(1e-12));
        CHECK(S.center().tau == Catch::Approx(P.center().tau));
        CHECK(S.center().xi == Catch::Approx(P.center().xi));
    }
    SECTION("mismatched edge vectors are rejected") {
        const Parallelogram Q = random_parallelogram(12);
        CHECK_THROWS_AS(P.minkowski_double(Q), std::invalid_argument);
    }
}
