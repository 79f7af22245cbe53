#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "sskel/geom.hpp"
#include "sskel/polygon.hpp"

using namespace sskel;

TEST_CASE("orient2d basic signs") {
    CHECK(orient2d_sign({0, 0}, {1, 0}, {0, 1}) == +1);
    CHECK(orient2d_sign({0, 0}, {1, 0}, {2, 0}) == 0);
    CHECK(orient2d_sign({0, 0}, {0, 1}, {1, 0}) == -1);
}

TEST_CASE("orient2d antisymmetry on random triples") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 2000; k++) {
        Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)}, c{u(rng), u(rng)};
        CHECK(orient2d_sign(a, b, c) == -orient2d_sign(a, c, b));
    }
    // Near-collinear grid points stress the adaptive path.
    for (int k = 0; k < 500; k++) {
        double base = 1.0 + k * 1e-3;
        Point2 a{base, base}, b{2 * base, 2 * base};
        Point2 c{3 * base + 1e-17, 3 * base - 1e-17};
        CHECK(orient2d_sign(a, b, c) == -orient2d_sign(a, c, b));
    }
}

TEST_CASE("orient2d exactness on collinear points") {
    // Points exactly collinear in doubles must report 0, even when the
    // naive determinant underflows into rounding noise.
    Point2 a{0.5, 0.5};
    for (int i = 1; i < 50; i++) {
        Point2 b{0.5 + i * 0.125, 0.5 + i * 0.125};
        Point2 c{0.5 + (i + 7) * 0.125, 0.5 + (i + 7) * 0.125};
        CHECK(orient2d_sign(a, b, c) == 0);
    }
}

TEST_CASE("vertex_velocity square corner") {
    // Interior angle pi/2: speed sqrt(2) along the diagonal.
    Vec2 w = vertex_velocity({0, 1}, {0, 0}, {1, 0});
    CHECK_THAT(w.norm(), Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));
    CHECK_THAT(w.x, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(w.y, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("vertex_velocity reflex corner of an L") {
    // L-shape reflex vertex at (1,1): edges (2,1)->(1,1) and (1,1)->(1,2),
    // interior below/left. Interior angle 3pi/2, speed sqrt(2), heading
    // into the interior wedge.
    Vec2 w = vertex_velocity({2, 1}, {1, 1}, {1, 2});
    CHECK_THAT(w.x, Catch::Matchers::WithinAbs(-1.0, 1e-12));
    CHECK_THAT(w.y, Catch::Matchers::WithinAbs(-1.0, 1e-12));
    CHECK_THAT(w.norm(), Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));
}

TEST_CASE("vertex_velocity flat limit") {
    // Interior angle pi - eps: speed tends to 1.
    double prev_err = 1.0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        Point2 a{-1, 0}, v{0, 0}, b{std::cos(eps), std::sin(eps)};
        Vec2 w = vertex_velocity(a, v, b);
        double err = std::fabs(w.norm() - 1.0);
        CHECK(err < eps);
        CHECK(err < prev_err);
        prev_err = err;
    }
}

TEST_CASE("vertex_velocity unit normal speed property") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0.05, 2.0 * 3.14159265358979 - 0.05);
    int tested = 0;
    while (tested < 1000) {
        double t1 = ang(rng), t2 = ang(rng);
        if (std::fabs(t2 - 3.14159265358979) < 1e-3) continue;  // skip near-flat fold
        Point2 v{0, 0};
        Point2 a{std::cos(t1), std::sin(t1)};
        // next edge leaves v in direction t1 + pi - t2 so the interior angle is t2.
        double dir = t1 + 3.141592653589793238 - t2;
        Point2 b{std::cos(dir), std::sin(dir)};
        Vec2 w;
        try {
            w = vertex_velocity(a, v, b);
        } catch (const degeneracy_error&) {
            continue;
        }
        Vec2 n1 = inward_normal(a, v);
        Vec2 n2 = inward_normal(v, b);
        CHECK_THAT(w.dot(n1), Catch::Matchers::WithinAbs(1.0, 1e-9));
        CHECK_THAT(w.dot(n2), Catch::Matchers::WithinAbs(1.0, 1e-9));
        tested++;
    }
}

TEST_CASE("edge_plane axis-aligned and diagonal") {
    Plane bottom = edge_plane({0, 0}, {1, 0});
    CHECK_THAT(bottom.eval({0.5, 0.3}), Catch::Matchers::WithinAbs(0.3, 1e-15));

    Plane top = edge_plane({1, 1}, {0, 1});
    CHECK_THAT(top.eval({0.5, 0.3}), Catch::Matchers::WithinAbs(0.7, 1e-15));

    // Edge (0,0)->(1,1), interior above-left: z = (y - x)/sqrt(2).
    Plane diag = edge_plane({0, 0}, {1, 1});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 10; k++) {
        Point2 p{u(rng), u(rng)};
        double expected = (p.y - p.x) / std::sqrt(2.0);
        CHECK_THAT(diag.eval(p), Catch::Matchers::WithinAbs(expected, 1e-12));
        // Independent route: signed distance to the supporting line.
        double d = orient2d({0, 0}, {1, 1}, p) / dist({0, 0}, {1, 1});
        CHECK_THAT(diag.eval(p), Catch::Matchers::WithinAbs(d, 1e-12));
    }
}

TEST_CASE("edge_plane gradient has unit norm") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int k = 0; k < 200; k++) {
        Point2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
        if (dist(a, b) < 1e-6) continue;
        if (std::fabs(b.x - a.x) <= epsilon() * dist(a, b)) continue;
        Plane pl = edge_plane(a, b);
        CHECK_THAT(pl.gradient().norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
        CHECK_THAT(pl.eval(a), Catch::Matchers::WithinAbs(0.0, 1e-12 * (1.0 + a.norm())));
        CHECK_THAT(pl.eval(b), Catch::Matchers::WithinAbs(0.0, 1e-12 * (1.0 + b.norm())));
    }
}

TEST_CASE("edge_plane rejects vertical edges") {
    CHECK_THROWS_AS(edge_plane({1, 0}, {1, 5}), degeneracy_error);
}

TEST_CASE("polygon normalization and reflex flags") {
    // L-shape given clockwise on purpose; normalization flips it.
    Polygon poly = make_polygon({{{0, 0}, {0, 2}, {1, 2}, {1, 1}, {2, 1}, {2, 0}}});
    REQUIRE(poly.rings[0].size() == 6);
    CHECK(ring_signed_area(poly.rings[0]) > 0.0);
    CHECK(poly.reflex_count() == 1);

    std::size_t reflex_idx = 0;
    for (std::size_t i = 0; i < 6; i++)
        if (poly.reflex[0][i]) reflex_idx = i;
    CHECK(near_point(poly.rings[0][reflex_idx], {1, 1}, 1e-12));
}

TEST_CASE("validate accepts a rotated square and flags a vertical one") {
    Polygon sq = make_polygon({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
    auto report = validate(sq);
    CHECK_FALSE(report.ok());
    CHECK_FALSE(report.hard_reject);
    int verticals = 0;
    for (const auto& v : report.violations)
        if (v.kind == GeneralPositionViolation::Kind::vertical_edge) verticals++;
    CHECK(verticals == 2);

    Polygon rot = rotated_polygon(sq, 1e-3);
    CHECK(validate(rot).ok());
}

TEST_CASE("validate hard-rejects a bowtie") {
    Polygon bow = make_polygon({{{0, 0}, {2, 2}, {2, 0}, {0, 2}}});
    auto report = validate(bow);
    CHECK(report.hard_reject);
}

TEST_CASE("validate checks hole containment") {
    Polygon bad = make_polygon({{{0, 0}, {10, 0}, {10, 10}, {0, 10}},
                                {{20, 20}, {21, 20}, {21, 21}, {20, 21}}});
    auto report = validate(bad);
    CHECK(report.hard_reject);

    Polygon good = make_polygon({{{0, 1e-4}, {10, 0}, {10.001, 10}, {0.002, 10.002}},
                                 {{4, 4.0001}, {6, 4}, {6.0001, 6}, {4.0002, 6}}});
    CHECK(validate(good).ok());
    CHECK(ring_signed_area(good.rings[1]) < 0.0);
    CHECK(good.reflex_count() == 4);
}

TEST_CASE("point_in_polygon respects holes") {
    Polygon ring = make_polygon({{{0, 0}, {10, 0}, {10, 10}, {0, 10}},
                                 {{4, 4}, {6, 4}, {6, 6}, {4, 6}}});
    CHECK(point_in_polygon({1, 1}, ring));
    CHECK_FALSE(point_in_polygon({5, 5}, ring));
    CHECK_FALSE(point_in_polygon({-1, 5}, ring));
    CHECK_THAT(polygon_area(ring), Catch::Matchers::WithinAbs(96.0, 1e-12));
}
