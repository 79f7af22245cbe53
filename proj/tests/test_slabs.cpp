#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sskel/slab.hpp"

using namespace sskel;

namespace {

Polygon l_shape() {
    return make_polygon({{{-1, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 3}, {-1, 3}}});
}

Polygon unit_square() { return make_polygon({{{0, 0}, {1, 0}, {1, 1}, {0, 1}}}); }

}  // namespace

TEST_CASE("slab counts") {
    SECTION("convex n-gon has only edge slabs") {
        Polygon hex = make_polygon(
            {{{2, 0}, {4, 1}, {4, 3}, {2, 4}, {0, 3}, {0, 1}}});
        auto graph = compute_motorcycle_graph(hex);
        auto set = build_slabs(hex, graph);
        CHECK(set.size() == 6);
        CHECK(set.edge_count == 6);
    }
    SECTION("L-shape: 6 edge slabs + 2 motorcycle slabs") {
        Polygon poly = l_shape();
        auto graph = compute_motorcycle_graph(poly);
        auto set = build_slabs(poly, graph);
        CHECK(set.size() == 8);
        CHECK(set.edge_count == 6);
    }
    SECTION("n + 2r on a two-spike polygon") {
        Polygon poly = make_polygon({{{0, 0},
                                      {12, 0},
                                      {12, 8},
                                      {8, 8},
                                      {7, 3},
                                      {6, 8},
                                      {4, 8},
                                      {3.2, 4},
                                      {2, 8},
                                      {0, 8}}});
        auto graph = compute_motorcycle_graph(poly);
        auto set = build_slabs(poly, graph);
        CHECK(set.size() == poly.vertex_count() + 2 * poly.reflex_count());
    }
}

TEST_CASE("slab planes contain their sources") {
    Polygon poly = l_shape();
    auto graph = compute_motorcycle_graph(poly);
    auto set = build_slabs(poly, graph);
    for (const Slab& s : set.slabs) {
        CHECK_THAT(s.plane.gradient().norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
        CHECK_THAT(s.plane.eval(s.base_a), Catch::Matchers::WithinAbs(s.base_z0, 1e-9));
        CHECK_THAT(s.plane.eval(s.base_b), Catch::Matchers::WithinAbs(s.base_z1, 1e-9));
    }
}

TEST_CASE("height_at strip membership") {
    Polygon sq = unit_square();
    auto set = build_slabs(sq, MotorcycleGraph{});
    const Slab& bottom = set.slabs[0];  // edge (0,0)->(1,0)
    REQUIRE(bottom.height_at({0.5, 0.3}).has_value());
    CHECK_THAT(*bottom.height_at({0.5, 0.3}), Catch::Matchers::WithinAbs(0.3, 1e-15));
    CHECK_FALSE(bottom.height_at({0.5, -0.2}).has_value());  // behind the base edge
    CHECK_FALSE(bottom.height_at({1.5, 0.3}).has_value());   // beyond a side ray
}

TEST_CASE("terrain oracle on the unit square") {
    Polygon sq = unit_square();
    auto set = build_slabs(sq, MotorcycleGraph{});
    CHECK_THAT(terrain_height_oracle(set, sq, {0.5, 0.5}),
               Catch::Matchers::WithinAbs(0.5, 1e-12));
    CHECK_THAT(terrain_height_oracle(set, sq, {0.5, 0.25}),
               Catch::Matchers::WithinAbs(0.25, 1e-12));
    CHECK_THROWS_AS(terrain_height_oracle(set, sq, {2.0, 0.5}), invariant_error);
}

TEST_CASE("terrain oracle equals clearance on convex polygons") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // Random convex polygon: points on a stretched circle, then the hull
    // order is just the angular order.
    std::vector<Point2> pts;
    int m = 9;
    for (int i = 0; i < m; i++) {
        double ang = (i + 0.2 + 0.6 * u(rng)) * 2.0 * M_PI / m;
        double rad = 3.0 + 1.5 * u(rng);
        pts.push_back({rad * std::cos(ang) * 1.3, rad * std::sin(ang)});
    }
    Polygon poly = make_polygon({pts});
    REQUIRE(poly.reflex_count() == 0);
    auto set = build_slabs(poly, MotorcycleGraph{});

    int tested = 0;
    while (tested < 300) {
        Point2 p{u(rng) * 12.0 - 6.0, u(rng) * 10.0 - 5.0};
        if (!point_in_polygon(p, poly)) continue;
        double clearance = std::numeric_limits<double>::max();
        for (std::size_t i = 0; i < pts.size(); i++)
            clearance = std::min(clearance,
                                 point_segment_distance(p, poly.rings[0][i],
                                                        poly.rings[0][(i + 1) % m]));
        CHECK_THAT(terrain_height_oracle(set, poly, p),
                   Catch::Matchers::WithinAbs(clearance, 1e-8));
        tested++;
    }
}
