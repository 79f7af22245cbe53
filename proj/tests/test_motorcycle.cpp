#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sskel/motorcycle.hpp"
#include "sskel/polygon.hpp"

using namespace sskel;

namespace {

// Fixtures reused across suites.
Polygon l_shape() {
    // One reflex vertex at (1,1); its track runs down-left and stops on the
    // interior of the bottom edge.
    return make_polygon({{{-1, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 3}, {-1, 3}}});
}

// Dense time-step simulation: advance all motorcycles by dt, halting a rider
// as soon as its step segment touches the boundary or a previously laid
// track. Independent of the event-driven implementation.
struct StepOracle {
    struct Rider {
        Point2 pos;
        bool active = true;
        double stop_time = 0.0;
        Point2 stop;
    };
    std::vector<Rider> riders;

    StepOracle(const std::vector<Motorcycle>& cycles, const Polygon& poly, double dt,
               double t_max) {
        riders.resize(cycles.size());
        std::vector<std::vector<Point2>> trails(cycles.size());
        for (std::size_t i = 0; i < cycles.size(); i++) {
            riders[i].pos = cycles[i].start;
            trails[i].push_back(cycles[i].start);
        }
        for (double t = 0.0; t < t_max; t += dt) {
            for (std::size_t i = 0; i < cycles.size(); i++) {
                if (!riders[i].active) continue;
                Point2 from = riders[i].pos;
                Point2 to = cycles[i].position(t + dt);
                bool hit = false;
                // Boundary first.
                for (const auto& ring : poly.rings) {
                    for (std::size_t k = 0; k < ring.size() && !hit; k++) {
                        double u, v;
                        if (!segment_intersection_params(from, to, ring[k],
                                                         ring[(k + 1) % ring.size()], u, v))
                            continue;
                        if (u > 1e-9 && u <= 1.0 && v >= 0.0 && v <= 1.0) hit = true;
                    }
                    if (hit) break;
                }
                // Other riders' trails.
                for (std::size_t j = 0; j < cycles.size() && !hit; j++) {
                    if (j == i) continue;
                    const auto& trail = trails[j];
                    for (std::size_t k = 0; k + 1 < trail.size() && !hit; k++) {
                        double u, v;
                        if (!segment_intersection_params(from, to, trail[k], trail[k + 1], u, v))
                            continue;
                        if (u > -1e-12 && u <= 1.0 && v >= 0.0 && v <= 1.0) hit = true;
                    }
                }
                if (hit) {
                    riders[i].active = false;
                    riders[i].stop_time = t + dt;
                    riders[i].stop = to;
                } else {
                    riders[i].pos = to;
                    trails[i].push_back(to);
                }
            }
        }
    }
};

}  // namespace

TEST_CASE("induce_motorcycles on a convex polygon is empty") {
    Polygon tri = make_polygon({{{0, 0}, {4, 1}, {1, 3}}});
    CHECK(induce_motorcycles(tri).empty());
}

TEST_CASE("induce_motorcycles on the L-shape") {
    Polygon poly = l_shape();
    auto cycles = induce_motorcycles(poly);
    REQUIRE(cycles.size() == 1);
    CHECK_THAT(cycles[0].speed(), Catch::Matchers::WithinAbs(std::sqrt(2.0), 1e-12));
    CHECK(near_point(cycles[0].start, {1, 1}, 1e-12));
    CHECK_THAT(cycles[0].velocity.x, Catch::Matchers::WithinAbs(-1.0, 1e-12));
    CHECK_THAT(cycles[0].velocity.y, Catch::Matchers::WithinAbs(-1.0, 1e-12));
}

TEST_CASE("induce_motorcycles counts reflex vertices") {
    // Two downward spikes from the top edge, one reflex vertex each.
    Polygon poly = make_polygon(
        {{{0, 0}, {12, 0}, {12, 8}, {8, 8}, {7, 3}, {6, 8}, {4, 8}, {3, 4}, {2, 8}, {0, 8}}});
    CHECK(poly.reflex_count() == 2);
    CHECK(induce_motorcycles(poly).size() == 2);
}

TEST_CASE("simulate with zero motorcycles") {
    Polygon tri = make_polygon({{{0, 0}, {4, 1}, {1, 3}}});
    auto graph = simulate({}, tri);
    CHECK(graph.size() == 0);
    CHECK(graph.vertices.empty());
}

TEST_CASE("single motorcycle rides to the boundary") {
    Polygon poly = l_shape();
    auto graph = compute_motorcycle_graph(poly);
    REQUIRE(graph.size() == 1);
    const Track& t = graph.tracks[0];
    CHECK(t.kind == StopKind::on_boundary);
    CHECK(near_point(t.stop, {0, 0}, 1e-9));  // (1,1) + t*(-1,-1) meets y=0 at t=1
    CHECK_THAT(t.stop_time, Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("blocking pair: later rider stops on the earlier track") {
    Polygon square = make_polygon({{{0, 0}, {10, 0.001}, {10.001, 10}, {0.001, 10.002}}});
    std::vector<Motorcycle> cycles(2);
    cycles[0] = {0, {1, 5}, {1, 0}, 0, 0};
    cycles[1] = {1, {5, 0.5}, {0, 1}, 0, 0};
    auto graph = simulate(cycles, square);

    const Track& a = graph.tracks[0];
    const Track& b = graph.tracks[1];
    CHECK(a.kind == StopKind::on_boundary);
    CHECK(b.kind == StopKind::on_track);
    CHECK(b.blocker == 0);
    CHECK(near_point(b.stop, {5, 5}, 1e-9));
    // The blocked rider arrives strictly later than the track owner.
    double owner_arrival = graph.arrival(0, b.stop);
    double rider_arrival = graph.arrival(1, b.stop);
    CHECK(rider_arrival > owner_arrival + 1e-6);
    CHECK_THAT(rider_arrival, Catch::Matchers::WithinAbs(4.5, 1e-9));
    CHECK_THAT(owner_arrival, Catch::Matchers::WithinAbs(4.0, 1e-9));

    // Dense time-step oracle agrees on the crash point.
    StepOracle oracle(cycles, square, 1e-4, 20.0);
    CHECK_FALSE(oracle.riders[1].active);
    CHECK(dist(oracle.riders[1].stop, b.stop) < 1e-3);
    CHECK(std::fabs(oracle.riders[1].stop_time - b.stop_time) < 1e-3);
    CHECK(dist(oracle.riders[0].stop, a.stop) < 1e-3);
}

TEST_CASE("head-on collision is rejected") {
    Polygon square = make_polygon({{{0, 0}, {10, 0.001}, {10.001, 10}, {0.001, 10.002}}});
    std::vector<Motorcycle> cycles(2);
    cycles[0] = {0, {1, 5}, {1, 0}, 0, 0};
    cycles[1] = {1, {9, 5}, {-1, 0}, 0, 0};
    CHECK_THROWS_AS(simulate(cycles, square), degeneracy_error);
}

TEST_CASE("arrival_height along a track") {
    Polygon poly = l_shape();
    auto graph = compute_motorcycle_graph(poly);
    CHECK_THAT(arrival_height(graph, {1, 1}, 1e-9), Catch::Matchers::WithinAbs(0.0, 1e-12));
    // Point at distance sqrt(2)/2 along a speed-sqrt(2) track arrives at 0.5.
    CHECK_THAT(arrival_height(graph, {0.5, 0.5}, 1e-9),
               Catch::Matchers::WithinAbs(0.5, 1e-12));
    // Midpoint of the measured track arrives at half the stop time.
    Point2 mid = (graph.tracks[0].start + graph.tracks[0].stop) * 0.5;
    CHECK_THAT(arrival_height(graph, mid, 1e-9),
               Catch::Matchers::WithinAbs(graph.tracks[0].stop_time / 2.0, 1e-12));
    CHECK_THROWS_AS(arrival_height(graph, {3.5, 0.5}, 1e-9), invariant_error);
}

TEST_CASE("graph planarity and blocking consistency") {
    Polygon poly = make_polygon(
        {{{0, 0}, {12, 0}, {12, 8}, {8, 8}, {7, 3}, {6, 8}, {4, 8}, {3.2, 4}, {2, 8}, {0, 8}}});
    auto graph = compute_motorcycle_graph(poly);
    REQUIRE(graph.size() == 2);

    // Tracks may touch only at crash endpoints.
    for (std::size_t i = 0; i < graph.size(); i++)
        for (std::size_t j = i + 1; j < graph.size(); j++) {
            const Track& a = graph.tracks[i];
            const Track& b = graph.tracks[j];
            CHECK_FALSE(segments_cross(a.start, a.stop, b.start, b.stop));
        }

    // Crash-on-track vertices arrive strictly after the owner.
    for (std::size_t i = 0; i < graph.size(); i++) {
        const Track& t = graph.tracks[i];
        if (t.kind != StopKind::on_track) continue;
        double mine = t.stop_time;
        double owners = graph.arrival(t.blocker, t.stop);
        CHECK(mine > owners + 1e-9);
    }

    // Determinism: a second run reproduces the graph exactly.
    auto graph2 = compute_motorcycle_graph(poly);
    for (std::size_t i = 0; i < graph.size(); i++) {
        CHECK(graph.tracks[i].stop.x == graph2.tracks[i].stop.x);
        CHECK(graph.tracks[i].stop.y == graph2.tracks[i].stop.y);
        CHECK(graph.tracks[i].stop_time == graph2.tracks[i].stop_time);
    }
}
