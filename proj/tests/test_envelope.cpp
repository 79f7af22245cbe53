#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sskel/envelope.hpp"
#include "sskel/polygon.hpp"

using namespace sskel;

namespace {

// Direct pointwise minimum over the input segments: the sampling oracle.
double min_over_segments(const std::vector<EnvSegment>& segs, double t) {
    double best = std::numeric_limits<double>::max();
    for (const auto& s : segs)
        if (t >= s.t0 - 1e-12 && t <= s.t1 + 1e-12) best = std::min(best, s.z_at(t));
    return best;
}

}  // namespace

TEST_CASE("envelope of one segment is itself") {
    auto chain = envelope_segments({{0.0, 2.0, 1.0, 3.0, 7}});
    REQUIRE(chain.intervals.size() == 1);
    CHECK(chain.intervals[0].id == 7);
    CHECK(chain.intervals[0].t0 == 0.0);
    CHECK(chain.intervals[0].t1 == 2.0);
    CHECK(chain.value_at(1.0) == Catch::Approx(2.0));
}

TEST_CASE("two crossing segments produce one breakpoint") {
    // z = t and z = 1 on [0,2]: cross at t = 1.
    auto chain = envelope_segments({{0, 2, 0, 2, 0}, {0, 2, 1, 1, 1}});
    REQUIRE(chain.intervals.size() == 2);
    CHECK(chain.intervals[0].id == 0);
    CHECK(chain.intervals[1].id == 1);
    CHECK_THAT(chain.intervals[0].t1, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(chain.value_at(1.0), Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK(chain.label_at(0.5) == 0);
    CHECK(chain.label_at(1.5) == 1);
}

TEST_CASE("empty input gives an empty chain") {
    auto chain = envelope_segments({});
    CHECK(chain.empty());
}

TEST_CASE("random segment envelopes match the sampling oracle") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 20; round++) {
        std::vector<EnvSegment> segs;
        int m = 5 + static_cast<int>(u(rng) * 46);
        for (int i = 0; i < m; i++) {
            double a = u(rng) * 10.0, b = u(rng) * 10.0;
            if (a > b) std::swap(a, b);
            if (b - a < 0.05) b = a + 0.05;
            segs.push_back({a, b, u(rng) * 4.0 - 2.0, u(rng) * 4.0 - 2.0, i});
        }
        auto chain = envelope_segments(segs);
        for (int s = 0; s < 1000; s++) {
            double t = u(rng) * 10.0;
            double expect = min_over_segments(segs, t);
            double got = chain.value_at(t);
            if (expect == std::numeric_limits<double>::max()) {
                CHECK(got == EnvelopeChain::kNone);
            } else {
                // Skip samples within a whisker of a breakpoint.
                bool near_break = false;
                for (const auto& iv : chain.intervals)
                    if (std::fabs(t - iv.t0) < 1e-7 || std::fabs(t - iv.t1) < 1e-7)
                        near_break = true;
                if (near_break) continue;
                REQUIRE(got != EnvelopeChain::kNone);
                CHECK_THAT(got, Catch::Matchers::WithinAbs(expect, 1e-9));
                // The labeled segment attains the minimum.
                int id = chain.label_at(t);
                REQUIRE(id >= 0);
                CHECK_THAT(segs[id].z_at(t), Catch::Matchers::WithinAbs(expect, 1e-9));
            }
        }
    }
}

TEST_CASE("chain lies on or below every input segment") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<EnvSegment> segs;
    for (int i = 0; i < 30; i++) {
        double a = u(rng) * 8.0, b = a + 0.2 + u(rng) * 3.0;
        segs.push_back({a, b, u(rng), u(rng), i});
    }
    auto chain = envelope_segments(segs);
    for (int s = 0; s < 1000; s++) {
        double t = u(rng) * 9.0;
        double got = chain.value_at(t);
        for (const auto& seg : segs)
            if (t >= seg.t0 + 1e-9 && t <= seg.t1 - 1e-9)
                CHECK(got <= seg.z_at(t) + 1e-9);
    }
}

TEST_CASE("collinear handoff emits a label switch") {
    // Same supporting line, abutting intervals: flat-edge style handoff.
    auto chain = envelope_segments({{0, 1, 0, 1, 3}, {1, 2, 1, 2, 5}});
    REQUIRE(chain.intervals.size() == 2);
    CHECK(chain.intervals[0].id == 3);
    CHECK(chain.intervals[1].id == 5);
    CHECK_THAT(chain.intervals[0].t1, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("envelope_planes single plane covers the cell") {
    std::vector<Point2> cell = {{0, 0}, {2, 0}, {2, 1}, {0, 1}};
    auto patch = envelope_planes({{Plane{0, 1, 0}, 4}}, cell);
    REQUIRE(patch.faces.size() == 1);
    CHECK(patch.faces[0].slab_ids == std::vector<int>{4});
    CHECK(patch.edges.empty());
    CHECK_THAT(patch.height_at({1.0, 0.5}, 1e-9), Catch::Matchers::WithinAbs(0.5, 1e-12));
}

TEST_CASE("envelope_planes on the unit square pyramid") {
    std::vector<Point2> cell = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<std::pair<Plane, int>> planes = {
        {Plane{0, 1, 0}, 0},   // bottom: z = y
        {Plane{-1, 0, 1}, 1},  // right:  z = 1 - x
        {Plane{0, -1, 1}, 2},  // top:    z = 1 - y
        {Plane{1, 0, 0}, 3},   // left:   z = x
    };
    auto patch = envelope_planes(planes, cell);
    REQUIRE(patch.faces.size() == 4);
    CHECK_THAT(patch.height_at({0.5, 0.5}, 1e-9), Catch::Matchers::WithinAbs(0.5, 1e-9));
    CHECK_THAT(patch.height_at({0.5, 0.25}, 1e-9), Catch::Matchers::WithinAbs(0.25, 1e-9));
    // Four interior edges along the diagonals, all ending at the apex.
    REQUIRE(patch.edges.size() == 4);
    for (const auto& e : patch.edges) {
        Point2 far_end = dist(e.a, {0.5, 0.5}) > dist(e.b, {0.5, 0.5}) ? e.a : e.b;
        Point2 apex = dist(e.a, {0.5, 0.5}) > dist(e.b, {0.5, 0.5}) ? e.b : e.a;
        CHECK(near_point(apex, {0.5, 0.5}, 1e-9));
        bool on_diagonal = std::fabs(far_end.x - far_end.y) < 1e-9 ||
                           std::fabs(far_end.x + far_end.y - 1.0) < 1e-9;
        CHECK(on_diagonal);
    }
}

TEST_CASE("envelope_planes matches pointwise-min sampling") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int round = 0; round < 12; round++) {
        // Random convex cell around the origin.
        std::vector<Point2> cell;
        int m = 5 + static_cast<int>(u(rng) * 3);
        for (int i = 0; i < m; i++) {
            double ang = (i + 0.1 + 0.8 * u(rng)) * 2.0 * M_PI / m;
            double rad = 2.0 + u(rng);
            cell.push_back({rad * std::cos(ang), rad * std::sin(ang)});
        }
        // Slope-one planes, like slab supports.
        std::vector<std::pair<Plane, int>> planes;
        int np = round < 6 ? 4 + static_cast<int>(u(rng) * 5) : 9 + static_cast<int>(u(rng) * 4);
        for (int i = 0; i < np; i++) {
            double ang = u(rng) * 2.0 * M_PI;
            planes.push_back({Plane{std::cos(ang), std::sin(ang), u(rng) * 3.0}, i});
        }
        auto patch = envelope_planes(planes, cell);

        int tested = 0;
        std::size_t guard = 0;
        while (tested < 1000 && guard++ < 100000) {
            Point2 p{u(rng) * 8.0 - 4.0, u(rng) * 8.0 - 4.0};
            if (!point_in_ring(p, cell)) continue;
            double expect = std::numeric_limits<double>::max();
            for (const auto& [pl, id] : planes) expect = std::min(expect, pl.eval(p));
            double got;
            try {
                got = patch.height_at(p, 1e-9);
            } catch (const invariant_error&) {
                // Points hugging the cell boundary can fall between clipped
                // regions; skip them.
                continue;
            }
            CHECK_THAT(got, Catch::Matchers::WithinAbs(expect, 1e-9));
            tested++;
        }
        CHECK(tested >= 900);

        // Continuity across interior edges.
        for (const auto& e : patch.edges) {
            const Plane& A = patch.faces[e.face_l].plane;
            const Plane& B = patch.faces[e.face_r].plane;
            CHECK_THAT(A.eval(e.a), Catch::Matchers::WithinAbs(B.eval(e.a), 1e-9));
            CHECK_THAT(A.eval(e.b), Catch::Matchers::WithinAbs(B.eval(e.b), 1e-9));
            CHECK_THAT(A.eval(e.a), Catch::Matchers::WithinAbs(e.za, 1e-9));
        }
    }
}

TEST_CASE("point_in_ring helper sanity for tests") {
    std::vector<Point2> cell = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    CHECK(point_in_ring({1, 1}, cell));
    CHECK_FALSE(point_in_ring({3, 1}, cell));
}
