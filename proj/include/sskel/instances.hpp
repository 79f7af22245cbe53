#pragma once

// Instance generators: random star-shaped polygons with reflex spikes
// (fuzzing, scaling measurements) and the adversarial family with a convex
// chain of near-vertical edges plus small reflex dips (worst-case bench).

#include <cstdint>
#include <optional>
#include <random>

#include "sskel/motorcycle.hpp"
#include "sskel/polygon.hpp"

namespace sskel {

// Star-shaped base polygon around the origin with r inward spikes, each
// contributing one reflex vertex. Returns nothing when the draw violates
// general position; callers iterate over sub-seeds.
inline std::optional<Polygon> try_random_instance(std::uint64_t seed, std::size_t n,
                                                  std::size_t r) {
    if (n < 3 * r + 3) return std::nullopt;
    std::size_t m = n - 3 * r;
    if (m < r) return std::nullopt;  // one spike per distinct base edge
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> angles(m);
    for (auto& a : angles) a = u(rng) * 2.0 * M_PI;
    std::sort(angles.begin(), angles.end());
    double min_gap = 0.25 * 2.0 * M_PI / static_cast<double>(m);
    for (std::size_t i = 0; i < m; i++) {
        double next = (i + 1 < m) ? angles[i + 1] : angles[0] + 2.0 * M_PI;
        if (next - angles[i] < min_gap) return std::nullopt;
    }

    std::vector<Point2> base(m);
    for (std::size_t i = 0; i < m; i++) {
        double rad = 3.0 + 2.0 * u(rng);
        base[i] = {rad * std::cos(angles[i]), rad * std::sin(angles[i])};
    }

    // Spike the r longest edges (tie-broken by index), tips pointing at the
    // star center so spikes from different edges cannot meet.
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; i++) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double la = dist(base[a], base[(a + 1) % m]);
        double lb = dist(base[b], base[(b + 1) % m]);
        if (la != lb) return la > lb;
        return a < b;
    });
    std::vector<bool> spiked(m, false);
    for (std::size_t k = 0; k < r; k++) spiked[order[k]] = true;

    std::vector<Point2> ring;
    for (std::size_t i = 0; i < m; i++) {
        const Point2& a = base[i];
        const Point2& b = base[(i + 1) % m];
        ring.push_back(a);
        if (!spiked[i]) continue;
        double t1 = 0.30 + 0.10 * u(rng);
        double t2 = 0.60 + 0.10 * u(rng);
        double tc = 0.5 * (t1 + t2) + 0.06 * (u(rng) - 0.5);
        Point2 p1 = a + (b - a) * t1;
        Point2 p2 = a + (b - a) * t2;
        Point2 c = a + (b - a) * tc;
        double depth = 0.35 + 0.25 * u(rng);
        Point2 tip = c * (1.0 - depth);
        ring.push_back(p1);
        ring.push_back(tip);
        ring.push_back(p2);
    }

    Polygon poly = make_polygon({ring});
    // Random tilt breaks axis alignment and accidental verticals.
    poly = rotated_polygon(poly, 0.05 + 0.9 * u(rng));
    normalize_polygon(poly);

    if (poly.vertex_count() != n || poly.reflex_count() != r) return std::nullopt;
    if (!validate(poly).ok()) return std::nullopt;
    try {
        auto graph = compute_motorcycle_graph(poly);
        // Reject tracks that stop suspiciously close to a polygon vertex;
        // downstream tolerances prefer clean crashes.
        for (const auto& tr : graph.tracks) {
            for (const auto& rg : poly.rings)
                for (const auto& v : rg)
                    if (dist(tr.stop, v) < 1e-4) return std::nullopt;
        }
    } catch (const degeneracy_error&) {
        return std::nullopt;
    }
    return poly;
}

inline Polygon random_instance(std::uint64_t seed, std::size_t n, std::size_t r,
                               int max_attempts = 256) {
    for (int k = 0; k < max_attempts; k++) {
        auto poly = try_random_instance(seed * 1000003ULL + static_cast<std::uint64_t>(k),
                                        n, r);
        if (poly) return *poly;
    }
    throw invariant_error("random_instance: no valid draw after max_attempts");
}

// Adversarial family: a tall, narrow polygon whose left side is a convex
// chain of near-vertical edges, with r small reflex dips along the top.
// Every vertical cut through a dip vertex crosses most chain faces, so each
// recursion level performs a large envelope computation.
inline Polygon tight_instance(std::size_t n, std::size_t r, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    std::size_t dips = std::max<std::size_t>(1, r);
    if (n < 3 * dips + 7) n = 3 * dips + 7;
    std::size_t chain_edges = n - 3 * dips - 3;

    double H = 40.0;
    double W = 6.0;
    double A = 0.5;          // leftward bulge of the chain
    double tilt = 3.0 * A / H;  // keeps every chain edge off vertical

    auto chain_x = [&](double y) {
        double uu = 1.6 * (y / H) - 0.8;
        return A * (1.0 - std::sqrt(1.0 - uu * uu)) + tilt * y;
    };

    std::vector<Point2> ring;
    ring.push_back({chain_x(0.0), 0.0});
    ring.push_back({W, 0.01});
    ring.push_back({W + 0.12 * H, H});

    // Top boundary right-to-left with asymmetric dips.
    double x_right = W + 0.1 * H - 1.0;
    double x_left = chain_x(H) + 1.0;
    for (std::size_t k = 0; k < dips; k++) {
        double fr = (static_cast<double>(dips - k) - 0.5) / static_cast<double>(dips);
        double cx = x_left + fr * (x_right - x_left) + 0.03 * (u(rng) - 0.5);
        double w = std::min(0.35, 0.3 * (x_right - x_left) / static_cast<double>(dips));
        double d = w * (0.9 + 0.3 * u(rng));
        double skew = 0.25 * w * (u(rng) - 0.5);
        ring.push_back({cx + w, H});
        ring.push_back({cx + skew, H - d});
        ring.push_back({cx - w * (1.0 + 0.2 * u(rng)), H});
    }

    // Convex chain down the left side.
    for (std::size_t i = 0; i <= chain_edges; i++) {
        double y = H * (1.0 - static_cast<double>(i) / static_cast<double>(chain_edges + 1));
        ring.push_back({chain_x(y), y});
    }

    Polygon poly = make_polygon({ring});
    normalize_polygon(poly);
    return poly;
}

}  // namespace sskel
