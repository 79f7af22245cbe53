#pragma once

// Slope-one slabs over polygon edges and lifted motorcycle tracks. Their
// lower envelope above the polygon is the terrain; everything downstream
// (cut envelopes, leaf envelopes, the sampling oracle) works off this set.

#include <optional>
#include <vector>

#include "sskel/geom.hpp"
#include "sskel/motorcycle.hpp"
#include "sskel/polygon.hpp"

namespace sskel {

enum class SlabKind { edge, motorcycle };

struct Slab {
    int id = -1;
    SlabKind kind = SlabKind::edge;
    Plane plane;

    // Base segment in projection; z rises linearly from base_z0 to base_z1.
    Point2 base_a, base_b;
    double base_z0 = 0.0, base_z1 = 0.0;

    // Side rays leave both base endpoints in this direction (the ascent
    // direction of the associated polygon edge).
    Vec2 ray;

    // Source bookkeeping.
    int source_edge = -1;        // global edge index (edge slabs and the
                                 // polygon edge a motorcycle slab ascends)
    int source_motorcycle = -1;  // motorcycle id for motorcycle slabs

    // Inverse of the (base_dir, ray) frame, for strip membership.
    double inv[2][2] = {{0, 0}, {0, 0}};
    double base_len = 0.0;

    void finish() {
        Vec2 d = base_b - base_a;
        base_len = d.norm();
        Vec2 dn = d / base_len;
        double det = dn.cross(ray);
        if (std::fabs(det) < 1e-12)
            throw degeneracy_error("slab side rays parallel to its base");
        inv[0][0] = ray.y / det;
        inv[0][1] = -ray.x / det;
        inv[1][0] = -dn.y / det;
        inv[1][1] = dn.x / det;
    }

    // Coordinates of p in the (along-base, along-ray) frame.
    void frame_coords(const Point2& p, double& along, double& s) const {
        Vec2 q = p - base_a;
        along = inv[0][0] * q.x + inv[0][1] * q.y;
        s = inv[1][0] * q.x + inv[1][1] * q.y;
    }

    bool contains(const Point2& p, double tol) const {
        double along, s;
        frame_coords(p, along, s);
        return along >= -tol && along <= base_len + tol && s >= -tol;
    }

    std::optional<double> height_at(const Point2& p, double tol = 0.0) const {
        if (!contains(p, tol)) return std::nullopt;
        return plane.eval(p);
    }
};

struct SlabSet {
    std::vector<Slab> slabs;
    std::size_t edge_count = 0;  // slabs[0..edge_count) are edge slabs

    const Slab& operator[](std::size_t i) const { return slabs[i]; }
    std::size_t size() const { return slabs.size(); }

    // Motorcycle slabs of motorcycle m sit at fixed offsets after the edges.
    std::pair<int, int> motorcycle_slabs(int m) const {
        int base = static_cast<int>(edge_count) + 2 * m;
        return {base, base + 1};
    }
};

// Global edge index: ring-major, then vertex order.
inline int global_edge_index(const Polygon& poly, std::size_t ring, std::size_t idx) {
    int g = 0;
    for (std::size_t k = 0; k < ring; k++) g += static_cast<int>(poly.rings[k].size());
    return g + static_cast<int>(idx);
}

inline SlabSet build_slabs(const Polygon& poly, const MotorcycleGraph& graph) {
    SlabSet set;
    for (std::size_t k = 0; k < poly.rings.size(); k++) {
        const auto& ring = poly.rings[k];
        std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; i++) {
            Slab s;
            s.id = static_cast<int>(set.slabs.size());
            s.kind = SlabKind::edge;
            s.base_a = ring[i];
            s.base_b = ring[(i + 1) % n];
            s.plane = edge_plane_unchecked(s.base_a, s.base_b);
            s.ray = s.plane.gradient();
            s.source_edge = s.id;
            s.finish();
            set.slabs.push_back(s);
        }
    }
    set.edge_count = set.slabs.size();

    for (const Motorcycle& m : graph.cycles) {
        const Track& track = graph.tracks[m.id];
        if (track.length() <= 0.0)
            throw invariant_error("missing track for a reflex vertex");
        const auto& ring = poly.rings[m.ring];
        std::size_t n = ring.size();
        std::size_t prev_idx = (m.vidx + n - 1) % n;
        for (std::size_t which = 0; which < 2; which++) {
            std::size_t eidx = which == 0 ? prev_idx : m.vidx;
            int ge = global_edge_index(poly, m.ring, eidx);
            const Slab& edge_slab = set.slabs[ge];
            Slab s;
            s.id = static_cast<int>(set.slabs.size());
            s.kind = SlabKind::motorcycle;
            // Same supporting plane as the polygon edge it ascends; only the
            // projected strip differs.
            s.plane = edge_slab.plane;
            s.base_a = track.start;
            s.base_b = track.stop;
            s.base_z0 = 0.0;
            s.base_z1 = track.stop_time;
            s.ray = edge_slab.ray;
            s.source_edge = ge;
            s.source_motorcycle = m.id;
            s.finish();
            set.slabs.push_back(s);
        }
    }
    return set;
}

// Reference terrain height: minimum over all slabs covering p. The point
// must lie inside the polygon.
inline double terrain_height_oracle(const SlabSet& set, const Polygon& poly, const Point2& p) {
    if (!point_in_polygon(p, poly))
        throw invariant_error("terrain_height_oracle: point outside the polygon");
    double best = std::numeric_limits<double>::max();
    for (const Slab& s : set.slabs) {
        auto h = s.height_at(p, epsilon());
        if (h && *h < best) best = *h;
    }
    return best;
}

}  // namespace sskel
