#pragma once

// Polygon-with-holes model, orientation normalization, reflex flags, and
// general-position validation.

#include <cstddef>
#include <optional>
#include <sstream>
#include <vector>

#include "sskel/geom.hpp"

namespace sskel {

struct Polygon {
    // rings[0] is the outer ring (counterclockwise); the rest are holes
    // (clockwise). Interior lies on the left of every directed edge.
    std::vector<std::vector<Point2>> rings;

    // Per ring, per vertex: interior angle exceeds pi.
    std::vector<std::vector<bool>> reflex;

    std::size_t ring_count() const { return rings.size(); }

    std::size_t vertex_count() const {
        std::size_t n = 0;
        for (const auto& r : rings) n += r.size();
        return n;
    }

    std::size_t reflex_count() const {
        std::size_t r = 0;
        for (const auto& ring : reflex)
            for (bool f : ring) r += f ? 1 : 0;
        return r;
    }

    const Point2& vertex(std::size_t ring, std::size_t i) const { return rings[ring][i]; }

    Point2 edge_start(std::size_t ring, std::size_t i) const { return rings[ring][i]; }
    Point2 edge_end(std::size_t ring, std::size_t i) const {
        return rings[ring][(i + 1) % rings[ring].size()];
    }
};

inline double ring_signed_area(const std::vector<Point2>& ring) {
    double a = 0.0;
    for (std::size_t i = 0, n = ring.size(); i < n; i++) {
        const Point2& p = ring[i];
        const Point2& q = ring[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

inline double polygon_area(const Polygon& poly) {
    double a = 0.0;
    for (const auto& r : poly.rings) a += ring_signed_area(r);
    return a;  // holes are clockwise, so they subtract
}

inline void polygon_bbox(const Polygon& poly, Point2& lo, Point2& hi) {
    lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    hi = {-lo.x, -lo.y};
    for (const auto& r : poly.rings)
        for (const auto& p : r) {
            lo.x = std::min(lo.x, p.x);
            lo.y = std::min(lo.y, p.y);
            hi.x = std::max(hi.x, p.x);
            hi.y = std::max(hi.y, p.y);
        }
}

// Even-odd point-in-ring test (half-open crossing rule).
inline bool point_in_ring(const Point2& p, const std::vector<Point2>& ring) {
    bool inside = false;
    for (std::size_t i = 0, n = ring.size(); i < n; i++) {
        const Point2& a = ring[i];
        const Point2& b = ring[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

inline bool point_in_polygon(const Point2& p, const Polygon& poly) {
    bool inside = false;
    for (const auto& r : poly.rings)
        if (point_in_ring(p, r)) inside = !inside;
    return inside;
}

inline bool point_on_ring(const Point2& p, const std::vector<Point2>& ring, double tol) {
    for (std::size_t i = 0, n = ring.size(); i < n; i++)
        if (point_segment_distance(p, ring[i], ring[(i + 1) % n]) <= tol) return true;
    return false;
}

inline bool point_on_boundary(const Point2& p, const Polygon& poly, double tol) {
    for (const auto& r : poly.rings)
        if (point_on_ring(p, r, tol)) return true;
    return false;
}

// Recompute reflex flags from ring geometry. Interior is on the left, so a
// vertex is reflex exactly when the boundary turns right there.
inline void compute_reflex_flags(Polygon& poly) {
    poly.reflex.clear();
    for (const auto& ring : poly.rings) {
        std::vector<bool> flags(ring.size(), false);
        std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; i++) {
            const Point2& a = ring[(i + n - 1) % n];
            const Point2& v = ring[i];
            const Point2& b = ring[(i + 1) % n];
            flags[i] = orient2d_sign(a, v, b) < 0;
        }
        poly.reflex.push_back(std::move(flags));
    }
}

// Normalize orientations (outer CCW, holes CW), drop duplicate consecutive
// vertices, and refresh reflex flags.
inline void normalize_polygon(Polygon& poly) {
    Point2 lo, hi;
    polygon_bbox(poly, lo, hi);
    double tol = epsilon() * std::max({1.0, hi.x - lo.x, hi.y - lo.y});
    for (auto& ring : poly.rings) {
        std::vector<Point2> cleaned;
        for (const auto& p : ring)
            if (cleaned.empty() || !near_point(cleaned.back(), p, tol)) cleaned.push_back(p);
        while (cleaned.size() > 1 && near_point(cleaned.front(), cleaned.back(), tol))
            cleaned.pop_back();
        ring = std::move(cleaned);
    }
    for (std::size_t k = 0; k < poly.rings.size(); k++) {
        double a = ring_signed_area(poly.rings[k]);
        bool want_ccw = (k == 0);
        if ((a > 0.0) != want_ccw)
            std::reverse(poly.rings[k].begin(), poly.rings[k].end());
    }
    compute_reflex_flags(poly);
}

inline Polygon make_polygon(std::vector<std::vector<Point2>> rings) {
    Polygon p;
    p.rings = std::move(rings);
    normalize_polygon(p);
    return p;
}

// ---------------------------------------------------------------------------
// General-position validation.
// ---------------------------------------------------------------------------

struct GeneralPositionViolation {
    enum class Kind {
        vertical_edge,
        self_intersection,
        ring_crossing,
        hole_outside,
        short_edge,
        too_few_vertices,
        head_on_collision,
    };
    Kind kind;
    std::string detail;
};

struct GeneralPositionReport {
    std::vector<GeneralPositionViolation> violations;
    bool hard_reject = false;  // self-intersections and malformed rings

    bool ok() const { return violations.empty(); }

    std::string summary() const {
        std::ostringstream os;
        for (const auto& v : violations) os << v.detail << "\n";
        return os.str();
    }
};

namespace detail {

inline bool segments_touch_improperly(const Point2& a, const Point2& b, const Point2& c,
                                      const Point2& d, double tol) {
    if (segments_cross(a, b, c, d)) return true;
    // Endpoint of one segment strictly inside the other.
    auto strictly_inside = [&](const Point2& p, const Point2& u, const Point2& v) {
        if (point_segment_distance(p, u, v) > tol) return false;
        return dist(p, u) > tol && dist(p, v) > tol;
    };
    return strictly_inside(c, a, b) || strictly_inside(d, a, b) ||
           strictly_inside(a, c, d) || strictly_inside(b, c, d);
}

}  // namespace detail

// Check ring simplicity, nesting, vertical edges, and minimum feature size.
// Auto-rotation is handled by the pipeline, not here.
inline GeneralPositionReport validate(const Polygon& poly) {
    GeneralPositionReport report;
    using K = GeneralPositionViolation::Kind;
    Point2 lo, hi;
    polygon_bbox(poly, lo, hi);
    double scale = std::max({1.0, hi.x - lo.x, hi.y - lo.y});
    double tol = epsilon() * scale;

    for (std::size_t k = 0; k < poly.rings.size(); k++) {
        if (poly.rings[k].size() < 3) {
            report.violations.push_back({K::too_few_vertices,
                                         "ring " + std::to_string(k) + " has fewer than 3 vertices"});
            report.hard_reject = true;
            return report;
        }
    }

    // Edge list with ring provenance.
    struct E {
        std::size_t ring, idx;
        Point2 a, b;
    };
    std::vector<E> edges;
    for (std::size_t k = 0; k < poly.rings.size(); k++) {
        const auto& ring = poly.rings[k];
        for (std::size_t i = 0; i < ring.size(); i++) {
            E e{k, i, ring[i], ring[(i + 1) % ring.size()]};
            if (dist(e.a, e.b) <= tol) {
                report.violations.push_back(
                    {K::short_edge, "degenerate edge on ring " + std::to_string(k)});
                report.hard_reject = true;
            }
            edges.push_back(e);
        }
    }
    if (report.hard_reject) return report;

    for (std::size_t i = 0; i < edges.size(); i++) {
        for (std::size_t j = i + 1; j < edges.size(); j++) {
            const E& e = edges[i];
            const E& f = edges[j];
            bool adjacent = e.ring == f.ring &&
                            (f.idx == (e.idx + 1) % poly.rings[e.ring].size() ||
                             e.idx == (f.idx + 1) % poly.rings[f.ring].size());
            if (adjacent) continue;
            if (detail::segments_touch_improperly(e.a, e.b, f.a, f.b, tol)) {
                bool same = e.ring == f.ring;
                report.violations.push_back(
                    {same ? K::self_intersection : K::ring_crossing,
                     same ? "ring " + std::to_string(e.ring) + " self-intersects"
                          : "rings " + std::to_string(e.ring) + " and " +
                                std::to_string(f.ring) + " intersect"});
                report.hard_reject = true;
                return report;
            }
        }
    }

    // Holes must lie strictly inside the outer ring.
    for (std::size_t k = 1; k < poly.rings.size(); k++) {
        if (!point_in_ring(poly.rings[k][0], poly.rings[0])) {
            report.violations.push_back(
                {K::hole_outside, "hole " + std::to_string(k) + " lies outside the outer ring"});
            report.hard_reject = true;
            return report;
        }
        for (std::size_t k2 = 1; k2 < poly.rings.size(); k2++)
            if (k2 != k && point_in_ring(poly.rings[k][0], poly.rings[k2])) {
                report.violations.push_back(
                    {K::hole_outside, "hole " + std::to_string(k) + " nested inside another hole"});
                report.hard_reject = true;
                return report;
            }
    }

    // Vertical edges are a soft violation: the pipeline removes them with a
    // global rotation.
    for (const E& e : edges) {
        double len = dist(e.a, e.b);
        if (std::fabs(e.b.x - e.a.x) <= epsilon() * len) {
            report.violations.push_back(
                {K::vertical_edge, "vertical edge on ring " + std::to_string(e.ring) +
                                       " at index " + std::to_string(e.idx)});
        }
    }
    return report;
}

inline Polygon rotated_polygon(const Polygon& poly, double angle) {
    Polygon out = poly;
    double c = std::cos(angle), s = std::sin(angle);
    for (auto& ring : out.rings)
        for (auto& p : ring) p = rotate_point(p, c, s);
    compute_reflex_flags(out);
    return out;
}

}  // namespace sskel
