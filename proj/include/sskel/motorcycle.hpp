#pragma once

// Motorcycle graph induced by a polygon: one motorcycle per reflex vertex,
// moving at the reflex vertex's wavefront velocity, halting on earlier
// tracks or on the polygon boundary. Computed by event simulation over all
// pairwise candidates, processed in time order.

#include <optional>
#include <queue>
#include <vector>

#include "sskel/geom.hpp"
#include "sskel/polygon.hpp"

namespace sskel {

struct Motorcycle {
    int id = -1;
    Point2 start;
    Vec2 velocity;      // direction = interior bisector, speed = 1/sin(theta/2)
    std::size_t ring = 0;
    std::size_t vidx = 0;

    double speed() const { return velocity.norm(); }
    Point2 position(double t) const { return start + velocity * t; }
};

enum class StopKind { on_boundary, on_track };

struct Track {
    Point2 start;
    Point2 stop;
    double stop_time = 0.0;  // arrival time at the stop point
    StopKind kind = StopKind::on_boundary;
    int blocker = -1;  // owning motorcycle of the blocking track

    Vec2 dir() const { return (stop - start).normalized(); }
    double length() const { return dist(start, stop); }
};

enum class MGVertexKind { start, crash_on_track, crash_on_boundary };

struct MGVertex {
    Point2 p;
    double time = 0.0;  // arrival time of the owner motorcycle
    int owner = -1;
    MGVertexKind kind = MGVertexKind::start;
};

struct MotorcycleGraph {
    std::vector<Motorcycle> cycles;
    std::vector<Track> tracks;     // one per motorcycle
    std::vector<MGVertex> vertices;  // [2i] start of i, [2i+1] stop of i

    std::size_t size() const { return cycles.size(); }

    bool point_on_track(int id, const Point2& p, double tol) const {
        const Track& t = tracks[id];
        return point_segment_distance(p, t.start, t.stop) <= tol;
    }

    // Time at which motorcycle id reaches p; p must lie on its track.
    double arrival(int id, const Point2& p) const {
        return dist(tracks[id].start, p) / cycles[id].speed();
    }
};

inline double polygon_scale(const Polygon& poly) {
    Point2 lo, hi;
    polygon_bbox(poly, lo, hi);
    return std::max({1.0, hi.x - lo.x, hi.y - lo.y});
}

// One motorcycle per reflex vertex of the (validated) polygon.
inline std::vector<Motorcycle> induce_motorcycles(const Polygon& poly) {
    std::vector<Motorcycle> out;
    for (std::size_t k = 0; k < poly.rings.size(); k++) {
        const auto& ring = poly.rings[k];
        std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; i++) {
            if (!poly.reflex[k][i]) continue;
            Motorcycle m;
            m.id = static_cast<int>(out.size());
            m.start = ring[i];
            m.velocity = vertex_velocity(ring[(i + n - 1) % n], ring[i], ring[(i + 1) % n]);
            m.ring = k;
            m.vidx = i;
            if (m.speed() < 1.0 - 1e-9)
                throw invariant_error("motorcycle slower than the wavefront");
            out.push_back(m);
        }
    }
    return out;
}

namespace detail {

struct MotorcycleEvent {
    double time;
    int rider;       // motorcycle that stops
    int obstacle;    // blocking motorcycle, or -1 for the boundary
    double obstacle_time;  // arrival of the obstacle at the crash point
    Point2 where;
    bool head_on = false;  // both arrive within tolerance

    bool operator>(const MotorcycleEvent& o) const {
        if (time != o.time) return time > o.time;
        if (rider != o.rider) return rider > o.rider;
        return obstacle > o.obstacle;
    }
};

inline std::optional<double> first_boundary_hit(const Polygon& poly, const Motorcycle& m,
                                                double eps_t) {
    double best = std::numeric_limits<double>::max();
    Point2 tip = m.start + m.velocity;
    for (const auto& ring : poly.rings) {
        std::size_t n = ring.size();
        for (std::size_t i = 0; i < n; i++) {
            double t, u;
            if (!segment_intersection_params(m.start, tip, ring[i], ring[(i + 1) % n], t, u))
                continue;
            if (u < -1e-12 || u > 1.0 + 1e-12) continue;
            if (t > eps_t && t < best) best = t;
        }
    }
    if (best == std::numeric_limits<double>::max()) return std::nullopt;
    return best;
}

}  // namespace detail

// Event simulation; deterministic given the polygon. Throws degeneracy_error
// on (near-)simultaneous collisions at a shared point.
inline MotorcycleGraph simulate(const std::vector<Motorcycle>& cycles, const Polygon& poly) {
    MotorcycleGraph graph;
    graph.cycles = cycles;
    int r = static_cast<int>(cycles.size());
    graph.tracks.resize(r);
    if (r == 0) return graph;

    double scale = polygon_scale(poly);
    double eps_t = epsilon() * scale;

    std::priority_queue<detail::MotorcycleEvent, std::vector<detail::MotorcycleEvent>,
                        std::greater<detail::MotorcycleEvent>> queue;

    // Boundary candidates: every motorcycle eventually hits the boundary.
    for (const Motorcycle& m : cycles) {
        auto hit = detail::first_boundary_hit(poly, m, eps_t);
        if (!hit) throw invariant_error("motorcycle escapes the polygon");
        queue.push({*hit, m.id, -1, 0.0, m.position(*hit)});
    }

    // Pairwise candidates. The later arrival is the rider; a crossing where
    // both arrive within tolerance becomes a head-on candidate, fatal only
    // if both motorcycles are still running when it comes up.
    for (int i = 0; i < r; i++) {
        for (int j = i + 1; j < r; j++) {
            double ti, tj;
            Point2 tip_i = cycles[i].start + cycles[i].velocity;
            Point2 tip_j = cycles[j].start + cycles[j].velocity;
            if (!segment_intersection_params(cycles[i].start, tip_i, cycles[j].start, tip_j,
                                             ti, tj)) {
                // Parallel rays. Only collinear ones can interact.
                Vec2 gap = cycles[j].start - cycles[i].start;
                Vec2 u = cycles[i].velocity.normalized();
                if (std::fabs(gap.cross(u)) > eps_t) continue;
                double si = cycles[i].velocity.dot(u);
                double sj = cycles[j].velocity.dot(u);
                double g = gap.dot(u);
                if (sj * si < 0.0) {
                    // Approaching head-on: meet when the gap closes.
                    double rel = si - sj;
                    double tm = g / rel;
                    if (tm > eps_t)
                        queue.push({tm, i, j, tm, cycles[i].position(tm), true});
                } else if (g > 0.0 && si > sj) {
                    // i chases j and reaches j's start, which j covered at t=0.
                    queue.push({g / si, i, j, 0.0, cycles[j].start, false});
                } else if (g < 0.0 && sj > si) {
                    queue.push({-g / sj, j, i, 0.0, cycles[i].start, false});
                }
                continue;
            }
            if (ti < -eps_t || tj < -eps_t) continue;  // behind a start
            ti = std::max(ti, 0.0);
            tj = std::max(tj, 0.0);
            detail::MotorcycleEvent ev;
            ev.where = cycles[i].position(ti);
            if (std::fabs(ti - tj) <= eps_t) {
                ev.time = std::max(ti, tj);
                ev.rider = i;
                ev.obstacle = j;
                ev.obstacle_time = tj;
                ev.head_on = true;
            } else if (ti > tj) {
                ev = {ti, i, j, tj, ev.where, false};
            } else {
                ev = {tj, j, i, ti, ev.where, false};
            }
            queue.push(ev);
        }
    }

    std::vector<bool> stopped(r, false);
    int remaining = r;
    while (remaining > 0 && !queue.empty()) {
        auto ev = queue.top();
        queue.pop();
        if (ev.head_on) {
            bool rider_runs = !stopped[ev.rider] ||
                              graph.tracks[ev.rider].stop_time >= ev.time - eps_t;
            bool obstacle_runs = !stopped[ev.obstacle] ||
                                 graph.tracks[ev.obstacle].stop_time >= ev.obstacle_time - eps_t;
            if (rider_runs && obstacle_runs)
                throw degeneracy_error(
                    "motorcycles collide head-on (general position violation)");
            continue;
        }
        if (stopped[ev.rider]) continue;
        if (ev.obstacle >= 0) {
            // Stale if the obstacle stopped before reaching the crossing.
            if (stopped[ev.obstacle] &&
                graph.tracks[ev.obstacle].stop_time < ev.obstacle_time - eps_t)
                continue;
        }
        Track& tr = graph.tracks[ev.rider];
        tr.start = cycles[ev.rider].start;
        tr.stop = ev.where;
        tr.stop_time = ev.time;
        tr.kind = ev.obstacle >= 0 ? StopKind::on_track : StopKind::on_boundary;
        tr.blocker = ev.obstacle;
        stopped[ev.rider] = true;
        remaining--;
    }
    if (remaining > 0) throw invariant_error("motorcycle simulation stalled");

    graph.vertices.resize(2 * r);
    for (int i = 0; i < r; i++) {
        graph.vertices[2 * i] = {cycles[i].start, 0.0, i, MGVertexKind::start};
        graph.vertices[2 * i + 1] = {graph.tracks[i].stop, graph.tracks[i].stop_time, i,
                                     graph.tracks[i].kind == StopKind::on_track
                                         ? MGVertexKind::crash_on_track
                                         : MGVertexKind::crash_on_boundary};
    }
    return graph;
}

// Time at which the owning motorcycle reaches a point on its track.
inline double arrival_height(const MotorcycleGraph& graph, const Point2& p, double tol) {
    for (std::size_t i = 0; i < graph.size(); i++)
        if (graph.point_on_track(static_cast<int>(i), p, tol))
            return graph.arrival(static_cast<int>(i), p);
    throw invariant_error("arrival_height: point not on any track");
}

inline MotorcycleGraph compute_motorcycle_graph(const Polygon& poly) {
    return simulate(induce_motorcycles(poly), poly);
}

}  // namespace sskel
