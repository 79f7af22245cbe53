#pragma once

// Independent ground truth: straight skeleton by discrete simulation of the
// shrinking wavefront (edge events and split events over an exact queue of
// O(n^2) candidates). Shares only the basic geometry header with the main
// pipeline, so agreement between the two is meaningful evidence.

#include <map>
#include <queue>
#include <vector>

#include "sskel/compare.hpp"
#include "sskel/geom.hpp"
#include "sskel/polygon.hpp"

namespace sskel {

struct OracleArc {
    Point2 a, b;
    double za = 0.0, zb = 0.0;
    int left_face = -1;   // original edge whose face lies left of a->b
    int right_face = -1;
};

struct OracleSkeleton {
    std::vector<OracleArc> arcs;
    // One projected face polygon per original polygon edge, with heights.
    std::vector<std::vector<Point3>> faces;
    std::vector<Plane> face_planes;

    // Terrain height by face location; the faces partition the polygon.
    double height_at(const Point2& p) const {
        for (std::size_t f = 0; f < faces.size(); f++) {
            std::vector<Point2> ring;
            ring.reserve(faces[f].size());
            for (const auto& q : faces[f]) ring.push_back({q.x, q.y});
            if (point_in_ring(p, ring)) return face_planes[f].eval(p);
        }
        throw invariant_error("oracle height_at: point in no face");
    }
};

namespace oracle_detail {

inline Vec2 velocity_from_normals(const Vec2& n1, const Vec2& n2, bool& runner) {
    double det = n1.cross(n2);
    runner = false;
    if (std::fabs(det) < 1e-12) {
        if (n1.dot(n2) > 0.0) return n1;  // collinear continuation
        runner = true;  // opposite wavefronts: vertex slides along the mid-line
        return {0, 0};
    }
    return {(n2.y - n1.y) / det, (n1.x - n2.x) / det};
}

struct WVertex {
    int id = -1;
    Point2 origin;
    double t0 = 0.0;
    Vec2 vel;
    bool runner = false;
    bool reflex = false;
    bool active = true;
    int eL = -1, eR = -1;  // incoming / outgoing original edge ids
    int prev = -1, next = -1;

    Point2 position(double t) const { return origin + vel * (t - t0); }
};

struct Event {
    double time = 0.0;
    enum class Kind { edge, split } kind = Kind::edge;
    int a = -1, b = -1;          // edge event: adjacent vertex ids
    int vertex = -1, edge = -1;  // split event
    Point2 where;

    bool operator>(const Event& o) const {
        if (time != o.time) return time > o.time;
        if (kind != o.kind) return kind == Kind::split;  // edge events first
        if (a != o.a) return a > o.a;
        if (b != o.b) return b > o.b;
        if (vertex != o.vertex) return vertex > o.vertex;
        return edge > o.edge;
    }
};

struct Sim {
    const Polygon& poly;
    double tol;
    std::vector<Plane> planes;       // per original edge: z = dist to its line
    std::vector<Vec2> normals;
    std::vector<Vec2> edge_dirs;
    std::vector<WVertex> verts;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue;
    std::vector<OracleArc> arcs;
    int active_count = 0;

    explicit Sim(const Polygon& p) : poly(p) {
        Point2 lo, hi;
        polygon_bbox(poly, lo, hi);
        tol = 1e-9 * std::max({1.0, hi.x - lo.x, hi.y - lo.y});
        int ge = 0;
        for (std::size_t k = 0; k < poly.rings.size(); k++) {
            const auto& ring = poly.rings[k];
            std::size_t n = ring.size();
            int first = static_cast<int>(verts.size());
            for (std::size_t i = 0; i < n; i++) {
                Plane pl = edge_plane_unchecked(ring[i], ring[(i + 1) % n]);
                planes.push_back(pl);
                normals.push_back(pl.gradient());
                edge_dirs.push_back((ring[(i + 1) % n] - ring[i]).normalized());
                WVertex v;
                v.id = static_cast<int>(verts.size());
                v.origin = ring[i];
                v.eL = ge + static_cast<int>((i + n - 1) % n);
                v.eR = ge + static_cast<int>(i);
                verts.push_back(v);
            }
            for (std::size_t i = 0; i < n; i++) {
                verts[first + i].prev = first + static_cast<int>((i + n - 1) % n);
                verts[first + i].next = first + static_cast<int>((i + 1) % n);
            }
            ge += static_cast<int>(n);
        }
        for (auto& v : verts) {
            v.vel = velocity_from_normals(normals[v.eL], normals[v.eR], v.runner);
            v.reflex = normals[v.eL].cross(normals[v.eR]) < -1e-12;
            active_count++;
        }
    }

    // Meet of three moving wavefront lines; false when (near-)parallel.
    bool three_plane_meet(int e1, int e2, int e3, Point2& x, double& t) const {
        double m[3][4] = {
            {planes[e1].a, planes[e1].b, -1.0, -planes[e1].c},
            {planes[e2].a, planes[e2].b, -1.0, -planes[e2].c},
            {planes[e3].a, planes[e3].b, -1.0, -planes[e3].c},
        };
        double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (std::fabs(det) < 1e-12) return false;
        auto solve_col = [&](int col) {
            double mm[3][3];
            for (int r = 0; r < 3; r++)
                for (int c = 0; c < 3; c++) mm[r][c] = (c == col) ? m[r][3] : m[r][c];
            return mm[0][0] * (mm[1][1] * mm[2][2] - mm[1][2] * mm[2][1]) -
                   mm[0][1] * (mm[1][0] * mm[2][2] - mm[1][2] * mm[2][0]) +
                   mm[0][2] * (mm[1][0] * mm[2][1] - mm[1][1] * mm[2][0]);
        };
        x.x = solve_col(0) / det;
        x.y = solve_col(1) / det;
        t = solve_col(2) / det;
        return true;
    }

    void push_edge_event(int ia, int ib) {
        const WVertex& A = verts[ia];
        const WVertex& B = verts[ib];
        if (A.eL == B.eR) return;  // two-vertex loop; resolved by collapse
        Point2 x;
        double t;
        if (!three_plane_meet(A.eL, A.eR, B.eR, x, t)) return;
        if (t < std::max(A.t0, B.t0) - tol) return;
        // The meet must be ahead of both trajectories.
        if (!A.runner && dist(A.position(t), x) > 1e-5 * (1.0 + std::fabs(t))) return;
        if (!B.runner && dist(B.position(t), x) > 1e-5 * (1.0 + std::fabs(t))) return;
        Event ev;
        ev.time = t;
        ev.kind = Event::Kind::edge;
        ev.a = ia;
        ev.b = ib;
        ev.where = x;
        queue.push(ev);
    }

    void push_split_events(int iv) {
        const WVertex& V = verts[iv];
        if (!V.reflex || V.runner) return;
        for (int e = 0; e < static_cast<int>(planes.size()); e++) {
            if (e == V.eL || e == V.eR) continue;
            double ndv = normals[e].dot(V.vel);
            if (1.0 - ndv < 1e-12) continue;  // moving with the edge, never catches it
            double t = (planes[e].eval(V.origin) - V.t0 * ndv) / (1.0 - ndv);
            if (t < V.t0 - tol) continue;
            Event ev;
            ev.time = t;
            ev.kind = Event::Kind::split;
            ev.vertex = iv;
            ev.edge = e;
            ev.where = V.position(t);
            queue.push(ev);
        }
    }

    void emit_arc(const WVertex& v, const Point2& x, double t) {
        if (dist(v.origin, x) <= tol && std::fabs(t - v.t0) <= tol) return;
        arcs.push_back({v.origin, x, v.t0, t, v.eL, v.eR});
    }

    void deactivate(int iv) {
        verts[iv].active = false;
        active_count--;
    }

    int make_vertex(const Point2& x, double t, int eL, int eR) {
        WVertex v;
        v.id = static_cast<int>(verts.size());
        v.origin = x;
        v.t0 = t;
        v.eL = eL;
        v.eR = eR;
        v.vel = velocity_from_normals(normals[eL], normals[eR], v.runner);
        v.reflex = normals[eL].cross(normals[eR]) < -1e-12;
        verts.push_back(v);
        active_count++;
        return v.id;
    }

    void handle_edge_event(const Event& ev) {
        WVertex& A = verts[ev.a];
        WVertex& B = verts[ev.b];
        // A broken adjacency never re-forms between the same ids, so
        // activity plus adjacency fully validates the candidate.
        if (!A.active || !B.active) return;
        if (A.next != ev.b) return;

        if (A.prev == ev.b) {
            // Two-vertex loop: both meet and vanish.
            emit_arc(A, ev.where, ev.time);
            emit_arc(B, ev.where, ev.time);
            deactivate(ev.a);
            deactivate(ev.b);
            return;
        }
        if (verts[A.prev].id == verts[B.next].id) {
            // Triangle collapse: all three vanish at the meet point.
            WVertex& C = verts[A.prev];
            emit_arc(A, ev.where, ev.time);
            emit_arc(B, ev.where, ev.time);
            emit_arc(C, ev.where, ev.time);
            deactivate(A.id);
            deactivate(B.id);
            deactivate(C.id);
            return;
        }

        emit_arc(A, ev.where, ev.time);
        emit_arc(B, ev.where, ev.time);
        int a_prev = A.prev, b_next = B.next, a_el = A.eL, b_er = B.eR;
        int n = make_vertex(ev.where, ev.time, a_el, b_er);  // may reallocate verts
        verts[n].prev = a_prev;
        verts[n].next = b_next;
        verts[a_prev].next = n;
        verts[b_next].prev = n;
        deactivate(ev.a);
        deactivate(ev.b);
        push_edge_event(a_prev, n);
        push_edge_event(n, b_next);
        push_split_events(n);
    }

    void handle_split_event(const Event& ev) {
        WVertex& V = verts[ev.vertex];
        if (!V.active) return;
        Point2 x = ev.where;
        double t = ev.time;

        // Find a live wavefront instance of the split edge containing x.
        int ic = -1, id_ = -1;
        for (const WVertex& C : verts) {
            if (!C.active || C.eR != ev.edge) continue;
            const WVertex& D = verts[C.next];
            if (C.id == V.id || D.id == V.id) continue;
            if (C.runner || D.runner) continue;
            Vec2 e = edge_dirs[ev.edge];
            double sc = e.dot(x - C.position(t));
            double sd = e.dot(x - D.position(t));
            if (sc >= -tol && sd <= tol) {
                // Landing at a moving endpoint coincides with an edge event
                // at the same place and time; that event resolves the spot.
                // A genuine vertex event would stall the queue instead.
                if (sc <= tol || sd >= -tol) continue;
                ic = C.id;
                id_ = D.id;
                break;
            }
        }
        if (ic < 0) return;  // stale candidate

        emit_arc(V, x, t);
        int vprev = V.prev, vnext = V.next, v_el = V.eL, v_er = V.eR;
        int n1 = make_vertex(x, t, v_el, ev.edge);  // may reallocate verts
        int n2 = make_vertex(x, t, ev.edge, v_er);
        deactivate(ev.vertex);

        verts[n1].prev = vprev;
        verts[n1].next = id_;
        verts[vprev].next = n1;
        verts[id_].prev = n1;
        verts[n2].prev = ic;
        verts[n2].next = vnext;
        verts[ic].next = n2;
        verts[vnext].prev = n2;

        // Degenerate loops (three vertices already coincident) are rejected
        // upstream by general position; continue with fresh events.
        push_edge_event(vprev, n1);
        push_edge_event(n1, id_);
        push_edge_event(ic, n2);
        push_edge_event(n2, vnext);
        push_split_events(n1);
        push_split_events(n2);
    }

    void run() {
        for (const auto& v : verts) {
            push_edge_event(v.id, v.next);
            push_split_events(v.id);
        }
        std::size_t guard = 0;
        std::size_t guard_max = 200 * (verts.size() + 4) * (verts.size() + 4);
        while (active_count > 0) {
            if (queue.empty() || ++guard > guard_max)
                throw degeneracy_error("wavefront simulation stalled (degenerate input?)");
            Event ev = queue.top();
            queue.pop();
            if (ev.kind == Event::Kind::edge)
                handle_edge_event(ev);
            else
                handle_split_event(ev);
        }
    }
};

}  // namespace oracle_detail

inline OracleSkeleton oracle_skeleton(const Polygon& poly, std::size_t cap = 64) {
    if (poly.vertex_count() > cap)
        throw invariant_error("oracle_skeleton: polygon exceeds the configured size cap");
    oracle_detail::Sim sim(poly);
    sim.run();

    OracleSkeleton out;
    out.arcs = sim.arcs;

    // Assemble one face loop per original edge by chaining its arcs from the
    // base edge end back to the base edge start.
    std::size_t n_edges = sim.planes.size();
    out.face_planes = sim.planes;
    double snap = sim.tol * 10.0;

    std::vector<Point2> edge_a(n_edges), edge_b(n_edges);
    {
        std::size_t g = 0;
        for (const auto& ring : poly.rings) {
            std::size_t n = ring.size();
            for (std::size_t i = 0; i < n; i++, g++) {
                edge_a[g] = ring[i];
                edge_b[g] = ring[(i + 1) % n];
            }
        }
    }

    for (std::size_t f = 0; f < n_edges; f++) {
        std::vector<Point3> loop;
        loop.push_back({edge_a[f].x, edge_a[f].y, 0.0});
        loop.push_back({edge_b[f].x, edge_b[f].y, 0.0});
        Point2 cur = edge_b[f];
        double curz = 0.0;
        std::vector<bool> used(out.arcs.size(), false);
        std::size_t steps = 0;
        while (!near_point(cur, edge_a[f], snap) && steps++ < out.arcs.size() + 4) {
            bool advanced = false;
            for (std::size_t k = 0; k < out.arcs.size(); k++) {
                if (used[k]) continue;
                const OracleArc& arc = out.arcs[k];
                if (arc.left_face != static_cast<int>(f) &&
                    arc.right_face != static_cast<int>(f))
                    continue;
                Point2 nxt;
                double nz;
                if (near_point(arc.a, cur, snap) && std::fabs(arc.za - curz) <= 1e-6) {
                    nxt = arc.b;
                    nz = arc.zb;
                } else if (near_point(arc.b, cur, snap) && std::fabs(arc.zb - curz) <= 1e-6) {
                    nxt = arc.a;
                    nz = arc.za;
                } else {
                    continue;
                }
                used[k] = true;
                cur = nxt;
                curz = nz;
                if (!near_point(cur, edge_a[f], snap)) loop.push_back({cur.x, cur.y, curz});
                advanced = true;
                break;
            }
            if (!advanced)
                throw invariant_error("oracle face loop did not close");
        }
        if (!near_point(cur, edge_a[f], snap))
            throw invariant_error("oracle face loop did not close");
        out.faces.push_back(std::move(loop));
    }
    return out;
}

inline std::vector<SkeletonEdgeView> oracle_edge_views(const OracleSkeleton& sk) {
    std::vector<SkeletonEdgeView> out;
    out.reserve(sk.arcs.size());
    for (const auto& a : sk.arcs) out.push_back({a.a, a.b, a.za, a.zb});
    return out;
}

}  // namespace sskel
