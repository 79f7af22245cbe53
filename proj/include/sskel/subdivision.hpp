#pragma once

// The evolving partition K(P): cell records with face lists (boundary edges
// tagged by the slab whose terrain face they bound), vertex conflict lists,
// cut construction, lifted cuts, steepest-descent paths, and the planar
// splitter that turns one cell plus a set of new edges into child cells.

#include <map>
#include <set>
#include <vector>

#include "sskel/envelope.hpp"
#include "sskel/motorcycle.hpp"
#include "sskel/polygon.hpp"
#include "sskel/slab.hpp"

namespace sskel {

enum class EdgeKind { polygon, cut, descent };

struct CellVertex {
    Point2 p;
    int reflex_of = -1;  // global polygon vertex id while this corner is reflex
    int on_track = -1;   // motorcycle id whose track passes through this point
};

struct CellEdge {
    int tag = -1;  // slab bounding the face of S' inside the cell
    EdgeKind kind = EdgeKind::polygon;
    int on_track = -1;  // set when the edge runs along a motorcycle track
};

struct CellRing {
    std::vector<CellVertex> verts;
    std::vector<CellEdge> edges;  // edges[i]: verts[i] -> verts[i+1 mod n]
};

struct CellRecord {
    int id = -1;
    int parent = -1;
    std::vector<CellRing> rings;  // rings[0] outer (CCW), others holes (CW)
    std::vector<int> conflicts;   // motorcycle-graph vertex ids
    int depth_dv = 0;
    int depth_dval = 0;

    double area() const {
        double a = 0.0;
        for (const auto& r : rings) {
            std::size_t n = r.verts.size();
            for (std::size_t i = 0; i < n; i++) {
                const Point2& p = r.verts[i].p;
                const Point2& q = r.verts[(i + 1) % n].p;
                a += p.x * q.y - q.x * p.y;
            }
        }
        return 0.5 * a;
    }

    std::size_t edge_count() const {
        std::size_t n = 0;
        for (const auto& r : rings) n += r.verts.size();
        return n;
    }

    bool contains(const Point2& p) const {
        bool inside = false;
        for (const auto& r : rings) {
            std::size_t n = r.verts.size();
            for (std::size_t i = 0; i < n; i++) {
                const Point2& a = r.verts[i].p;
                const Point2& b = r.verts[(i + 1) % n].p;
                if ((a.y > p.y) != (b.y > p.y)) {
                    double x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                    if (p.x < x) inside = !inside;
                }
            }
        }
        return inside;
    }

    double boundary_distance(const Point2& p) const {
        double best = std::numeric_limits<double>::max();
        for (const auto& r : rings) {
            std::size_t n = r.verts.size();
            for (std::size_t i = 0; i < n; i++)
                best = std::min(best,
                                point_segment_distance(p, r.verts[i].p, r.verts[(i + 1) % n].p));
        }
        return best;
    }

    bool strictly_inside(const Point2& p, double tol) const {
        return contains(p) && boundary_distance(p) > tol;
    }
};

// Shared read-only inputs.
struct PipelineContext {
    const Polygon* poly = nullptr;
    const MotorcycleGraph* graph = nullptr;
    const SlabSet* slabs = nullptr;
    double scale = 1.0;
    double tol = 1e-9;

    // global polygon vertex id -> motorcycle id (reflex vertices only)
    std::map<int, int> motorcycle_at_vertex;

    PipelineContext() = default;
    PipelineContext(const Polygon& p, const MotorcycleGraph& g, const SlabSet& s)
        : poly(&p), graph(&g), slabs(&s) {
        scale = polygon_scale(p);
        tol = epsilon() * scale;
        for (const auto& m : g.cycles) {
            int gv = global_edge_index(p, m.ring, m.vidx);  // vertex ids match edge ids
            motorcycle_at_vertex[gv] = m.id;
        }
    }
};

// The registry of cells; split-only, cells are never merged.
struct KP {
    std::vector<CellRecord> cells;
    double polygon_area = 0.0;

    CellRecord& fresh_cell() {
        CellRecord c;
        c.id = static_cast<int>(cells.size());
        cells.push_back(std::move(c));
        return cells.back();
    }
};

// ---------------------------------------------------------------------------
// Initial cell.
// ---------------------------------------------------------------------------

inline KP init_kp(const PipelineContext& ctx) {
    KP kp;
    const Polygon& poly = *ctx.poly;
    kp.polygon_area = polygon_area(poly);
    CellRecord& cell = kp.fresh_cell();
    int gv = 0;
    for (std::size_t k = 0; k < poly.rings.size(); k++) {
        const auto& ring = poly.rings[k];
        CellRing cr;
        for (std::size_t i = 0; i < ring.size(); i++, gv++) {
            CellVertex v;
            v.p = ring[i];
            if (poly.reflex[k][i]) {
                v.reflex_of = gv;
                auto it = ctx.motorcycle_at_vertex.find(gv);
                if (it != ctx.motorcycle_at_vertex.end()) v.on_track = it->second;
            }
            cr.verts.push_back(v);
            CellEdge e;
            e.tag = gv;  // edge slabs share polygon edge indices
            e.kind = EdgeKind::polygon;
            cr.edges.push_back(e);
        }
        cell.rings.push_back(std::move(cr));
    }
    cell.conflicts.resize(ctx.graph->vertices.size());
    for (std::size_t i = 0; i < cell.conflicts.size(); i++)
        cell.conflicts[i] = static_cast<int>(i);
    return kp;
}

// Interior angle at ring vertex i exceeds pi (with the ring's own
// orientation; interior is on the left for both outer rings and holes).
inline bool reflex_corner(const CellRing& ring, std::size_t i) {
    std::size_t n = ring.verts.size();
    const Point2& a = ring.verts[(i + n - 1) % n].p;
    const Point2& v = ring.verts[i].p;
    const Point2& b = ring.verts[(i + 1) % n].p;
    return orient2d_sign(a, v, b) < 0;
}

// Slabs referenced by the cell: face-list edge tags plus the motorcycle
// slabs of every still-reflex polygon corner.
inline std::vector<int> collect_slabs(const PipelineContext& ctx, const CellRecord& cell) {
    std::set<int> ids;
    for (const auto& ring : cell.rings) {
        for (std::size_t i = 0; i < ring.edges.size(); i++) {
            if (ring.edges[i].tag >= 0) ids.insert(ring.edges[i].tag);
            const CellVertex& v = ring.verts[i];
            if (v.reflex_of >= 0 && reflex_corner(ring, i)) {
                auto it = ctx.motorcycle_at_vertex.find(v.reflex_of);
                if (it != ctx.motorcycle_at_vertex.end()) {
                    auto [s1, s2] = ctx.slabs->motorcycle_slabs(it->second);
                    ids.insert(s1);
                    ids.insert(s2);
                }
            }
        }
    }
    return {ids.begin(), ids.end()};
}

// ---------------------------------------------------------------------------
// Cuts.
// ---------------------------------------------------------------------------

struct CutLine {
    Point2 origin;
    Vec2 dir;  // unit

    Point2 at(double t) const { return origin + dir * t; }
    double param_of(const Point2& p) const { return (p - origin).dot(dir); }
};

inline CutLine vertical_line_through(const Point2& p) { return {{p.x, 0.0}, {0.0, 1.0}}; }

// Maximal parameter intervals of the line inside the cell, split at boundary
// touch points, ordered along the line.
inline std::vector<std::pair<double, double>> cut_segments(const CellRecord& cell,
                                                           const CutLine& line, double tol) {
    std::vector<double> params;
    for (const auto& ring : cell.rings) {
        std::size_t n = ring.verts.size();
        for (std::size_t i = 0; i < n; i++) {
            const Point2& a = ring.verts[i].p;
            const Point2& b = ring.verts[(i + 1) % n].p;
            // Distance of endpoints from the line.
            double da = (a - line.origin).cross(line.dir);
            double db = (b - line.origin).cross(line.dir);
            bool on_a = std::fabs(da) <= tol;
            bool on_b = std::fabs(db) <= tol;
            if (on_a) params.push_back(line.param_of(a));
            if (on_b) params.push_back(line.param_of(b));
            if (!on_a && !on_b && ((da > 0.0) != (db > 0.0))) {
                double t = da / (da - db);
                params.push_back(line.param_of(a + (b - a) * t));
            }
        }
    }
    if (params.empty()) return {};
    std::sort(params.begin(), params.end());
    params.erase(std::unique(params.begin(), params.end(),
                             [&](double a, double b) { return b - a <= tol; }),
                 params.end());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < params.size(); i++) {
        double mid = 0.5 * (params[i] + params[i + 1]);
        if (params[i + 1] - params[i] <= 2.0 * tol) continue;
        if (cell.strictly_inside(line.at(mid), tol)) out.push_back({params[i], params[i + 1]});
    }
    return out;
}

// Spec-facing wrapper: the vertical cut segments as geometry.
inline std::vector<std::pair<Point2, Point2>> vertical_cut_segments(const CellRecord& cell,
                                                                    double x0, double tol) {
    CutLine line = vertical_line_through({x0, 0.0});
    auto ivs = cut_segments(cell, line, tol);
    std::vector<std::pair<Point2, Point2>> out;
    for (auto [a, b] : ivs) out.push_back({line.at(a), line.at(b)});
    return out;
}

// Restriction of one slab to the vertical plane over the line: a parameter
// interval with linear height.
inline bool slab_on_line(const Slab& s, const CutLine& line, double wlo, double whi,
                         EnvSegment& seg) {
    // Frame constraints: 0 <= along(t) <= len, side(t) >= 0.
    double a0, s0, a1, s1;
    s.frame_coords(line.at(0.0), a0, s0);
    s.frame_coords(line.at(1.0), a1, s1);
    double dda = a1 - a0;  // d(along)/dt
    double dds = s1 - s0;
    double lo = wlo, hi = whi;
    auto clip = [&](double num_at0, double slope, double lo_bound, double hi_bound) {
        // lo_bound <= num_at0 + slope*t <= hi_bound
        if (std::fabs(slope) < 1e-15) {
            if (num_at0 < lo_bound || num_at0 > hi_bound) lo = 1.0, hi = 0.0;
            return;
        }
        double t_lo = (lo_bound - num_at0) / slope;
        double t_hi = (hi_bound - num_at0) / slope;
        if (t_lo > t_hi) std::swap(t_lo, t_hi);
        lo = std::max(lo, t_lo);
        hi = std::min(hi, t_hi);
    };
    clip(a0, dda, 0.0, s.base_len);
    clip(s0, dds, 0.0, std::numeric_limits<double>::max());
    if (hi <= lo) return false;
    seg.t0 = lo;
    seg.t1 = hi;
    seg.z0 = s.plane.eval(line.at(lo));
    seg.z1 = s.plane.eval(line.at(hi));
    seg.id = s.id;
    return true;
}

// Lower envelope of the cell's slabs along the cut line. The count of
// participating slabs is reported for the work counter.
inline EnvelopeChain lift_cut_line(const PipelineContext& ctx, const CellRecord& cell,
                                   const CutLine& line, double wlo, double whi,
                                   std::size_t* input_count = nullptr) {
    auto slab_ids = collect_slabs(ctx, cell);
    std::vector<EnvSegment> segs;
    for (int id : slab_ids) {
        EnvSegment seg;
        if (slab_on_line((*ctx.slabs)[id], line, wlo, whi, seg)) segs.push_back(seg);
    }
    if (input_count) *input_count = segs.size();
    return envelope_segments(std::move(segs));
}

// ---------------------------------------------------------------------------
// Descent paths.
// ---------------------------------------------------------------------------

struct DescentPath {
    // Strictly descending polyline on the terrain; last point on the polygon
    // boundary (unless clipped by the caller at the cell boundary).
    std::vector<Point3> pts;
    int slab = -1;
};

inline DescentPath trace_descent(const PipelineContext& ctx, const Point2& p, double z,
                                 const Slab& slab) {
    DescentPath path;
    path.slab = slab.id;
    double tol = ctx.tol;
    if (z <= tol) return path;  // already on the boundary
    path.pts.push_back({p.x, p.y, z});
    if (slab.kind == SlabKind::edge) {
        Point2 foot = p - slab.ray * z;
        path.pts.push_back({foot.x, foot.y, 0.0});
        return path;
    }
    // Motorcycle slab: straight to the track, then follow the valley down to
    // the reflex vertex.
    double along, side;
    slab.frame_coords(p, along, side);
    if (side > tol) {
        Point2 q = p - slab.ray * side;
        double zq = slab.plane.eval(q);
        path.pts.push_back({q.x, q.y, zq});
    }
    Point2 v = slab.base_a;  // track start: the reflex vertex at height 0
    const Point3& last = path.pts.back();
    if (dist({last.x, last.y}, v) > tol) path.pts.push_back({v.x, v.y, 0.0});
    if (path.pts.size() < 2) path.pts.clear();
    return path;
}

// ---------------------------------------------------------------------------
// Cell splitting.
// ---------------------------------------------------------------------------

struct NewEdge {
    Point2 a, b;
    int tag_left = -1;   // slab bounding the face left of a->b
    int tag_right = -1;  // right of a->b
    EdgeKind kind = EdgeKind::cut;
    int on_track = -1;
    // Endpoint annotations (merged into the vertex pool).
    int a_track = -1, b_track = -1;
};

namespace split_detail {

struct PoolVertex {
    Point2 p;
    int reflex_of = -1;
    int on_track = -1;
};

struct RawEdge {
    int va, vb;
    int tag_left, tag_right;  // -2 = outside the parent cell
    EdgeKind kind;
    int on_track;
};

struct HalfEdge {
    int from, to;
    int tag;  // face tag on the left
    EdgeKind kind;
    int on_track;
    bool outside;
    int twin = -1;
    int next = -1;
    bool used = false;
};

// Uniform bucket grid so pool lookup and edge splitting stay near-linear.
struct PointGrid {
    double cs = 1.0;
    std::map<std::pair<long long, long long>, std::vector<int>> buckets;

    std::pair<long long, long long> cell_of(const Point2& p) const {
        return {static_cast<long long>(std::floor(p.x / cs)),
                static_cast<long long>(std::floor(p.y / cs))};
    }

    void insert(const Point2& p, int id) { buckets[cell_of(p)].push_back(id); }

    template <class F>
    void near_point_candidates(const Point2& p, F&& f) const {
        auto [cx, cy] = cell_of(p);
        for (long long dx = -1; dx <= 1; dx++)
            for (long long dy = -1; dy <= 1; dy++) {
                auto it = buckets.find({cx + dx, cy + dy});
                if (it == buckets.end()) continue;
                for (int id : it->second) f(id);
            }
    }

    template <class F>
    void near_segment_candidates(const Point2& a, const Point2& b, F&& f) const {
        double len = dist(a, b);
        int steps = std::max(1, static_cast<int>(std::ceil(len / cs)) * 2);
        std::pair<long long, long long> last{std::numeric_limits<long long>::min(), 0};
        std::set<std::pair<long long, long long>> visited;
        for (int s = 0; s <= steps; s++) {
            Point2 q = a + (b - a) * (static_cast<double>(s) / steps);
            auto c = cell_of(q);
            if (c == last) continue;
            last = c;
            for (long long dx = -1; dx <= 1; dx++)
                for (long long dy = -1; dy <= 1; dy++) {
                    auto key = std::pair<long long, long long>{c.first + dx, c.second + dy};
                    if (!visited.insert(key).second) continue;
                    auto it = buckets.find(key);
                    if (it == buckets.end()) continue;
                    for (int id : it->second) f(id);
                }
        }
    }
};

struct Pool {
    std::vector<PoolVertex> verts;
    PointGrid grid;
    double tol;

    Pool(double tolerance, double scale) : tol(tolerance) {
        grid.cs = std::max(tol * 64.0, scale / 512.0);
    }

    int find_or_add(const Point2& p) {
        int found = -1;
        grid.near_point_candidates(p, [&](int id) {
            if (found < 0 && near_point(verts[id].p, p, tol)) found = id;
        });
        if (found >= 0) return found;
        verts.push_back({p, -1, -1});
        grid.insert(p, static_cast<int>(verts.size()) - 1);
        return static_cast<int>(verts.size()) - 1;
    }
};

}  // namespace split_detail

// Split a cell along new edges (cut segments, descent paths). Children are
// appended to the registry; their ids are returned. Conflict vertices are
// redistributed; vertices landing on new edges stop conflicting.
inline std::vector<int> split_cell(const PipelineContext& ctx, KP& kp, int cell_id,
                                   const std::vector<NewEdge>& new_edges) {
    using namespace split_detail;
    double tol = ctx.tol * 10.0;

    // Crossing new edges indicate an upstream failure. The quadratic check
    // runs on small inputs; big splits are covered by the traversal guard
    // and the area-conservation invariant below.
    if (new_edges.size() <= 256) {
        for (std::size_t i = 0; i < new_edges.size(); i++)
            for (std::size_t j = i + 1; j < new_edges.size(); j++)
                if (segments_cross(new_edges[i].a, new_edges[i].b, new_edges[j].a,
                                   new_edges[j].b))
                    throw invariant_error("split_cell: crossing new edges");
    }

    Pool pool(tol, ctx.scale);
    std::vector<RawEdge> raw;

    {
        const CellRecord& cell = kp.cells[cell_id];
        for (const auto& ring : cell.rings) {
            std::size_t n = ring.verts.size();
            for (std::size_t i = 0; i < n; i++) {
                int va = pool.find_or_add(ring.verts[i].p);
                int vb = pool.find_or_add(ring.verts[(i + 1) % n].p);
                pool.verts[va].reflex_of =
                    std::max(pool.verts[va].reflex_of, ring.verts[i].reflex_of);
                pool.verts[va].on_track =
                    std::max(pool.verts[va].on_track, ring.verts[i].on_track);
                if (va == vb) continue;
                raw.push_back({va, vb, ring.edges[i].tag, -2, ring.edges[i].kind,
                               ring.edges[i].on_track});
            }
        }
        for (const auto& e : new_edges) {
            int va = pool.find_or_add(e.a);
            int vb = pool.find_or_add(e.b);
            pool.verts[va].on_track = std::max(pool.verts[va].on_track, e.a_track);
            pool.verts[vb].on_track = std::max(pool.verts[vb].on_track, e.b_track);
            if (va == vb) continue;
            raw.push_back({va, vb, e.tag_left, e.tag_right, e.kind, e.on_track});
        }
    }

    // Split every raw edge at pool vertices lying in its interior.
    struct SubEdge {
        int va, vb;
        int tag_left, tag_right;
        EdgeKind kind;
        int on_track;
    };
    std::vector<SubEdge> subs;
    for (const auto& e : raw) {
        const Point2& A = pool.verts[e.va].p;
        const Point2& B = pool.verts[e.vb].p;
        double len = dist(A, B);
        std::vector<std::pair<double, int>> stops;
        stops.push_back({0.0, e.va});
        stops.push_back({1.0, e.vb});
        pool.grid.near_segment_candidates(A, B, [&](int iv) {
            if (iv == e.va || iv == e.vb) return;
            const Point2& q = pool.verts[iv].p;
            if (point_segment_distance(q, A, B) > tol) return;
            double t = (q - A).dot(B - A) / (len * len);
            if (t <= tol / len || t >= 1.0 - tol / len) return;
            stops.push_back({t, iv});
        });
        std::sort(stops.begin(), stops.end());
        for (std::size_t i = 0; i + 1 < stops.size(); i++) {
            if (stops[i].second == stops[i + 1].second) continue;
            subs.push_back({stops[i].second, stops[i + 1].second, e.tag_left, e.tag_right,
                            e.kind, e.on_track});
        }
    }

    // Dedupe coincident sub-edges (descent paths may run along each other or
    // along a cut); keep the most informative tags.
    std::map<std::pair<int, int>, int> seen;
    std::vector<SubEdge> edges;
    for (const auto& s : subs) {
        auto key = std::minmax(s.va, s.vb);
        auto it = seen.find({key.first, key.second});
        if (it == seen.end()) {
            seen[{key.first, key.second}] = static_cast<int>(edges.size());
            edges.push_back(s);
            continue;
        }
        SubEdge& prev = edges[it->second];
        // Align orientations before merging tags.
        SubEdge aligned = s;
        if (aligned.va != prev.va) {
            std::swap(aligned.va, aligned.vb);
            std::swap(aligned.tag_left, aligned.tag_right);
        }
        if (prev.tag_left < 0 && aligned.tag_left >= 0) prev.tag_left = aligned.tag_left;
        if (prev.tag_right < 0 && aligned.tag_right >= 0) prev.tag_right = aligned.tag_right;
        if (prev.on_track < 0) prev.on_track = aligned.on_track;
        if (prev.kind == EdgeKind::cut && aligned.kind == EdgeKind::descent)
            prev.kind = EdgeKind::descent;
    }

    // Half-edge structure with rotation-based face extraction.
    std::vector<HalfEdge> hes;
    for (const auto& e : edges) {
        HalfEdge h1{e.va, e.vb, e.tag_left, e.kind, e.on_track, e.tag_left == -2, -1, -1, false};
        HalfEdge h2{e.vb, e.va, e.tag_right, e.kind, e.on_track, e.tag_right == -2, -1, -1, false};
        h1.twin = static_cast<int>(hes.size()) + 1;
        h2.twin = static_cast<int>(hes.size());
        hes.push_back(h1);
        hes.push_back(h2);
    }
    std::vector<std::vector<int>> outgoing(pool.verts.size());
    for (std::size_t h = 0; h < hes.size(); h++) outgoing[hes[h].from].push_back(static_cast<int>(h));
    for (auto& out : outgoing) {
        std::sort(out.begin(), out.end(), [&](int a, int b) {
            const Point2& pa = pool.verts[hes[a].from].p;
            Vec2 da = pool.verts[hes[a].to].p - pa;
            Vec2 db = pool.verts[hes[b].to].p - pa;
            return std::atan2(da.y, da.x) < std::atan2(db.y, db.x);
        });
    }
    for (std::size_t h = 0; h < hes.size(); h++) {
        int v = hes[h].to;
        const auto& out = outgoing[v];
        int twin = hes[h].twin;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < out.size(); i++)
            if (out[i] == twin) idx = i;
        // Next half-edge: rotate clockwise from the twin.
        hes[h].next = out[(idx + out.size() - 1) % out.size()];
    }

    // Extract orbits.
    struct Orbit {
        std::vector<int> hs;
        double area2 = 0.0;
        bool outside = false;
    };
    std::vector<Orbit> orbits;
    for (std::size_t h0 = 0; h0 < hes.size(); h0++) {
        if (hes[h0].used) continue;
        Orbit orb;
        int h = static_cast<int>(h0);
        std::size_t guard = 0;
        while (!hes[h].used && guard++ <= hes.size()) {
            hes[h].used = true;
            orb.hs.push_back(h);
            orb.outside |= hes[h].outside;
            const Point2& a = pool.verts[hes[h].from].p;
            const Point2& b = pool.verts[hes[h].to].p;
            orb.area2 += a.x * b.y - b.x * a.y;
            h = hes[h].next;
        }
        if (guard > hes.size() + 1)
            throw invariant_error("split_cell: face traversal did not close");
        orbits.push_back(std::move(orb));
    }

    double area_tol = 1e-12 * ctx.scale * ctx.scale;
    std::vector<Orbit*> children, holes;
    for (auto& orb : orbits) {
        if (orb.outside) continue;
        if (orb.area2 > area_tol)
            children.push_back(&orb);
        else if (orb.area2 < -area_tol)
            holes.push_back(&orb);
        else
            throw invariant_error("split_cell: degenerate zero-area orbit");
    }
    if (children.empty()) throw invariant_error("split_cell: no child cells");

    // Build child cells.
    auto ring_from_orbit = [&](const Orbit& orb) {
        CellRing ring;
        for (int h : orb.hs) {
            const PoolVertex& pv = pool.verts[hes[h].from];
            CellVertex v;
            v.p = pv.p;
            v.reflex_of = pv.reflex_of;
            v.on_track = pv.on_track;
            ring.verts.push_back(v);
            CellEdge e;
            e.tag = hes[h].tag;
            e.kind = hes[h].kind;
            e.on_track = hes[h].on_track;
            ring.edges.push_back(e);
        }
        return ring;
    };

    int parent_id = cell_id;
    double parent_area = kp.cells[cell_id].area();
    int parent_dv = kp.cells[cell_id].depth_dv;
    int parent_dval = kp.cells[cell_id].depth_dval;
    std::vector<int> parent_conflicts = kp.cells[cell_id].conflicts;

    std::vector<int> child_ids;
    for (const Orbit* orb : children) {
        CellRecord& child = kp.fresh_cell();
        child.parent = parent_id;
        child.depth_dv = parent_dv;
        child.depth_dval = parent_dval;
        child.rings.push_back(ring_from_orbit(*orb));
        // A corner keeps its reflex annotation only while it stays reflex.
        CellRing& ring = child.rings[0];
        for (std::size_t i = 0; i < ring.verts.size(); i++)
            if (ring.verts[i].reflex_of >= 0 && !reflex_corner(ring, i))
                ring.verts[i].reflex_of = -1;
        child_ids.push_back(child.id);
    }
    // Assign hole rings to the child containing them.
    for (const Orbit* horb : holes) {
        Point2 probe = pool.verts[hes[horb->hs[0]].from].p;
        int best = -1;
        for (int cid : child_ids) {
            if (kp.cells[cid].contains(probe)) {
                best = cid;
                break;
            }
        }
        if (best < 0) throw invariant_error("split_cell: orphan hole ring");
        kp.cells[best].rings.push_back(ring_from_orbit(*horb));
    }

    // Area conservation.
    double child_area = 0.0;
    for (int cid : child_ids) child_area += kp.cells[cid].area();
    if (std::fabs(child_area - parent_area) > 1e-9 * std::max(1.0, parent_area))
        throw invariant_error("split_cell: child areas do not sum to the parent");

    // Conflict redistribution. A vertex on any new edge lands on a cell
    // boundary at a non-reflex corner and stops conflicting.
    for (int gv : parent_conflicts) {
        const Point2 p = ctx.graph->vertices[gv].p;
        bool on_new_edge = false;
        for (const auto& e : new_edges)
            if (point_segment_distance(p, e.a, e.b) <= tol) {
                on_new_edge = true;
                break;
            }
        if (on_new_edge) continue;
        bool assigned = false;
        // Reflex boundary corners conflict with every incident cell.
        for (int cid : child_ids) {
            const CellRecord& child = kp.cells[cid];
            for (const auto& ring : child.rings)
                for (std::size_t i = 0; i < ring.verts.size(); i++)
                    if (ring.verts[i].reflex_of >= 0 && near_point(ring.verts[i].p, p, tol) &&
                        reflex_corner(ring, i)) {
                        kp.cells[cid].conflicts.push_back(gv);
                        assigned = true;
                        goto next_child;
                    }
        next_child:;
        }
        if (assigned) continue;
        for (int cid : child_ids)
            if (kp.cells[cid].strictly_inside(p, tol)) {
                kp.cells[cid].conflicts.push_back(gv);
                assigned = true;
                break;
            }
        if (!assigned) {
            // Boundary vertex inherited from the parent boundary.
            for (int cid : child_ids)
                if (kp.cells[cid].boundary_distance(p) <= tol) {
                    kp.cells[cid].conflicts.push_back(gv);
                    break;
                }
        }
    }

    kp.cells[cell_id].conflicts.clear();
    return child_ids;
}

}  // namespace sskel
