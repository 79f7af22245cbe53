#pragma once

// The two recursive drivers over K(P): vertical cuts through median conflict
// vertices, then balanced cuts between valleys, down to leaf cells solved as
// plane envelopes (or directly, for empty cells and wedges).

#include <array>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "sskel/envelope.hpp"
#include "sskel/subdivision.hpp"

namespace sskel {

// ---------------------------------------------------------------------------
// Instrumentation.
// ---------------------------------------------------------------------------

struct CellStats {
    int id = -1;
    int parent = -1;
    int depth_dv = 0;
    int depth_dval = 0;
    std::size_t v_size = 0;       // vertex conflicts when processed
    std::size_t r_size = 0;       // valley conflicts when processed
    std::size_t face_list = 0;    // boundary edge count
    char kind = '?';              // V vertical cut, B balanced cut,
                                  // E empty, W wedge, C convex leaf
};

struct RecursionStats {
    std::vector<CellStats> cells;
    std::size_t envelope_inputs = 0;
    double envelope_work = 0.0;  // sum over calls of m * log2(m + 2)
    int max_depth_dv = 0;
    int max_depth_dval = 0;

    void note_envelope(std::size_t m) {
        envelope_inputs += m;
        envelope_work += static_cast<double>(m) * std::log2(static_cast<double>(m) + 2.0);
    }
};

// ---------------------------------------------------------------------------
// Leaf outputs feeding skeleton assembly.
// ---------------------------------------------------------------------------

struct FragmentEdge {
    Point2 a, b;
    double za = 0.0, zb = 0.0;
    int slab_l = -1, slab_r = -1;  // faces of S' on each side of a->b
};

struct BoundaryPiece {
    Point2 a, b;  // directed, cell interior on the left
    int tag = -1;
    EdgeKind kind = EdgeKind::polygon;
};

struct LeafOutput {
    int cell_id = -1;
    std::vector<FragmentEdge> interior;
    std::vector<BoundaryPiece> boundary;
};

// ---------------------------------------------------------------------------
// Conflicting valleys.
// ---------------------------------------------------------------------------

struct ValleyEntry {
    int motorcycle = -1;
    int ring_vertex = -1;  // index into the single ring of the cell
    Point2 at;
    Vec2 uphill;
};

namespace divide_detail {

// u strictly inside the interior wedge at ring vertex i.
inline bool direction_enters(const CellRing& ring, std::size_t i, const Vec2& u,
                             double ang_tol = 1e-9) {
    std::size_t n = ring.verts.size();
    Vec2 d_out = (ring.verts[(i + 1) % n].p - ring.verts[i].p).normalized();
    Vec2 d_in = (ring.verts[i].p - ring.verts[(i + n - 1) % n].p).normalized();
    Vec2 a = d_out;           // interior wedge runs CCW from d_out ...
    Vec2 b = (d_in * -1.0);   // ... to the reversed incoming direction
    double ca = a.cross(u), cb = u.cross(b);
    if (a.cross(b) >= 0.0) return ca > ang_tol && cb > ang_tol;
    return ca > ang_tol || cb > ang_tol;
}

}  // namespace divide_detail

// Valleys intruding into the cell interior, located where a motorcycle track
// passes through a boundary vertex and its uphill direction points inside.
inline std::vector<ValleyEntry> conflicting_valleys(const PipelineContext& ctx,
                                                    const CellRecord& cell) {
    std::vector<ValleyEntry> out;
    if (cell.rings.empty()) return out;
    const CellRing& ring = cell.rings[0];
    double tol = ctx.tol * 10.0;
    std::map<int, std::pair<double, ValleyEntry>> best;  // per motorcycle: lowest entry

    for (std::size_t i = 0; i < ring.verts.size(); i++) {
        const Point2& w = ring.verts[i].p;
        for (const Motorcycle& m : ctx.graph->cycles) {
            const Track& tr = ctx.graph->tracks[m.id];
            if (point_segment_distance(w, tr.start, tr.stop) > tol) continue;
            Vec2 u = tr.dir();
            double param = (w - tr.start).dot(u);
            if (param >= tr.length() - tol) continue;  // nothing uphill left
            if (!divide_detail::direction_enters(ring, i, u)) continue;
            ValleyEntry e{m.id, static_cast<int>(i), w, u};
            auto it = best.find(m.id);
            if (it == best.end() || param < it->second.first)
                best[m.id] = {param, e};
        }
    }
    for (auto& [mid, pe] : best) out.push_back(pe.second);
    std::sort(out.begin(), out.end(),
              [](const ValleyEntry& a, const ValleyEntry& b) { return a.ring_vertex < b.ring_vertex; });
    return out;
}

// ---------------------------------------------------------------------------
// Extended valleys: chords from each entry to the boundary.
// ---------------------------------------------------------------------------

struct ExtendedValley {
    int motorcycle = -1;
    Point2 from, to;
    int pop_rank = -1;  // order in which the boundary-traversal stack pops
};

// Chords from valley entries, extended uphill to the first boundary hit.
// Geometry by direct ray casting; a two-lap boundary traversal with a stack
// recovers the nesting order and checks the outerplanar structure.
inline std::vector<ExtendedValley> extend_valleys_impl(const std::vector<Point2>& ring,
                                                       const std::vector<ValleyEntry>& entries,
                                                       double tol) {
    std::vector<ExtendedValley> out;
    std::size_t n = ring.size();
    for (const auto& e : entries) {
        double best_t = std::numeric_limits<double>::max();
        Point2 hit;
        for (std::size_t i = 0; i < n; i++) {
            const Point2& a = ring[i];
            const Point2& b = ring[(i + 1) % n];
            double t, u;
            if (!segment_intersection_params(e.at, e.at + e.uphill, a, b, t, u)) continue;
            if (u < -1e-9 || u > 1.0 + 1e-9) continue;
            if (t <= tol) continue;
            if (t < best_t) {
                best_t = t;
                hit = a + (b - a) * u;
            }
        }
        if (best_t == std::numeric_limits<double>::max())
            throw invariant_error("extend_valleys: ray misses the boundary");
        out.push_back({e.motorcycle, e.at, hit, -1});
    }

    // Stack simulation for pop order (inner chords pop first).
    std::vector<int> stack;
    int rank = 0;
    for (int lap = 0; lap < 2; lap++) {
        for (std::size_t i = 0; i < n; i++) {
            if (lap == 0) {
                for (std::size_t k = 0; k < entries.size(); k++)
                    if (static_cast<std::size_t>(entries[k].ring_vertex) == i)
                        stack.push_back(static_cast<int>(k));
            }
            const Point2& a = ring[i];
            const Point2& b = ring[(i + 1) % n];
            while (!stack.empty()) {
                int top = stack.back();
                if (out[top].pop_rank >= 0) {
                    stack.pop_back();
                    continue;
                }
                if (point_segment_distance(out[top].to, a, b) <= tol * 10.0) {
                    out[top].pop_rank = rank++;
                    stack.pop_back();
                } else {
                    break;
                }
            }
        }
    }
    for (const auto& v : out)
        if (v.pop_rank < 0) throw invariant_error("extend_valleys: stack did not empty");
    return out;
}

inline std::vector<ExtendedValley> extend_valleys(const PipelineContext& ctx,
                                                  const CellRecord& cell,
                                                  const std::vector<ValleyEntry>& entries) {
    std::vector<Point2> ring;
    for (const auto& v : cell.rings[0].verts) ring.push_back(v.p);
    return extend_valleys_impl(ring, entries, ctx.tol * 10.0);
}

}  // namespace sskel

#include "sskel/triangulate.hpp"

namespace sskel {

// ---------------------------------------------------------------------------
// Balanced cut (dual-tree centroid over the triangulated outerplanar graph).
// ---------------------------------------------------------------------------

struct BalancedCut {
    Point2 a, b;
    int valley = -1;  // motorcycle id when the cut runs along an extended valley
    std::size_t side_count[2] = {0, 0};  // chords strictly on each side
};

// Pure form used by the pipeline and directly testable: cell ring plus
// non-crossing chords (endpoint pairs on the boundary).
inline BalancedCut balanced_cut_impl(const std::vector<Point2>& ring,
                                     const std::vector<std::pair<Point2, Point2>>& chords,
                                     const std::vector<int>& chord_ids, double tol) {
    if (chords.empty()) throw invariant_error("balanced_cut: no chords");

    // Build the augmented vertex list: ring vertices plus chord endpoints
    // inserted along the boundary.
    std::vector<Point2> pts(ring.begin(), ring.end());
    auto find_or_add_on_ring = [&](const Point2& p) {
        for (std::size_t i = 0; i < pts.size(); i++)
            if (near_point(pts[i], p, tol)) return static_cast<int>(i);
        pts.push_back(p);
        return static_cast<int>(pts.size()) - 1;
    };
    std::vector<std::pair<int, int>> chord_idx;
    for (const auto& [a, b] : chords)
        chord_idx.push_back({find_or_add_on_ring(a), find_or_add_on_ring(b)});

    // Ring edges, split at any added vertex lying on them.
    std::vector<std::pair<int, int>> graph_edges;
    std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; i++) {
        const Point2& A = ring[i];
        const Point2& B = ring[(i + 1) % n];
        std::vector<std::pair<double, int>> stops{{0.0, static_cast<int>(i)},
                                                  {1.0, static_cast<int>((i + 1) % n)}};
        double len = dist(A, B);
        for (std::size_t k = n; k < pts.size(); k++) {
            if (point_segment_distance(pts[k], A, B) > tol) continue;
            double t = (pts[k] - A).dot(B - A) / (len * len);
            if (t <= tol / len || t >= 1.0 - tol / len) continue;
            stops.push_back({t, static_cast<int>(k)});
        }
        std::sort(stops.begin(), stops.end());
        for (std::size_t k = 0; k + 1 < stops.size(); k++)
            if (stops[k].second != stops[k + 1].second)
                graph_edges.push_back({stops[k].second, stops[k + 1].second});
    }
    std::set<std::pair<int, int>> chord_set;
    for (std::size_t k = 0; k < chord_idx.size(); k++) {
        auto key = std::minmax(chord_idx[k].first, chord_idx[k].second);
        chord_set.insert({key.first, key.second});
        graph_edges.push_back(chord_idx[k]);
    }

    // Faces of the chord-augmented graph, each triangulated monotone-style.
    auto faces = triangulate_detail::faces_of_planar_graph(pts, graph_edges);
    std::vector<std::array<int, 3>> tris;
    for (const auto& f : faces) {
        auto ft = triangulate_polygon(pts, f);
        tris.insert(tris.end(), ft.begin(), ft.end());
    }
    if (tris.empty()) throw invariant_error("balanced_cut: triangulation failed");

    // Dual tree: nodes = triangles plus one weighted node per chord.
    struct Node {
        int weight = 0;
        int chord = -1;  // chord index when this is a subdivision node
        std::vector<int> adj;
        std::array<int, 3> tri_vid = {-1, -1, -1};
        int tri_index = -1;
    };
    std::vector<Node> nodes(tris.size());
    for (std::size_t t = 0; t < tris.size(); t++) {
        nodes[t].tri_vid = tris[t];
        nodes[t].tri_index = static_cast<int>(t);
    }
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (std::size_t t = 0; t < tris.size(); t++)
        for (int k = 0; k < 3; k++) {
            auto key = std::minmax(tris[t][k], tris[t][(k + 1) % 3]);
            edge_tris[{key.first, key.second}].push_back(static_cast<int>(t));
        }
    for (const auto& [key, owners] : edge_tris) {
        if (owners.size() != 2) continue;
        if (chord_set.count(key)) {
            int chord_no = -1;
            for (std::size_t k = 0; k < chord_idx.size(); k++) {
                auto ck = std::minmax(chord_idx[k].first, chord_idx[k].second);
                if (std::pair<int, int>(ck.first, ck.second) == key) chord_no = static_cast<int>(k);
            }
            Node sub;
            sub.weight = 1;
            sub.chord = chord_no;
            sub.adj = {owners[0], owners[1]};
            int id = static_cast<int>(nodes.size());
            nodes.push_back(sub);
            nodes[owners[0]].adj.push_back(id);
            nodes[owners[1]].adj.push_back(id);
        } else {
            nodes[owners[0]].adj.push_back(owners[1]);
            nodes[owners[1]].adj.push_back(owners[0]);
        }
    }

    // Subtree weights from an arbitrary root, then the weighted centroid.
    int total = static_cast<int>(chords.size());
    std::vector<int> order, parent(nodes.size(), -1), sub(nodes.size(), 0);
    order.reserve(nodes.size());
    order.push_back(0);
    parent[0] = 0;
    for (std::size_t head = 0; head < order.size(); head++) {
        int v = order[head];
        for (int w : nodes[v].adj)
            if (parent[w] < 0) {
                parent[w] = v;
                order.push_back(w);
            }
    }
    if (order.size() != nodes.size())
        throw invariant_error("balanced_cut: dual graph is not connected");
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        sub[*it] += nodes[*it].weight;
        if (*it != 0) sub[parent[*it]] += sub[*it];
    }
    int centroid = -1;
    for (std::size_t v = 0; v < nodes.size(); v++) {
        int worst = total - sub[v];
        for (int w : nodes[v].adj)
            if (parent[w] == static_cast<int>(v) && w != 0) worst = std::max(worst, sub[w]);
        // Root's children are all adj entries.
        if (v == 0) {
            worst = 0;
            for (int w : nodes[v].adj) worst = std::max(worst, sub[w]);
        }
        if (2 * worst <= total) {
            centroid = static_cast<int>(v);
            break;
        }
    }
    if (centroid < 0) throw invariant_error("balanced_cut: no centroid found");

    BalancedCut cut;
    auto finish = [&](const Point2& a, const Point2& b, int valley_chord) {
        cut.a = a;
        cut.b = b;
        cut.valley = valley_chord >= 0 ? chord_ids[valley_chord] : -1;
        for (std::size_t k = 0; k < chords.size(); k++) {
            Point2 mid = (chords[k].first + chords[k].second) * 0.5;
            double side = orient2d(a, b, mid);
            double d = point_segment_distance(mid, a, b);
            if (d <= tol) continue;  // the cut chord itself
            cut.side_count[side > 0.0 ? 0 : 1]++;
        }
        return cut;
    };

    if (nodes[centroid].chord >= 0) {
        int k = nodes[centroid].chord;
        return finish(chords[k].first, chords[k].second, k);
    }

    // Centroid triangle: cut along the edge toward the heaviest component.
    auto comp_weight = [&](int v, int w) {
        // Weight of the component containing w after removing v.
        if (parent[w] == v) return sub[w];
        return total - sub[v];
    };
    int best_edge = -1, best_w = -1, best_neighbor = -1;
    const auto& tri = nodes[centroid].tri_vid;
    for (int w : nodes[centroid].adj) {
        int cw = comp_weight(centroid, w);
        // Identify the shared triangulation edge for this dual neighbor.
        int shared[2] = {-1, -1};
        const Node& nb = nodes[w];
        std::array<int, 3> other = nb.chord >= 0
                                       ? std::array<int, 3>{chord_idx[nb.chord].first,
                                                            chord_idx[nb.chord].second, -1}
                                       : nb.tri_vid;
        int cnt = 0;
        for (int x : tri)
            for (int y : other)
                if (x == y && cnt < 2) {
                    bool dup = cnt == 1 && shared[0] == x;
                    if (!dup) shared[cnt++] = x;
                }
        if (cnt != 2) continue;
        auto key = std::minmax(shared[0], shared[1]);
        int edge_id = key.first * 1000003 + key.second;
        if (cw > best_w || (cw == best_w && edge_id < best_edge)) {
            best_w = cw;
            best_edge = edge_id;
            best_neighbor = w;
        }
    }
    if (best_neighbor < 0) throw invariant_error("balanced_cut: centroid has no usable edge");
    const Node& nb = nodes[best_neighbor];
    int sa, sb;
    if (nb.chord >= 0) {
        sa = chord_idx[nb.chord].first;
        sb = chord_idx[nb.chord].second;
        return finish(pts[sa], pts[sb], nb.chord);
    }
    {
        int shared[2] = {-1, -1};
        int cnt = 0;
        for (int x : tri)
            for (int y : nb.tri_vid)
                if (x == y && cnt < 2) {
                    bool dup = cnt == 1 && shared[0] == x;
                    if (!dup) shared[cnt++] = x;
                }
        if (cnt != 2) throw invariant_error("balanced_cut: malformed dual edge");
        // A plain diagonal; check whether it happens to be a chord too.
        auto key = std::minmax(shared[0], shared[1]);
        int chord_no = -1;
        for (std::size_t k = 0; k < chord_idx.size(); k++) {
            auto ck = std::minmax(chord_idx[k].first, chord_idx[k].second);
            if (ck == key) chord_no = static_cast<int>(k);
        }
        return finish(pts[shared[0]], pts[shared[1]], chord_no);
    }
}

inline BalancedCut balanced_cut(const PipelineContext& ctx, const CellRecord& cell,
                                const std::vector<ExtendedValley>& valleys) {
    std::vector<Point2> ring;
    for (const auto& v : cell.rings[0].verts) ring.push_back(v.p);
    std::vector<std::pair<Point2, Point2>> chords;
    std::vector<int> ids;
    for (const auto& v : valleys) {
        chords.push_back({v.from, v.to});
        ids.push_back(v.motorcycle);
    }
    return balanced_cut_impl(ring, chords, ids, ctx.tol * 10.0);
}

}  // namespace sskel

namespace sskel {

// ---------------------------------------------------------------------------
// Leaf solving and the recursive drivers.
// ---------------------------------------------------------------------------

namespace divide_detail {

inline std::vector<Point3> clip_polyline_to_cell(const CellRecord& cell,
                                                 const std::vector<Point3>& pts, double tol) {
    if (pts.size() < 2) return {};
    std::vector<Point3> out = {pts[0]};
    for (std::size_t s = 0; s + 1 < pts.size(); s++) {
        Point2 p{pts[s].x, pts[s].y};
        Point2 q{pts[s + 1].x, pts[s + 1].y};
        double seg_len = dist(p, q);
        if (seg_len <= tol) continue;
        double best_t = std::numeric_limits<double>::max();
        for (const auto& ring : cell.rings) {
            std::size_t n = ring.verts.size();
            for (std::size_t i = 0; i < n; i++) {
                double t, u;
                if (!segment_intersection_params(p, q, ring.verts[i].p,
                                                 ring.verts[(i + 1) % n].p, t, u))
                    continue;
                if (u < -1e-9 || u > 1.0 + 1e-9) continue;
                if (t > tol / seg_len && t < best_t) best_t = t;
            }
        }
        if (best_t < 1.0 - tol / seg_len) {
            double z = pts[s].z + best_t * (pts[s + 1].z - pts[s].z);
            Point2 hit = p + (q - p) * best_t;
            out.push_back({hit.x, hit.y, z});
            return out;
        }
        out.push_back(pts[s + 1]);
    }
    return out;
}

// Left/right motorcycle-slab tags for a segment running along a track.
inline void valley_side_tags(const PipelineContext& ctx, int motorcycle, const Vec2& seg_dir,
                             int& tag_left, int& tag_right) {
    auto [s1, s2] = ctx.slabs->motorcycle_slabs(motorcycle);
    Vec2 left_normal = seg_dir.perp();
    bool s1_left = (*ctx.slabs)[s1].ray.dot(left_normal) > 0.0;
    tag_left = s1_left ? s1 : s2;
    tag_right = s1_left ? s2 : s1;
}

inline bool slab_strip_contains(const Slab& s, const Point2& p, double tol) {
    return s.contains(p, tol);
}

}  // namespace divide_detail

struct DivideResult {
    std::vector<LeafOutput> leaves;
    RecursionStats stats;
};

class DivideDriver {
public:
    DivideDriver(const PipelineContext& ctx, KP& kp) : ctx_(ctx), kp_(kp) {}

    DivideResult run() {
        process_vertical(0);
        double area = 0.0;
        for (const auto& leaf : result_.leaves) area += kp_.cells[leaf.cell_id].area();
        if (std::fabs(area - kp_.polygon_area) > 1e-6 * std::max(1.0, kp_.polygon_area))
            throw invariant_error("divide: leaves do not cover the polygon");
        return std::move(result_);
    }

private:
    const PipelineContext& ctx_;
    KP& kp_;
    DivideResult result_;

    CellStats& stat_for(int cid, char kind) {
        CellStats s;
        const CellRecord& cell = kp_.cells[cid];
        s.id = cid;
        s.parent = cell.parent;
        s.depth_dv = cell.depth_dv;
        s.depth_dval = cell.depth_dval;
        s.v_size = cell.conflicts.size();
        s.face_list = cell.edge_count();
        s.kind = kind;
        result_.stats.cells.push_back(s);
        result_.stats.max_depth_dv = std::max(result_.stats.max_depth_dv, s.depth_dv);
        result_.stats.max_depth_dval = std::max(result_.stats.max_depth_dval, s.depth_dval);
        return result_.stats.cells.back();
    }

    std::vector<BoundaryPiece> boundary_pieces(const CellRecord& cell) const {
        std::vector<BoundaryPiece> out;
        for (const auto& ring : cell.rings) {
            std::size_t n = ring.verts.size();
            for (std::size_t i = 0; i < n; i++)
                out.push_back({ring.verts[i].p, ring.verts[(i + 1) % n].p, ring.edges[i].tag,
                               ring.edges[i].kind});
        }
        return out;
    }

    bool is_wedge(const CellRecord& cell, const std::vector<int>& slabs) const {
        if (slabs.size() != 2 || cell.rings.size() != 1) return false;
        std::size_t cuts = 0, descents = 0, polys = 0;
        for (const auto& e : cell.rings[0].edges) {
            if (e.kind == EdgeKind::cut) cuts++;
            if (e.kind == EdgeKind::descent) descents++;
            if (e.kind == EdgeKind::polygon) polys++;
        }
        return polys == 0 && cuts == 2 && descents == 4 && cell.rings[0].edges.size() == 6;
    }

    void leaf_empty(int cid) {
        stat_for(cid, 'E');
        LeafOutput leaf;
        leaf.cell_id = cid;
        leaf.boundary = boundary_pieces(kp_.cells[cid]);
        result_.leaves.push_back(std::move(leaf));
    }

    void leaf_wedge(int cid, const std::vector<int>& slabs) {
        stat_for(cid, 'W');
        const CellRecord& cell = kp_.cells[cid];
        LeafOutput leaf;
        leaf.cell_id = cid;
        leaf.boundary = boundary_pieces(cell);

        const Slab& s1 = (*ctx_.slabs)[slabs[0]];
        const Slab& s2 = (*ctx_.slabs)[slabs[1]];
        double da = s1.plane.a - s2.plane.a, db = s1.plane.b - s2.plane.b,
               dc = s1.plane.c - s2.plane.c;
        double nn = std::hypot(da, db);
        if (nn < 1e-12) throw invariant_error("wedge: coplanar slab pair");
        Point2 origin{-da * dc / (nn * nn), -db * dc / (nn * nn)};
        Vec2 dir{-db / nn, da / nn};
        std::vector<Point2> ring;
        for (const auto& v : cell.rings[0].verts) ring.push_back(v.p);
        double t0, t1;
        if (!envelope_detail::clip_line_convex(origin, dir, ring, t0, t1))
            throw invariant_error("wedge: ridge misses the cell");
        Point2 a = origin + dir * t0;
        Point2 b = origin + dir * t1;
        Point2 probe = (a + b) * 0.5 + dir.perp() * (ctx_.tol * 100.0);
        int left = s1.plane.eval(probe) <= s2.plane.eval(probe) ? s1.id : s2.id;
        int right = left == s1.id ? s2.id : s1.id;
        leaf.interior.push_back({a, b, s1.plane.eval(a), s1.plane.eval(b), left, right});
        result_.leaves.push_back(std::move(leaf));
    }

    // Split a patch edge at strip-constraint crossings so each piece can name
    // the exact slab on both sides (coplanar groups carry several slabs).
    void emit_patch_edge(const ConvexPatch& patch, const PatchEdge& e, LeafOutput& leaf) {
        const PatchFace& fl = patch.faces[e.face_l];
        const PatchFace& fr = patch.faces[e.face_r];
        Vec2 d = e.b - e.a;
        double len = d.norm();
        if (len <= ctx_.tol) return;
        Vec2 dn = d / len;
        // Which face is on the left of a->b?
        Point2 probe_left = (e.a + e.b) * 0.5 + dn.perp() * (ctx_.tol * 100.0);
        bool fl_left = point_in_convex(fl.poly, probe_left);
        const PatchFace& left_face = fl_left ? fl : fr;
        const PatchFace& right_face = fl_left ? fr : fl;

        std::vector<double> cuts = {0.0, len};
        auto add_constraint_cuts = [&](const PatchFace& f) {
            if (f.slab_ids.size() < 2) return;
            for (int sid : f.slab_ids) {
                const Slab& s = (*ctx_.slabs)[sid];
                // Constraint lines: along = 0, along = L, side = 0.
                Vec2 bd = (s.base_b - s.base_a) / s.base_len;
                struct L {
                    Point2 o;
                    Vec2 n;
                };
                std::array<L, 3> lines = {{{s.base_a, bd}, {s.base_b, bd}, {s.base_a, s.ray}}};
                for (const auto& ln : lines) {
                    // Points with (p - o) . n = 0 along the edge param t.
                    double f0 = (e.a - ln.o).dot(ln.n);
                    double f1 = (e.b - ln.o).dot(ln.n);
                    if ((f0 > 0) == (f1 > 0)) continue;
                    double t = f0 / (f0 - f1) * len;
                    if (t > ctx_.tol && t < len - ctx_.tol) cuts.push_back(t);
                }
            }
        };
        add_constraint_cuts(left_face);
        add_constraint_cuts(right_face);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [&](double a, double b) { return b - a <= ctx_.tol; }),
                   cuts.end());

        auto pick_slab = [&](const PatchFace& f, const Point2& mid) {
            if (f.slab_ids.size() == 1) return f.slab_ids[0];
            for (int sid : f.slab_ids)
                if ((*ctx_.slabs)[sid].contains(mid, ctx_.tol * 100.0)) return sid;
            return f.slab_ids[0];
        };
        for (std::size_t k = 0; k + 1 < cuts.size(); k++) {
            Point2 a = e.a + dn * cuts[k];
            Point2 b = e.a + dn * cuts[k + 1];
            Point2 mid = (a + b) * 0.5;
            int sl = pick_slab(left_face, mid);
            int sr = pick_slab(right_face, mid);
            leaf.interior.push_back({a, b, left_face.plane.eval(a), left_face.plane.eval(b),
                                     sl, sr});
        }
    }

    static bool point_in_convex(const std::vector<Point2>& poly, const Point2& p) {
        std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; i++) {
            const Point2& a = poly[i];
            const Point2& b = poly[(i + 1) % n];
            if ((b - a).cross(p - a) < -1e-12 * (1.0 + dist(a, b))) return false;
        }
        return true;
    }

    // Flat edges inside a coplanar face: boundaries between the strips of its
    // slabs. Adjacent strips share one of their side-ray or base lines; a
    // probe on each side identifies the separating line and the orientation.
    void emit_flat_edges(const PatchFace& face, LeafOutput& leaf) {
        if (face.slab_ids.size() < 2) return;
        for (std::size_t i = 0; i < face.slab_ids.size(); i++) {
            for (std::size_t j = i + 1; j < face.slab_ids.size(); j++) {
                const Slab& si = (*ctx_.slabs)[face.slab_ids[i]];
                const Slab& sj = (*ctx_.slabs)[face.slab_ids[j]];
                struct L {
                    Point2 o;
                    Vec2 d;
                };
                std::vector<L> lines;
                auto push_boundary_lines = [&](const Slab& s) {
                    lines.push_back({s.base_a, s.ray});
                    lines.push_back({s.base_b, s.ray});
                    lines.push_back({s.base_a, (s.base_b - s.base_a) / s.base_len});
                };
                push_boundary_lines(si);
                push_boundary_lines(sj);
                for (const auto& ln : lines) {
                    double t0, t1;
                    if (!envelope_detail::clip_line_convex(ln.o, ln.d, face.poly, t0, t1))
                        continue;
                    if (t1 - t0 <= ctx_.tol * 10.0) continue;
                    Point2 a = ln.o + ln.d * t0;
                    Point2 b = ln.o + ln.d * t1;
                    Point2 mid = (a + b) * 0.5;
                    Vec2 off = ln.d.perp() * (ctx_.tol * 1000.0);
                    bool si_left = si.contains(mid + off, ctx_.tol) &&
                                   !si.contains(mid - off, ctx_.tol);
                    bool sj_right = sj.contains(mid - off, ctx_.tol) &&
                                    !sj.contains(mid + off, ctx_.tol);
                    bool si_right = si.contains(mid - off, ctx_.tol) &&
                                    !si.contains(mid + off, ctx_.tol);
                    bool sj_left = sj.contains(mid + off, ctx_.tol) &&
                                   !sj.contains(mid - off, ctx_.tol);
                    if (si_left && sj_right) {
                        leaf.interior.push_back({a, b, face.plane.eval(a), face.plane.eval(b),
                                                 si.id, sj.id});
                    } else if (si_right && sj_left) {
                        leaf.interior.push_back({a, b, face.plane.eval(a), face.plane.eval(b),
                                                 sj.id, si.id});
                    } else {
                        continue;
                    }
                    break;  // one separating line per strip pair
                }
            }
        }
    }

    void leaf_convex(int cid) {
        CellStats& st = stat_for(cid, 'C');
        st.r_size = 0;
        const CellRecord& cell = kp_.cells[cid];
        if (cell.rings.size() != 1)
            throw invariant_error("convex leaf has holes");
        LeafOutput leaf;
        leaf.cell_id = cid;
        leaf.boundary = boundary_pieces(cell);

        std::vector<Point2> ring;
        for (const auto& v : cell.rings[0].verts) ring.push_back(v.p);
        auto slab_ids = collect_slabs(ctx_, cell);
        std::vector<std::pair<Plane, int>> planes;
        for (int id : slab_ids) planes.push_back({(*ctx_.slabs)[id].plane, id});
        result_.stats.note_envelope(planes.size());
        ConvexPatch patch = envelope_planes(planes, ring);
        for (const auto& e : patch.edges) emit_patch_edge(patch, e, leaf);
        for (const auto& f : patch.faces) emit_flat_edges(f, leaf);
        result_.leaves.push_back(std::move(leaf));
    }

    std::vector<int> do_cut(int cid, const CutLine& line,
                            const std::vector<std::pair<double, double>>& segs,
                            int cut_valley) {
        const CellRecord& cell = kp_.cells[cid];
        double tol = ctx_.tol * 10.0;

        double wlo = std::numeric_limits<double>::max(), whi = -wlo;
        for (const auto& ring : cell.rings)
            for (const auto& v : ring.verts) {
                double t = line.param_of(v.p);
                wlo = std::min(wlo, t);
                whi = std::max(whi, t);
            }
        double pad = 0.01 * (whi - wlo) + 100.0 * ctx_.tol;
        std::size_t m = 0;
        EnvelopeChain chain = lift_cut_line(ctx_, cell, line, wlo - pad, whi + pad, &m);
        result_.stats.note_envelope(m);

        int valley_s1 = -1, valley_s2 = -1;
        if (cut_valley >= 0) {
            auto [a, b] = ctx_.slabs->motorcycle_slabs(cut_valley);
            valley_s1 = a;
            valley_s2 = b;
        }

        std::vector<NewEdge> new_edges;
        for (auto [sa, sb] : segs) {
            // Interior chain breakpoints within this cut segment.
            std::vector<std::pair<double, std::pair<int, int>>> bps;  // t -> (left,right labels)
            for (std::size_t k = 0; k + 1 < chain.intervals.size(); k++) {
                double t = chain.intervals[k].t1;
                if (t <= sa + tol || t >= sb - tol) continue;
                if (std::fabs(chain.intervals[k + 1].t0 - t) > tol) continue;  // gap
                if (chain.intervals[k].id == chain.intervals[k + 1].id) continue;
                bps.push_back({t, {chain.intervals[k].id, chain.intervals[k + 1].id}});
            }
            std::vector<double> stops = {sa, sb};
            for (const auto& [t, lr] : bps) stops.push_back(t);
            std::sort(stops.begin(), stops.end());
            // Cut sub-segments with single-face tags (or valley-run tags when
            // the cut runs along an extended valley).
            for (std::size_t k = 0; k + 1 < stops.size(); k++) {
                double mid = 0.5 * (stops[k] + stops[k + 1]);
                int label = chain.label_at(mid);
                if (label < 0)
                    throw invariant_error("lifted cut has a gap inside the cell");
                NewEdge ne;
                ne.a = line.at(stops[k]);
                ne.b = line.at(stops[k + 1]);
                ne.kind = EdgeKind::cut;
                if (cut_valley >= 0 && (label == valley_s1 || label == valley_s2)) {
                    divide_detail::valley_side_tags(ctx_, cut_valley, line.dir, ne.tag_left,
                                                    ne.tag_right);
                    ne.on_track = cut_valley;
                    ne.a_track = cut_valley;
                    ne.b_track = cut_valley;
                } else {
                    ne.tag_left = label;
                    ne.tag_right = label;
                }
                new_edges.push_back(ne);
            }
            // Descent paths from each breakpoint.
            for (const auto& [t, lr] : bps) {
                Point2 p = line.at(t);
                double z = chain.value_at(t - tol);
                std::vector<std::vector<Point3>> traced;
                for (int slab_id : {lr.first, lr.second}) {
                    const Slab& slab = (*ctx_.slabs)[slab_id];
                    DescentPath path = trace_descent(ctx_, p, z, slab);
                    if (path.pts.size() < 2) continue;
                    auto clipped = divide_detail::clip_polyline_to_cell(cell, path.pts, tol);
                    if (clipped.size() < 2) continue;
                    bool dup = false;
                    for (const auto& other : traced) {
                        if (other.size() != clipped.size()) continue;
                        bool same = true;
                        for (std::size_t q = 0; q < other.size(); q++)
                            if (std::fabs(other[q].x - clipped[q].x) > tol ||
                                std::fabs(other[q].y - clipped[q].y) > tol)
                                same = false;
                        if (same) dup = true;
                    }
                    if (dup) continue;
                    traced.push_back(clipped);
                    for (std::size_t s = 0; s + 1 < clipped.size(); s++) {
                        NewEdge ne;
                        ne.a = {clipped[s].x, clipped[s].y};
                        ne.b = {clipped[s + 1].x, clipped[s + 1].y};
                        ne.kind = EdgeKind::descent;
                        // A leg running along the track is a valley run.
                        bool valley_leg =
                            slab.kind == SlabKind::motorcycle &&
                            point_segment_distance(ne.a, slab.base_a, slab.base_b) <= tol &&
                            point_segment_distance(ne.b, slab.base_a, slab.base_b) <= tol;
                        if (valley_leg) {
                            Vec2 d = (ne.b - ne.a).normalized();
                            divide_detail::valley_side_tags(ctx_, slab.source_motorcycle, d,
                                                            ne.tag_left, ne.tag_right);
                            ne.on_track = slab.source_motorcycle;
                            ne.a_track = slab.source_motorcycle;
                            ne.b_track = slab.source_motorcycle;
                        } else {
                            ne.tag_left = slab.id;
                            ne.tag_right = slab.id;
                            if (slab.kind == SlabKind::motorcycle &&
                                point_segment_distance(ne.b, slab.base_a, slab.base_b) <= tol)
                                ne.b_track = slab.source_motorcycle;
                        }
                        new_edges.push_back(ne);
                    }
                }
            }
        }
        return split_cell(ctx_, kp_, cid, new_edges);
    }

    void process_vertical(int cid) {
        auto slabs = collect_slabs(ctx_, kp_.cells[cid]);
        if (slabs.size() <= 1) {
            leaf_empty(cid);
            return;
        }
        if (is_wedge(kp_.cells[cid], slabs)) {
            leaf_wedge(cid, slabs);
            return;
        }
        while (true) {
            CellRecord& cell = kp_.cells[cid];
            if (cell.conflicts.empty()) {
                process_valley(cid);
                return;
            }
            // Median conflict vertex by (x, y, id).
            std::vector<int> order = cell.conflicts;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const Point2& pa = ctx_.graph->vertices[a].p;
                const Point2& pb = ctx_.graph->vertices[b].p;
                if (pa.x != pb.x) return pa.x < pb.x;
                if (pa.y != pb.y) return pa.y < pb.y;
                return a < b;
            });
            int median = order[(order.size() - 1) / 2];
            CutLine line = vertical_line_through(ctx_.graph->vertices[median].p);
            auto segs = cut_segments(cell, line, ctx_.tol * 10.0);
            if (segs.empty()) {
                // The vertex already sits on this cell's boundary; it cannot
                // be resolved by a cut and no longer conflicts.
                auto& cf = kp_.cells[cid].conflicts;
                cf.erase(std::find(cf.begin(), cf.end(), median));
                continue;
            }
            stat_for(cid, 'V');
            auto children = do_cut(cid, line, segs, -1);
            for (int ch : children) kp_.cells[ch].depth_dv++;
            for (int ch : children) process_vertical(ch);
            return;
        }
    }

    void process_valley(int cid) {
        auto valleys = conflicting_valleys(ctx_, kp_.cells[cid]);
        if (valleys.empty()) {
            leaf_convex(cid);
            return;
        }
        auto ext = extend_valleys(ctx_, kp_.cells[cid], valleys);
        BalancedCut cut = balanced_cut(ctx_, kp_.cells[cid], ext);
        std::size_t worst = std::max(cut.side_count[0], cut.side_count[1]);
        if (3 * worst > 2 * valleys.size())
            throw invariant_error("balanced cut exceeds the two-thirds bound");
        CellStats& st = stat_for(cid, 'B');
        st.r_size = valleys.size();

        Vec2 d = cut.b - cut.a;
        double len = d.norm();
        CutLine line{cut.a, d / len};
        auto children = do_cut(cid, line, {{0.0, len}}, cut.valley);
        for (int ch : children) kp_.cells[ch].depth_dval++;
        for (int ch : children) process_valley(ch);
    }
};

inline DivideResult run_divide(const PipelineContext& ctx, KP& kp) {
    DivideDriver driver(ctx, kp);
    return driver.run();
}

}  // namespace sskel
