#pragma once

// Merge per-leaf fragments into the full skeleton S' (one face per slab,
// flat edges included), derive S by removing flat edges, and slice the
// terrain into offset polygons.

#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "sskel/compare.hpp"
#include "sskel/divide.hpp"

namespace sskel {

enum class SkelLabel { ridge, valley, flat, boundary };

inline const char* label_name(SkelLabel l) {
    switch (l) {
        case SkelLabel::ridge: return "ridge";
        case SkelLabel::valley: return "valley";
        case SkelLabel::flat: return "flat";
        case SkelLabel::boundary: return "boundary";
    }
    return "?";
}

struct SkeletonVertex {
    Point2 p;
    double z = 0.0;
};

struct SkeletonEdge {
    int a = -1, b = -1;
    SkelLabel label = SkelLabel::ridge;
    int face_l = -1, face_r = -1;  // slab ids in S'; merged representatives in S
};

struct Skeleton {
    std::vector<SkeletonVertex> vertices;
    std::vector<SkeletonEdge> edges;
    bool flats_stripped = false;

    std::set<int> face_ids() const {
        std::set<int> ids;
        for (const auto& e : edges) {
            if (e.face_l >= 0) ids.insert(e.face_l);
            if (e.face_r >= 0) ids.insert(e.face_r);
        }
        return ids;
    }

    std::vector<SkeletonEdgeView> edge_views(bool interior_only = true) const {
        std::vector<SkeletonEdgeView> out;
        for (const auto& e : edges) {
            if (interior_only && e.label == SkelLabel::boundary) continue;
            out.push_back({vertices[e.a].p, vertices[e.b].p, vertices[e.a].z,
                           vertices[e.b].z});
        }
        return out;
    }
};

namespace assembly_detail {

struct Entry {
    int va, vb;
    bool interior;
    int tag_l, tag_r;  // interior: both sides; boundary piece: tag_l only
    EdgeKind kind;
};

inline bool planes_equal(const Plane& a, const Plane& b, double scale) {
    return std::fabs(a.a - b.a) <= 1e-9 && std::fabs(a.b - b.b) <= 1e-9 &&
           std::fabs(a.c - b.c) <= 1e-9 * scale;
}

}  // namespace assembly_detail

inline Skeleton assemble(const PipelineContext& ctx, const std::vector<LeafOutput>& leaves) {
    using namespace assembly_detail;
    double tol = ctx.tol * 10.0;

    // Pool all endpoints, then split every piece at pool vertices on it.
    split_detail::Pool pool(tol, ctx.scale);
    std::vector<Entry> raw;
    for (const auto& leaf : leaves) {
        for (const auto& f : leaf.interior) {
            int va = pool.find_or_add(f.a);
            int vb = pool.find_or_add(f.b);
            if (va != vb) raw.push_back({va, vb, true, f.slab_l, f.slab_r, EdgeKind::descent});
        }
        for (const auto& b : leaf.boundary) {
            int va = pool.find_or_add(b.a);
            int vb = pool.find_or_add(b.b);
            if (va != vb) raw.push_back({va, vb, false, b.tag, -1, b.kind});
        }
    }

    struct Resolved {
        bool have_interior = false;
        int int_l = -1, int_r = -1;  // for canonical direction lo->hi
        std::vector<std::pair<int, bool>> side_tags;  // (tag, runs lo->hi)
        bool polygon_kind = false;
    };
    std::map<std::pair<int, int>, Resolved> pieces;

    for (const auto& e : raw) {
        const Point2& A = pool.verts[e.va].p;
        const Point2& B = pool.verts[e.vb].p;
        double len = dist(A, B);
        std::vector<std::pair<double, int>> stops{{0.0, e.va}, {1.0, e.vb}};
        pool.grid.near_segment_candidates(A, B, [&](int iv) {
            if (iv == e.va || iv == e.vb) return;
            const Point2& q = pool.verts[iv].p;
            if (point_segment_distance(q, A, B) > tol) return;
            double t = (q - A).dot(B - A) / (len * len);
            if (t <= tol / len || t >= 1.0 - tol / len) return;
            stops.push_back({t, iv});
        });
        std::sort(stops.begin(), stops.end());
        for (std::size_t k = 0; k + 1 < stops.size(); k++) {
            int va = stops[k].second, vb = stops[k + 1].second;
            if (va == vb) continue;
            bool forward = va < vb;
            auto key = std::minmax(va, vb);
            Resolved& r = pieces[{key.first, key.second}];
            if (e.interior) {
                r.have_interior = true;
                r.int_l = forward ? e.tag_l : e.tag_r;
                r.int_r = forward ? e.tag_r : e.tag_l;
            } else {
                r.side_tags.push_back({e.tag_l, forward});
                if (e.kind == EdgeKind::polygon) r.polygon_kind = true;
            }
        }
    }

    // Vertex heights, checked for consistency across every contributing slab.
    Skeleton skel;
    std::vector<int> vertex_map(pool.verts.size(), -1);
    std::vector<double> vz(pool.verts.size(), std::numeric_limits<double>::quiet_NaN());
    auto note_height = [&](int v, double z) {
        if (std::isnan(vz[v])) {
            vz[v] = z;
            return;
        }
        if (std::fabs(vz[v] - z) > 1e-6 * std::max(1.0, ctx.scale))
            throw invariant_error("assemble: height mismatch across a shared boundary");
    };

    for (auto& [key, r] : pieces) {
        auto [va, vb] = key;
        int slab_l = -1, slab_r = -1;
        SkelLabel label;
        if (r.have_interior) {
            slab_l = r.int_l;
            slab_r = r.int_r;
            const Slab& sl = (*ctx.slabs)[slab_l];
            const Slab& sr = (*ctx.slabs)[slab_r];
            if (planes_equal(sl.plane, sr.plane, ctx.scale))
                label = SkelLabel::flat;
            else if (sl.kind == SlabKind::motorcycle && sr.kind == SlabKind::motorcycle &&
                     sl.source_motorcycle == sr.source_motorcycle)
                label = SkelLabel::valley;
            else
                label = SkelLabel::ridge;
        } else if (r.side_tags.size() == 1) {
            if (!r.polygon_kind) {
                // Only hairline leftovers from tolerance splitting may be
                // single-covered; anything longer means a missing neighbor.
                double len = dist(pool.verts[va].p, pool.verts[vb].p);
                if (len > 200.0 * tol)
                    throw invariant_error("assemble: interior boundary covered once");
                continue;
            }
            slab_l = r.side_tags[0].first;
            label = SkelLabel::boundary;
        } else if (r.side_tags.size() == 2) {
            int t0 = r.side_tags[0].first;
            int t1 = r.side_tags[1].first;
            if (t0 == t1) continue;  // cut or descent inside one face of S'
            bool fwd0 = r.side_tags[0].second;
            slab_l = fwd0 ? t0 : t1;
            slab_r = fwd0 ? t1 : t0;
            if (r.side_tags[0].second == r.side_tags[1].second)
                throw invariant_error("assemble: boundary piece orientations disagree");
            const Slab& sl = (*ctx.slabs)[slab_l];
            const Slab& sr = (*ctx.slabs)[slab_r];
            if (planes_equal(sl.plane, sr.plane, ctx.scale))
                label = SkelLabel::flat;
            else if (sl.kind == SlabKind::motorcycle && sr.kind == SlabKind::motorcycle &&
                     sl.source_motorcycle == sr.source_motorcycle)
                label = SkelLabel::valley;
            else
                label = SkelLabel::ridge;
        } else {
            throw invariant_error("assemble: boundary piece covered more than twice");
        }

        // Heights from the supporting planes.
        const Plane& pl = (*ctx.slabs)[slab_l].plane;
        double za = pl.eval(pool.verts[va].p);
        double zb = pl.eval(pool.verts[vb].p);
        if (slab_r >= 0) {
            const Plane& pr = (*ctx.slabs)[slab_r].plane;
            if (std::fabs(pr.eval(pool.verts[va].p) - za) > 1e-6 * std::max(1.0, ctx.scale))
                throw invariant_error("assemble: height mismatch across a shared boundary");
        }
        note_height(va, za);
        note_height(vb, zb);

        auto emit_vertex = [&](int v) {
            if (vertex_map[v] < 0) {
                vertex_map[v] = static_cast<int>(skel.vertices.size());
                skel.vertices.push_back({pool.verts[v].p, vz[v]});
            }
            return vertex_map[v];
        };
        SkeletonEdge edge;
        edge.a = emit_vertex(va);
        edge.b = emit_vertex(vb);
        edge.label = label;
        edge.face_l = slab_l;
        edge.face_r = slab_r;
        skel.edges.push_back(edge);
    }

    return skel;
}

// Concatenate collinear chains: remove degree-2 vertices whose two incident
// edges carry the same label and face pair and are collinear.
inline void concatenate_collinear(Skeleton& skel, double tol) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::vector<int>> incident(skel.vertices.size());
        for (std::size_t e = 0; e < skel.edges.size(); e++) {
            incident[skel.edges[e].a].push_back(static_cast<int>(e));
            incident[skel.edges[e].b].push_back(static_cast<int>(e));
        }
        for (std::size_t v = 0; v < skel.vertices.size(); v++) {
            if (incident[v].size() != 2) continue;
            SkeletonEdge& e1 = skel.edges[incident[v][0]];
            SkeletonEdge& e2 = skel.edges[incident[v][1]];
            if (e1.label != e2.label) continue;
            auto k1 = std::minmax(e1.face_l, e1.face_r);
            auto k2 = std::minmax(e2.face_l, e2.face_r);
            if (k1 != k2) continue;
            int o1 = e1.a == static_cast<int>(v) ? e1.b : e1.a;
            int o2 = e2.a == static_cast<int>(v) ? e2.b : e2.a;
            if (o1 == o2) continue;
            double area = std::fabs(orient2d(skel.vertices[o1].p, skel.vertices[v].p,
                                             skel.vertices[o2].p));
            double span = dist(skel.vertices[o1].p, skel.vertices[o2].p);
            if (area > tol * span) continue;
            // Oriented face sides must continue across v.
            int need_l, need_r;
            if (e1.a == static_cast<int>(v)) {
                // Merged edge keeps e1's direction (v->o1) extended to o2->o1;
                // e2 oriented o2->v must carry the same sides.
                bool e2_fwd = e2.a == o2;
                need_l = e2_fwd ? e2.face_l : e2.face_r;
                need_r = e2_fwd ? e2.face_r : e2.face_l;
                if (need_l != e1.face_l || need_r != e1.face_r) continue;
                e1.a = o2;
            } else {
                bool e2_fwd = e2.a == static_cast<int>(v);
                need_l = e2_fwd ? e2.face_l : e2.face_r;
                need_r = e2_fwd ? e2.face_r : e2.face_l;
                if (need_l != e1.face_l || need_r != e1.face_r) continue;
                e1.b = o2;
            }
            skel.edges[incident[v][1]] = skel.edges.back();
            skel.edges.pop_back();
            changed = true;
            break;
        }
    }
    // Drop unreferenced vertices.
    std::vector<int> remap(skel.vertices.size(), -1);
    Skeleton out;
    out.flats_stripped = skel.flats_stripped;
    for (auto& e : skel.edges) {
        for (int* v : {&e.a, &e.b}) {
            if (remap[*v] < 0) {
                remap[*v] = static_cast<int>(out.vertices.size());
                out.vertices.push_back(skel.vertices[*v]);
            }
            *v = remap[*v];
        }
        out.edges.push_back(e);
    }
    skel = std::move(out);
}

// Remove flat edges and merge the faces they separate.
inline Skeleton strip_flat_edges(const Skeleton& sprime, double tol) {
    // Union-find over face ids.
    std::map<int, int> up;
    std::function<int(int)> find = [&](int x) {
        auto it = up.find(x);
        if (it == up.end() || it->second == x) {
            up[x] = x;
            return x;
        }
        return up[x] = find(it->second);
    };
    for (const auto& e : sprime.edges)
        if (e.label == SkelLabel::flat) {
            int ra = find(e.face_l);
            int rb = find(e.face_r);
            if (ra != rb) up[std::max(ra, rb)] = std::min(ra, rb);
        }
    Skeleton out;
    out.vertices = sprime.vertices;
    out.flats_stripped = true;
    for (const auto& e : sprime.edges) {
        if (e.label == SkelLabel::flat) continue;
        SkeletonEdge ne = e;
        if (ne.face_l >= 0) ne.face_l = find(ne.face_l);
        if (ne.face_r >= 0) ne.face_r = find(ne.face_r);
        out.edges.push_back(ne);
    }
    concatenate_collinear(out, tol);
    return out;
}

// ---------------------------------------------------------------------------
// Offset polygons: level sets of the terrain.
// ---------------------------------------------------------------------------

// Face loops of S' (slab id -> closed polygon), chained from the edge soup.
inline std::map<int, std::vector<Point2>> face_loops(const Skeleton& sprime) {
    std::map<int, std::vector<std::pair<Point2, Point2>>> segs;
    for (const auto& e : sprime.edges) {
        Point2 a = sprime.vertices[e.a].p;
        Point2 b = sprime.vertices[e.b].p;
        if (e.face_l >= 0) segs[e.face_l].push_back({a, b});
        if (e.face_r >= 0) segs[e.face_r].push_back({b, a});
    }
    std::map<int, std::vector<Point2>> loops;
    for (auto& [face, pieces] : segs) {
        std::vector<bool> used(pieces.size(), false);
        std::vector<Point2> loop = {pieces[0].first, pieces[0].second};
        used[0] = true;
        for (std::size_t k = 1; k < pieces.size(); k++) {
            bool advanced = false;
            for (std::size_t i = 0; i < pieces.size(); i++) {
                if (used[i]) continue;
                double d1 = dist(pieces[i].first, loop.back());
                double d2 = dist(pieces[i].second, loop.back());
                if (std::min(d1, d2) > 1e-7) continue;
                loop.push_back(d1 < d2 ? pieces[i].second : pieces[i].first);
                used[i] = true;
                advanced = true;
                break;
            }
            if (!advanced) break;
        }
        if (!loop.empty() && dist(loop.front(), loop.back()) <= 1e-7) loop.pop_back();
        loops[face] = std::move(loop);
    }
    return loops;
}

// Cross-section of the terrain at height t, as closed loops.
inline std::vector<std::vector<Point2>> offset_polygon(const PipelineContext& ctx,
                                                       const Skeleton& sprime, double t) {
    if (t < 0.0) throw invariant_error("offset_polygon: negative offset");
    auto loops = face_loops(sprime);
    struct Seg {
        Point2 a, b;
        bool used = false;
    };
    std::vector<Seg> segs;
    for (const auto& [face, loop] : loops) {
        if (loop.size() < 3) continue;
        const Plane& pl = (*ctx.slabs)[face].plane;
        // Intersection points of the level line with the face boundary.
        std::vector<double> params;
        Vec2 g = pl.gradient();
        Vec2 d{g.y, -g.x};  // ascent on the left
        Point2 origin = loop[0] + g * (t - pl.eval(loop[0]));
        for (std::size_t i = 0; i < loop.size(); i++) {
            const Point2& A = loop[i];
            const Point2& B = loop[(i + 1) % loop.size()];
            double fa = pl.eval(A) - t;
            double fb = pl.eval(B) - t;
            if ((fa > 0) == (fb > 0)) continue;
            Point2 x = A + (B - A) * (fa / (fa - fb));
            params.push_back((x - origin).dot(d));
        }
        std::sort(params.begin(), params.end());
        for (std::size_t k = 0; k + 1 < params.size(); k += 2) {
            Point2 a = origin + d * params[k];
            Point2 b = origin + d * params[k + 1];
            if (dist(a, b) > ctx.tol * 10.0) segs.push_back({a, b, false});
        }
    }
    // Chain segments into loops.
    std::vector<std::vector<Point2>> out;
    double snap = std::max(ctx.tol * 100.0, 1e-7 * ctx.scale);
    for (std::size_t s0 = 0; s0 < segs.size(); s0++) {
        if (segs[s0].used) continue;
        segs[s0].used = true;
        std::vector<Point2> loop = {segs[s0].a, segs[s0].b};
        bool closed = false;
        while (!closed) {
            bool advanced = false;
            for (auto& s : segs) {
                if (s.used) continue;
                if (dist(s.a, loop.back()) <= snap) {
                    loop.push_back(s.b);
                    s.used = true;
                    advanced = true;
                } else if (dist(s.b, loop.back()) <= snap) {
                    loop.push_back(s.a);
                    s.used = true;
                    advanced = true;
                }
                if (advanced) break;
            }
            if (dist(loop.front(), loop.back()) <= snap && loop.size() > 2) {
                loop.pop_back();
                closed = true;
            } else if (!advanced) {
                break;
            }
        }
        if (closed && loop.size() >= 3) out.push_back(std::move(loop));
    }
    return out;
}

}  // namespace sskel
