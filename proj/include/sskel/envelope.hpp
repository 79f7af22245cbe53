#pragma once

// The two lower-envelope kernels. Segments in a vertical plane are merged
// divide-and-conquer style; planes over a convex cell go through projective
// duality to a 3D upper hull, with pairwise clipping as the fallback for
// small or degenerate inputs (all duals coplanar, e.g. regular polygons).

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "sskel/geom.hpp"

namespace sskel {

// ---------------------------------------------------------------------------
// Lower envelope of line segments over a 1D parameter.
// ---------------------------------------------------------------------------

struct EnvSegment {
    double t0 = 0.0, t1 = 0.0;
    double z0 = 0.0, z1 = 0.0;
    int id = -1;

    double z_at(double t) const {
        if (t1 == t0) return z0;
        double u = (t - t0) / (t1 - t0);
        return z0 + u * (z1 - z0);
    }
};

struct ChainInterval {
    double t0 = 0.0, t1 = 0.0;
    double z0 = 0.0, z1 = 0.0;
    int id = -1;

    double z_at(double t) const {
        if (t1 == t0) return z0;
        double u = (t - t0) / (t1 - t0);
        return z0 + u * (z1 - z0);
    }
};

struct EnvelopeChain {
    std::vector<ChainInterval> intervals;  // disjoint, increasing in t

    bool empty() const { return intervals.empty(); }

    static constexpr double kNone = std::numeric_limits<double>::max();

    double value_at(double t) const {
        for (const auto& iv : intervals)
            if (t >= iv.t0 - 1e-12 && t <= iv.t1 + 1e-12) return iv.z_at(t);
        return kNone;
    }

    int label_at(double t) const {
        for (const auto& iv : intervals)
            if (t >= iv.t0 - 1e-12 && t <= iv.t1 + 1e-12) return iv.id;
        return -1;
    }
};

namespace envelope_detail {

inline void append_interval(std::vector<ChainInterval>& out, const ChainInterval& iv,
                            double eps_t, double eps_z) {
    if (iv.t1 - iv.t0 <= eps_t) {
        if (!out.empty() && iv.t1 > out.back().t1) out.back().t1 = iv.t1;
        return;
    }
    if (!out.empty()) {
        ChainInterval& prev = out.back();
        if (prev.id == iv.id && std::fabs(prev.t1 - iv.t0) <= eps_t &&
            std::fabs(prev.z1 - iv.z0) <= eps_z) {
            prev.t1 = iv.t1;
            prev.z1 = iv.z1;
            return;
        }
    }
    out.push_back(iv);
}

inline EnvelopeChain merge_chains(const EnvelopeChain& A, const EnvelopeChain& B,
                                  double eps_t, double eps_z) {
    if (A.empty()) return B;
    if (B.empty()) return A;

    std::vector<double> cuts;
    for (const auto& iv : A.intervals) {
        cuts.push_back(iv.t0);
        cuts.push_back(iv.t1);
    }
    for (const auto& iv : B.intervals) {
        cuts.push_back(iv.t0);
        cuts.push_back(iv.t1);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [&](double a, double b) { return b - a <= eps_t; }),
               cuts.end());

    std::vector<ChainInterval> out;
    std::size_t ia = 0, ib = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); k++) {
        double u = cuts[k], v = cuts[k + 1];
        double mid = 0.5 * (u + v);
        while (ia < A.intervals.size() && A.intervals[ia].t1 < mid - eps_t) ia++;
        while (ib < B.intervals.size() && B.intervals[ib].t1 < mid - eps_t) ib++;
        const ChainInterval* a = nullptr;
        const ChainInterval* b = nullptr;
        if (ia < A.intervals.size() && A.intervals[ia].t0 <= mid && mid <= A.intervals[ia].t1)
            a = &A.intervals[ia];
        if (ib < B.intervals.size() && B.intervals[ib].t0 <= mid && mid <= B.intervals[ib].t1)
            b = &B.intervals[ib];
        if (!a && !b) continue;
        if (a && !b) {
            append_interval(out, {u, v, a->z_at(u), a->z_at(v), a->id}, eps_t, eps_z);
            continue;
        }
        if (b && !a) {
            append_interval(out, {u, v, b->z_at(u), b->z_at(v), b->id}, eps_t, eps_z);
            continue;
        }
        double du = a->z_at(u) - b->z_at(u);
        double dv = a->z_at(v) - b->z_at(v);
        auto emit = [&](double x0, double x1, const ChainInterval* w) {
            append_interval(out, {x0, x1, w->z_at(x0), w->z_at(x1), w->id}, eps_t, eps_z);
        };
        bool zu = std::fabs(du) <= eps_z, zv = std::fabs(dv) <= eps_z;
        if ((zu || du < 0.0) && (zv || dv < 0.0)) {
            // Ties go to the smaller id so collinear handoffs are stable.
            if (zu && zv && b->id < a->id)
                emit(u, v, b);
            else
                emit(u, v, a);
        } else if ((zu || du > 0.0) && (zv || dv > 0.0)) {
            if (zu && zv && a->id < b->id)
                emit(u, v, a);
            else
                emit(u, v, b);
        } else {
            double x = u + (v - u) * du / (du - dv);
            if (du < 0.0) {
                emit(u, x, a);
                emit(x, v, b);
            } else {
                emit(u, x, b);
                emit(x, v, a);
            }
        }
    }
    EnvelopeChain m;
    m.intervals = std::move(out);
    return m;
}

inline EnvelopeChain envelope_rec(std::vector<EnvSegment>& segs, std::size_t lo,
                                  std::size_t hi, double eps_t, double eps_z) {
    if (lo >= hi) return {};
    if (hi - lo == 1) {
        EnvelopeChain c;
        const EnvSegment& s = segs[lo];
        if (s.t1 - s.t0 > eps_t) c.intervals.push_back({s.t0, s.t1, s.z0, s.z1, s.id});
        return c;
    }
    std::size_t mid = lo + (hi - lo) / 2;
    EnvelopeChain a = envelope_rec(segs, lo, mid, eps_t, eps_z);
    EnvelopeChain b = envelope_rec(segs, mid, hi, eps_t, eps_z);
    return merge_chains(a, b, eps_t, eps_z);
}

}  // namespace envelope_detail

inline EnvelopeChain envelope_segments(std::vector<EnvSegment> segs) {
    if (segs.empty()) return {};
    double span = 0.0, zspan = 1.0;
    for (const auto& s : segs) {
        span = std::max({span, std::fabs(s.t0), std::fabs(s.t1)});
        zspan = std::max({zspan, std::fabs(s.z0), std::fabs(s.z1)});
    }
    double eps_t = epsilon() * std::max(1.0, span);
    double eps_z = epsilon() * zspan;
    return envelope_detail::envelope_rec(segs, 0, segs.size(), eps_t, eps_z);
}

// ---------------------------------------------------------------------------
// Lower envelope of planes over a convex cell.
// ---------------------------------------------------------------------------

struct PatchFace {
    std::vector<int> slab_ids;  // every slab sharing this supporting plane
    Plane plane;
    std::vector<Point2> poly;   // convex, counterclockwise
};

struct PatchEdge {
    Point2 a, b;
    double za = 0.0, zb = 0.0;
    int face_l = -1, face_r = -1;  // indices into ConvexPatch::faces
};

struct ConvexPatch {
    std::vector<PatchFace> faces;
    std::vector<PatchEdge> edges;  // interior envelope edges only

    double height_at(const Point2& p, double tol) const {
        double best = std::numeric_limits<double>::max();
        bool found = false;
        for (const auto& f : faces) {
            bool inside = true;
            std::size_t n = f.poly.size();
            for (std::size_t i = 0; i < n && inside; i++) {
                const Point2& a = f.poly[i];
                const Point2& b = f.poly[(i + 1) % n];
                if ((b - a).cross(p - a) < -tol * (1.0 + dist(a, b))) inside = false;
            }
            if (inside) {
                best = std::min(best, f.plane.eval(p));
                found = true;
            }
        }
        if (!found) throw invariant_error("ConvexPatch::height_at: point outside all faces");
        return best;
    }
};

namespace envelope_detail {

inline std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly,
                                          const Plane& diff, double eps) {
    // Keep the side where diff.eval(p) <= eps.
    std::vector<Point2> out;
    std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; i++) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        double fa = diff.eval(a);
        double fb = diff.eval(b);
        bool ina = fa <= eps, inb = fb <= eps;
        if (ina) out.push_back(a);
        if (ina != inb) {
            double t = fa / (fa - fb);
            out.push_back(a + (b - a) * t);
        }
    }
    return out;
}

inline double poly_area2(const std::vector<Point2>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); i++) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % poly.size()];
        s += p.x * q.y - q.x * p.y;
    }
    return s;
}

// Interval of the line origin + t*dir inside a convex polygon.
inline bool clip_line_convex(const Point2& origin, const Vec2& dir,
                             const std::vector<Point2>& poly, double& t0, double& t1) {
    t0 = -std::numeric_limits<double>::max();
    t1 = std::numeric_limits<double>::max();
    std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; i++) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        Vec2 e = b - a;
        // Inside is left of a->b: e x (p - a) >= 0.
        double denom = e.cross(dir);
        double num = e.cross(origin - a);
        if (std::fabs(denom) < 1e-14) {
            if (num < -1e-12) return false;
            continue;
        }
        double t = -num / denom;
        if (denom > 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
    }
    return t0 < t1;
}

// Minimal incremental 3D convex hull, used only to find which dual points
// lie on the upper hull and which pairs are adjacent there.
struct Hull3 {
    struct Face {
        int a, b, c;
        bool alive = true;
    };
    const std::vector<Point3>& pts;
    std::vector<Face> faces;
    double eps;
    bool degenerate = false;

    static Vec2 xy(const Point3& p) { return {p.x, p.y}; }

    double orient(const Face& f, const Point3& p) const {
        const Point3 &A = pts[f.a], &B = pts[f.b], &C = pts[f.c];
        double bx = B.x - A.x, by = B.y - A.y, bz = B.z - A.z;
        double cx = C.x - A.x, cy = C.y - A.y, cz = C.z - A.z;
        double px = p.x - A.x, py = p.y - A.y, pz = p.z - A.z;
        return px * (by * cz - bz * cy) + py * (bz * cx - bx * cz) +
               pz * (bx * cy - by * cx);
    }

    explicit Hull3(const std::vector<Point3>& points, double scale) : pts(points) {
        eps = 1e-12 * std::max(1.0, scale * scale * scale);
        std::size_t n = pts.size();
        if (n < 4) {
            degenerate = true;
            return;
        }
        // Seed tetrahedron: spread apart, then not collinear, then not coplanar.
        std::size_t i1 = 1;
        double best = -1.0;
        for (std::size_t i = 1; i < n; i++) {
            double d = std::fabs(pts[i].x - pts[0].x) + std::fabs(pts[i].y - pts[0].y) +
                       std::fabs(pts[i].z - pts[0].z);
            if (d > best) {
                best = d;
                i1 = i;
            }
        }
        std::size_t i2 = 0;
        best = -1.0;
        for (std::size_t i = 1; i < n; i++) {
            if (i == i1) continue;
            double ux = pts[i1].x - pts[0].x, uy = pts[i1].y - pts[0].y,
                   uz = pts[i1].z - pts[0].z;
            double vx = pts[i].x - pts[0].x, vy = pts[i].y - pts[0].y,
                   vz = pts[i].z - pts[0].z;
            double cx = uy * vz - uz * vy, cy = uz * vx - ux * vz, cz = ux * vy - uy * vx;
            double d = cx * cx + cy * cy + cz * cz;
            if (d > best) {
                best = d;
                i2 = i;
            }
        }
        if (best <= eps * eps) {
            degenerate = true;
            return;
        }
        faces.push_back({0, static_cast<int>(i1), static_cast<int>(i2)});
        std::size_t i3 = 0;
        best = 0.0;
        for (std::size_t i = 1; i < n; i++) {
            double d = orient(faces[0], pts[i]);
            if (std::fabs(d) > std::fabs(best)) {
                best = d;
                i3 = i;
            }
        }
        if (std::fabs(best) <= eps) {
            degenerate = true;
            return;
        }
        if (best > 0.0) std::swap(faces[0].b, faces[0].c);
        Face f0 = faces[0];
        faces.push_back({f0.a, f0.b, static_cast<int>(i3)});
        faces.push_back({f0.b, f0.c, static_cast<int>(i3)});
        faces.push_back({f0.c, f0.a, static_cast<int>(i3)});
        // Orient the cone faces outward (away from the opposite seed vertex).
        int opposite[4] = {static_cast<int>(i3), f0.c, f0.a, f0.b};
        for (int k = 0; k < 4; k++)
            if (orient(faces[k], pts[opposite[k]]) > 0.0)
                std::swap(faces[k].b, faces[k].c);

        std::vector<char> used(n, 0);
        used[0] = used[i1] = used[i2] = used[i3] = 1;
        std::vector<int> order;
        for (std::size_t i = 0; i < n; i++)
            if (!used[i]) order.push_back(static_cast<int>(i));
        std::mt19937 rng(0x51CE1u);
        std::shuffle(order.begin(), order.end(), rng);
        for (int i : order) insert(i);
    }

    void insert(int ip) {
        const Point3& p = pts[ip];
        std::vector<int> visible;
        for (std::size_t f = 0; f < faces.size(); f++)
            if (faces[f].alive && orient(faces[f], p) > eps) visible.push_back(static_cast<int>(f));
        if (visible.empty()) return;
        // Horizon: directed edges of visible faces whose reverse never appears.
        std::vector<std::pair<int, int>> edges;
        for (int f : visible) {
            edges.push_back({faces[f].a, faces[f].b});
            edges.push_back({faces[f].b, faces[f].c});
            edges.push_back({faces[f].c, faces[f].a});
            faces[f].alive = false;
        }
        std::vector<std::pair<int, int>> sorted = edges;
        std::sort(sorted.begin(), sorted.end());
        for (const auto& [u, v] : edges) {
            bool twin = std::binary_search(sorted.begin(), sorted.end(), std::pair<int, int>(v, u));
            if (!twin) faces.push_back({u, v, ip});
        }
    }
};

}  // namespace envelope_detail

// Lower envelope of labeled planes over a convex counterclockwise cell.
// Coplanar inputs merge into one face carrying all their labels.
inline ConvexPatch envelope_planes(const std::vector<std::pair<Plane, int>>& planes,
                                   const std::vector<Point2>& cell) {
    using namespace envelope_detail;
    if (planes.empty() || cell.size() < 3)
        throw invariant_error("envelope_planes: empty input");

    double scale = 1.0;
    for (const auto& p : cell) scale = std::max({scale, std::fabs(p.x), std::fabs(p.y)});

    // Group coplanar inputs.
    struct Group {
        Plane plane;
        std::vector<int> ids;
    };
    std::vector<Group> groups;
    for (const auto& [pl, id] : planes) {
        bool merged = false;
        for (auto& g : groups) {
            if (std::fabs(g.plane.a - pl.a) <= 1e-9 && std::fabs(g.plane.b - pl.b) <= 1e-9 &&
                std::fabs(g.plane.c - pl.c) <= 1e-9 * scale) {
                g.ids.push_back(id);
                merged = true;
                break;
            }
        }
        if (!merged) groups.push_back({pl, {id}});
    }
    std::size_t k = groups.size();

    // Which groups contribute, and which pairs can share an envelope edge.
    std::vector<char> contributes(k, 1);
    std::vector<std::pair<int, int>> candidate_pairs;
    bool have_adjacency = false;

    if (k >= 8) {
        std::vector<Point3> duals(k);
        double dscale = 1.0;
        for (std::size_t i = 0; i < k; i++) {
            duals[i] = {groups[i].plane.a, groups[i].plane.b, -groups[i].plane.c};
            dscale = std::max(dscale, std::fabs(duals[i].z));
        }
        Hull3 hull(duals, dscale);
        if (!hull.degenerate) {
            std::fill(contributes.begin(), contributes.end(), 0);
            for (const auto& f : hull.faces) {
                if (!f.alive) continue;
                // Outward normal z-component: upper-hull facets only.
                const Point3 &A = duals[f.a], &B = duals[f.b], &C = duals[f.c];
                double nz = (B.x - A.x) * (C.y - A.y) - (B.y - A.y) * (C.x - A.x);
                if (nz <= 0.0) continue;
                contributes[f.a] = contributes[f.b] = contributes[f.c] = 1;
                candidate_pairs.push_back({f.a, f.b});
                candidate_pairs.push_back({f.b, f.c});
                candidate_pairs.push_back({f.c, f.a});
            }
            have_adjacency = true;
            // A hull where no facet faces up means a needle; fall back.
            bool any = false;
            for (char c : contributes) any |= (c != 0);
            if (!any) {
                std::fill(contributes.begin(), contributes.end(), 1);
                have_adjacency = false;
            }
        }
    }
    if (!have_adjacency) {
        for (std::size_t i = 0; i < k; i++)
            for (std::size_t j = i + 1; j < k; j++)
                candidate_pairs.push_back({static_cast<int>(i), static_cast<int>(j)});
    }

    // Clip each contributing group's region.
    std::vector<std::vector<int>> rivals(k);
    for (const auto& [i, j] : candidate_pairs) {
        rivals[i].push_back(j);
        rivals[j].push_back(i);
    }
    ConvexPatch patch;
    std::vector<int> face_of_group(k, -1);
    for (std::size_t i = 0; i < k; i++) {
        if (!contributes[i]) continue;
        std::vector<Point2> region(cell.begin(), cell.end());
        for (int j : rivals[i]) {
            if (region.empty()) break;
            Plane diff{groups[i].plane.a - groups[j].plane.a,
                       groups[i].plane.b - groups[j].plane.b,
                       groups[i].plane.c - groups[j].plane.c};
            region = clip_halfplane(region, diff, 1e-12 * scale);
        }
        if (region.size() < 3 || std::fabs(poly_area2(region)) < 1e-16 * scale * scale)
            continue;
        face_of_group[i] = static_cast<int>(patch.faces.size());
        patch.faces.push_back({groups[i].ids, groups[i].plane, region});
    }
    if (patch.faces.empty())
        throw invariant_error("envelope_planes: no face survived clipping");

    // Interior edges: for each adjacent pair, the equality line clipped to
    // both regions.
    std::vector<std::pair<int, int>> seen;
    for (const auto& [i, j] : candidate_pairs) {
        int fi = face_of_group[i], fj = face_of_group[j];
        if (fi < 0 || fj < 0 || fi == fj) continue;
        auto key = std::minmax(fi, fj);
        if (std::find(seen.begin(), seen.end(), std::pair<int, int>(key.first, key.second)) !=
            seen.end())
            continue;
        seen.push_back({key.first, key.second});
        const Plane& A = patch.faces[fi].plane;
        const Plane& B = patch.faces[fj].plane;
        double da = A.a - B.a, db = A.b - B.b, dc = A.c - B.c;
        double nn = std::hypot(da, db);
        if (nn < 1e-12) continue;  // coplanar groups share no ridge
        // Line da*x + db*y + dc = 0.
        Point2 origin{-da * dc / (nn * nn), -db * dc / (nn * nn)};
        Vec2 dir{-db / nn, da / nn};
        double s0, s1, u0, u1;
        if (!clip_line_convex(origin, dir, patch.faces[fi].poly, s0, s1)) continue;
        if (!clip_line_convex(origin, dir, patch.faces[fj].poly, u0, u1)) continue;
        double lo = std::max(s0, u0), hi = std::min(s1, u1);
        if (hi - lo <= 1e-9 * scale) continue;
        Point2 pa = origin + dir * lo;
        Point2 pb = origin + dir * hi;
        patch.edges.push_back({pa, pb, A.eval(pa), A.eval(pb), fi, fj});
    }
    return patch;
}

}  // namespace sskel
