#pragma once

// Simple-polygon triangulation via y-monotone decomposition (sweep with a
// status tree of active edges, then stack triangulation of each monotone
// piece), plus a small planar face extractor shared with the balanced-cut
// construction.

#include <array>
#include <map>
#include <set>
#include <vector>

#include "sskel/geom.hpp"

namespace sskel {
namespace triangulate_detail {

// Counterclockwise (positive-area) faces of a small planar graph given by
// points and undirected edges. The unbounded face comes out clockwise and is
// dropped.
inline std::vector<std::vector<int>> faces_of_planar_graph(
    const std::vector<Point2>& pts, const std::vector<std::pair<int, int>>& edges) {
    struct HE {
        int from, to;
        int next = -1;
        bool used = false;
    };
    std::vector<HE> hes;
    for (const auto& [a, b] : edges) {
        if (a == b) continue;
        hes.push_back({a, b});
        hes.push_back({b, a});
    }
    std::vector<std::vector<int>> outgoing(pts.size());
    for (std::size_t h = 0; h < hes.size(); h++) outgoing[hes[h].from].push_back(static_cast<int>(h));
    for (auto& out : outgoing)
        std::sort(out.begin(), out.end(), [&](int x, int y) {
            Vec2 dx = pts[hes[x].to] - pts[hes[x].from];
            Vec2 dy = pts[hes[y].to] - pts[hes[y].from];
            return std::atan2(dx.y, dx.x) < std::atan2(dy.y, dy.x);
        });
    for (std::size_t h = 0; h < hes.size(); h++) {
        int v = hes[h].to;
        int twin = static_cast<int>(h % 2 == 0 ? h + 1 : h - 1);
        const auto& out = outgoing[v];
        std::size_t idx = 0;
        for (std::size_t i = 0; i < out.size(); i++)
            if (out[i] == twin) idx = i;
        hes[h].next = out[(idx + out.size() - 1) % out.size()];
    }
    std::vector<std::vector<int>> faces;
    for (std::size_t h0 = 0; h0 < hes.size(); h0++) {
        if (hes[h0].used) continue;
        std::vector<int> loop;
        double area2 = 0.0;
        int h = static_cast<int>(h0);
        std::size_t guard = 0;
        while (!hes[h].used && guard++ <= hes.size()) {
            hes[h].used = true;
            loop.push_back(hes[h].from);
            const Point2& a = pts[hes[h].from];
            const Point2& b = pts[hes[h].to];
            area2 += a.x * b.y - b.x * a.y;
            h = hes[h].next;
        }
        if (guard > hes.size() + 1)
            throw invariant_error("faces_of_planar_graph: traversal did not close");
        if (area2 > 0.0 && loop.size() >= 3) faces.push_back(std::move(loop));
    }
    return faces;
}

inline bool above(const Point2& a, const Point2& b) {
    return a.y > b.y || (a.y == b.y && a.x < b.x);
}

enum class VClass { start, end, split, merge, regular };

struct SweepState {
    const std::vector<Point2>* pts = nullptr;
    const std::vector<int>* ring = nullptr;
    Point2 sweep;

    Point2 edge_top(int e) const {
        const Point2& a = (*pts)[(*ring)[e]];
        const Point2& b = (*pts)[(*ring)[(e + 1) % ring->size()]];
        return above(a, b) ? a : b;
    }
    Point2 edge_bot(int e) const {
        const Point2& a = (*pts)[(*ring)[e]];
        const Point2& b = (*pts)[(*ring)[(e + 1) % ring->size()]];
        return above(a, b) ? b : a;
    }
    double x_at(int e, double y) const {
        Point2 t = edge_top(e), b = edge_bot(e);
        if (std::fabs(t.y - b.y) < 1e-300) return std::min(t.x, b.x);
        double u = (t.y - y) / (t.y - b.y);
        u = std::clamp(u, 0.0, 1.0);
        return t.x + u * (b.x - t.x);
    }
};

struct StatusCmp {
    using is_transparent = void;
    SweepState* st;
    bool operator()(int a, int b) const {
        double xa = st->x_at(a, st->sweep.y);
        double xb = st->x_at(b, st->sweep.y);
        if (xa != xb) return xa < xb;
        return a < b;
    }
    bool operator()(int a, double x) const { return st->x_at(a, st->sweep.y) < x; }
    bool operator()(double x, int b) const { return x < st->x_at(b, st->sweep.y); }
};

// Diagonals making every face of (ring + diagonals) y-monotone.
inline std::vector<std::pair<int, int>> monotone_diagonals(const std::vector<Point2>& pts,
                                                           const std::vector<int>& ring) {
    std::size_t n = ring.size();
    std::vector<VClass> cls(n);
    for (std::size_t i = 0; i < n; i++) {
        const Point2& p = pts[ring[(i + n - 1) % n]];
        const Point2& v = pts[ring[i]];
        const Point2& q = pts[ring[(i + 1) % n]];
        bool p_below = above(v, p);
        bool q_below = above(v, q);
        double turn = orient2d(p, v, q);
        if (p_below && q_below)
            cls[i] = turn > 0.0 ? VClass::start : VClass::split;
        else if (!p_below && !q_below)
            cls[i] = turn > 0.0 ? VClass::end : VClass::merge;
        else
            cls[i] = VClass::regular;
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; i++) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return above(pts[ring[a]], pts[ring[b]]);
    });

    SweepState st;
    st.pts = &pts;
    st.ring = &ring;
    StatusCmp cmp{&st};
    std::set<int, StatusCmp> status(cmp);
    std::vector<int> helper(n, -1);
    std::vector<std::pair<int, int>> diagonals;

    auto add_diag = [&](std::size_t a, std::size_t b) {
        diagonals.push_back({ring[a], ring[b]});
    };
    auto left_edge_of = [&](const Point2& v) -> int {
        auto it = status.lower_bound(v.x);
        if (it == status.begin()) return -1;
        return *std::prev(it);
    };

    for (std::size_t oi = 0; oi < n; oi++) {
        std::size_t i = order[oi];
        const Point2& v = pts[ring[i]];
        st.sweep = v;
        std::size_t prev = (i + n - 1) % n;
        int e_in = static_cast<int>(prev);  // edge prev -> i
        int e_out = static_cast<int>(i);    // edge i -> next
        switch (cls[i]) {
            case VClass::start:
                status.insert(e_out);
                helper[e_out] = static_cast<int>(i);
                break;
            case VClass::end:
                if (helper[e_in] >= 0 && cls[helper[e_in]] == VClass::merge)
                    add_diag(i, helper[e_in]);
                status.erase(e_in);
                break;
            case VClass::split: {
                int ej = left_edge_of(v);
                if (ej >= 0) {
                    add_diag(i, helper[ej]);
                    helper[ej] = static_cast<int>(i);
                }
                status.insert(e_out);
                helper[e_out] = static_cast<int>(i);
                break;
            }
            case VClass::merge: {
                if (helper[e_in] >= 0 && cls[helper[e_in]] == VClass::merge)
                    add_diag(i, helper[e_in]);
                status.erase(e_in);
                int ej = left_edge_of(v);
                if (ej >= 0) {
                    if (helper[ej] >= 0 && cls[helper[ej]] == VClass::merge)
                        add_diag(i, helper[ej]);
                    helper[ej] = static_cast<int>(i);
                }
                break;
            }
            case VClass::regular: {
                bool interior_right = above(pts[ring[prev]], v);
                if (interior_right) {
                    if (helper[e_in] >= 0 && cls[helper[e_in]] == VClass::merge)
                        add_diag(i, helper[e_in]);
                    status.erase(e_in);
                    status.insert(e_out);
                    helper[e_out] = static_cast<int>(i);
                } else {
                    int ej = left_edge_of(v);
                    if (ej >= 0) {
                        if (helper[ej] >= 0 && cls[helper[ej]] == VClass::merge)
                            add_diag(i, helper[ej]);
                        helper[ej] = static_cast<int>(i);
                    }
                }
                break;
            }
        }
    }
    return diagonals;
}

// Stack triangulation of a y-monotone counterclockwise piece.
inline std::vector<std::array<int, 3>> monotone_triangulate(const std::vector<Point2>& pts,
                                                            const std::vector<int>& piece) {
    std::size_t n = piece.size();
    std::vector<std::array<int, 3>> tris;
    if (n < 3) return tris;
    if (n == 3) {
        tris.push_back({piece[0], piece[1], piece[2]});
        return tris;
    }
    std::size_t top = 0, bot = 0;
    for (std::size_t i = 1; i < n; i++) {
        if (above(pts[piece[i]], pts[piece[top]])) top = i;
        if (above(pts[piece[bot]], pts[piece[i]])) bot = i;
    }
    // Left chain: walking next-wise from top down to bottom (CCW piece).
    std::vector<char> is_left(n, 0);
    for (std::size_t i = top; i != bot; i = (i + 1) % n) is_left[i] = 1;
    is_left[bot] = 0;
    is_left[top] = 1;

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; i++) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return above(pts[piece[a]], pts[piece[b]]);
    });

    std::vector<std::size_t> stack = {order[0], order[1]};
    for (std::size_t k = 2; k < n; k++) {
        std::size_t u = order[k];
        if (is_left[u] != is_left[stack.back()]) {
            while (stack.size() >= 2) {
                std::size_t a = stack.back();
                stack.pop_back();
                std::size_t b = stack.back();
                tris.push_back(is_left[u] ? std::array<int, 3>{piece[u], piece[a], piece[b]}
                                          : std::array<int, 3>{piece[u], piece[b], piece[a]});
            }
            stack.pop_back();
            stack.push_back(order[k - 1]);
            stack.push_back(u);
        } else {
            while (stack.size() >= 2) {
                std::size_t a = stack[stack.size() - 1];
                std::size_t b = stack[stack.size() - 2];
                double o = orient2d(pts[piece[b]], pts[piece[a]], pts[piece[u]]);
                bool ok = is_left[u] ? o > 0.0 : o < 0.0;
                if (!ok) break;
                tris.push_back(is_left[u] ? std::array<int, 3>{piece[u], piece[a], piece[b]}
                                          : std::array<int, 3>{piece[u], piece[b], piece[a]});
                stack.pop_back();
            }
            stack.push_back(u);
        }
    }
    return tris;
}

}  // namespace triangulate_detail

// Triangulate a simple counterclockwise polygon given as indices into pts.
inline std::vector<std::array<int, 3>> triangulate_polygon(const std::vector<Point2>& pts,
                                                           const std::vector<int>& ring) {
    using namespace triangulate_detail;
    if (ring.size() < 3) return {};
    if (ring.size() == 3) return {{ring[0], ring[1], ring[2]}};
    auto diagonals = monotone_diagonals(pts, ring);
    if (diagonals.empty()) return monotone_triangulate(pts, ring);
    std::vector<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < ring.size(); i++)
        edges.push_back({ring[i], ring[(i + 1) % ring.size()]});
    edges.insert(edges.end(), diagonals.begin(), diagonals.end());
    auto pieces = faces_of_planar_graph(pts, edges);
    std::vector<std::array<int, 3>> tris;
    for (const auto& piece : pieces) {
        auto t = monotone_triangulate(pts, piece);
        tris.insert(tris.end(), t.begin(), t.end());
    }
    return tris;
}

}  // namespace sskel
