#pragma once

// Planar/3D primitives shared by every other header: points, planes,
// the robust orientation predicate, and the wavefront velocity / slab
// plane formulas.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace sskel {

// Global geometric tolerance. Set once at startup (CLI reads SSKEL_EPS);
// all fuzzy comparisons in the library derive from it.
inline double& epsilon() {
    static double eps = 1e-9;
    return eps;
}

class degeneracy_error : public std::runtime_error {
public:
    explicit degeneracy_error(const std::string& what) : std::runtime_error(what) {}
};

class invariant_error : public std::runtime_error {
public:
    explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
    Vec2 normalized() const {
        double n = norm();
        if (n == 0.0) throw degeneracy_error("cannot normalize zero vector");
        return {x / n, y / n};
    }
    // Counterclockwise perpendicular (left normal of a direction).
    Vec2 perp() const { return {-y, x}; }
};

using Point2 = Vec2;

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double dist(const Point2& a, const Point2& b) { return (b - a).norm(); }

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool near_point(const Point2& a, const Point2& b, double tol) {
    return std::fabs(a.x - b.x) <= tol && std::fabs(a.y - b.y) <= tol;
}

// z = a*x + b*y + c. Slab-supporting planes keep a^2 + b^2 = 1 (slope one).
struct Plane {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double eval(const Point2& p) const { return a * p.x + b * p.y + c; }
    Vec2 gradient() const { return {a, b}; }
};

// ---------------------------------------------------------------------------
// Robust orientation predicate.
//
// Adaptive-precision sign of the 2x2 determinant |b-a, c-a|, following
// Shewchuk's classic scheme: a cheap filtered evaluation first, then exact
// expansion arithmetic only when the sign is uncertain. Subdivision
// bookkeeping relies on these signs being consistent, so the fallback is
// not optional.
// ---------------------------------------------------------------------------

namespace detail {

// 2^-53; half the distance from 1.0 to the next double.
constexpr double kEps = 1.1102230246251565404236316680908203125e-16;
constexpr double kSplitter = 134217729.0;  // 2^27 + 1
constexpr double kResultErrBound = (3.0 + 8.0 * kEps) * kEps;
constexpr double kCcwErrBoundA = (3.0 + 16.0 * kEps) * kEps;
constexpr double kCcwErrBoundB = (2.0 + 12.0 * kEps) * kEps;
constexpr double kCcwErrBoundC = (9.0 + 64.0 * kEps) * kEps * kEps;

inline void fast_two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    y = b - (x - a);
}

inline void two_sum(double a, double b, double& x, double& y) {
    x = a + b;
    double bv = x - a;
    double av = x - bv;
    y = (a - av) + (b - bv);
}

inline void two_diff(double a, double b, double& x, double& y) {
    x = a - b;
    double bv = a - x;
    double av = x + bv;
    y = (a - av) + (bv - b);
}

inline void split(double a, double& hi, double& lo) {
    double c = kSplitter * a;
    hi = c - (c - a);
    lo = a - hi;
}

inline void two_product(double a, double b, double& x, double& y) {
    x = a * b;
    double ahi, alo, bhi, blo;
    split(a, ahi, alo);
    split(b, bhi, blo);
    y = ((ahi * bhi - x) + ahi * blo + alo * bhi) + alo * blo;
}

// (a1,a0) - (b1,b0) -> (x3,x2,x1,x0)
inline void two_two_diff(double a1, double a0, double b1, double b0,
                         double& x3, double& x2, double& x1, double& x0) {
    double j, u3, r0, r1, r2;
    two_diff(a0, b0, r0, x0);
    two_diff(a1, b1, r1, r2);
    two_sum(r2, r0, j, x1);
    two_sum(r1, j, u3, x2);
    x3 = u3;
}

inline int fast_expansion_sum_zeroelim(int elen, const double* e, int flen,
                                       const double* f, double* h) {
    double q, qnew, hh, enow, fnow;
    int eindex = 0, findex = 0, hindex = 0;
    enow = e[0];
    fnow = f[0];
    if ((fnow > enow) == (fnow > -enow)) {
        q = enow;
        eindex++;
        enow = (eindex < elen) ? e[eindex] : 0.0;
    } else {
        q = fnow;
        findex++;
        fnow = (findex < flen) ? f[findex] : 0.0;
    }
    if ((eindex < elen) && (findex < flen)) {
        if ((fnow > enow) == (fnow > -enow)) {
            fast_two_sum(enow, q, qnew, hh);
            eindex++;
            enow = (eindex < elen) ? e[eindex] : 0.0;
        } else {
            fast_two_sum(fnow, q, qnew, hh);
            findex++;
            fnow = (findex < flen) ? f[findex] : 0.0;
        }
        q = qnew;
        if (hh != 0.0) h[hindex++] = hh;
        while ((eindex < elen) && (findex < flen)) {
            if ((fnow > enow) == (fnow > -enow)) {
                two_sum(q, enow, qnew, hh);
                eindex++;
                enow = (eindex < elen) ? e[eindex] : 0.0;
            } else {
                two_sum(q, fnow, qnew, hh);
                findex++;
                fnow = (findex < flen) ? f[findex] : 0.0;
            }
            q = qnew;
            if (hh != 0.0) h[hindex++] = hh;
        }
    }
    while (eindex < elen) {
        two_sum(q, enow, qnew, hh);
        eindex++;
        enow = (eindex < elen) ? e[eindex] : 0.0;
        q = qnew;
        if (hh != 0.0) h[hindex++] = hh;
    }
    while (findex < flen) {
        two_sum(q, fnow, qnew, hh);
        findex++;
        fnow = (findex < flen) ? f[findex] : 0.0;
        q = qnew;
        if (hh != 0.0) h[hindex++] = hh;
    }
    if ((q != 0.0) || (hindex == 0)) h[hindex++] = q;
    return hindex;
}

inline double estimate(int elen, const double* e) {
    double q = e[0];
    for (int i = 1; i < elen; i++) q += e[i];
    return q;
}

inline double orient2d_adapt(const Point2& pa, const Point2& pb, const Point2& pc,
                             double detsum) {
    double acx = pa.x - pc.x;
    double bcx = pb.x - pc.x;
    double acy = pa.y - pc.y;
    double bcy = pb.y - pc.y;

    double detleft, detlefttail, detright, detrighttail;
    two_product(acx, bcy, detleft, detlefttail);
    two_product(acy, bcx, detright, detrighttail);

    double B[4];
    two_two_diff(detleft, detlefttail, detright, detrighttail, B[3], B[2], B[1], B[0]);

    double det = estimate(4, B);
    double errbound = kCcwErrBoundB * detsum;
    if ((det >= errbound) || (-det >= errbound)) return det;

    // Tails of the translated coordinates.
    double acxtail, bcxtail, acytail, bcytail, tmp;
    two_diff(pa.x, pc.x, tmp, acxtail);
    two_diff(pb.x, pc.x, tmp, bcxtail);
    two_diff(pa.y, pc.y, tmp, acytail);
    two_diff(pb.y, pc.y, tmp, bcytail);
    if ((acxtail == 0.0) && (acytail == 0.0) && (bcxtail == 0.0) && (bcytail == 0.0))
        return det;

    errbound = kCcwErrBoundC * detsum + kResultErrBound * std::fabs(det);
    det += (acx * bcytail + bcy * acxtail) - (acy * bcxtail + bcx * acytail);
    if ((det >= errbound) || (-det >= errbound)) return det;

    double s1, s0, t1, t0;
    double u[4], c1[8], c2[12], d[16];
    int c1len, c2len, dlen;

    two_product(acxtail, bcy, s1, s0);
    two_product(acytail, bcx, t1, t0);
    two_two_diff(s1, s0, t1, t0, u[3], u[2], u[1], u[0]);
    c1len = fast_expansion_sum_zeroelim(4, B, 4, u, c1);

    two_product(acx, bcytail, s1, s0);
    two_product(acy, bcxtail, t1, t0);
    two_two_diff(s1, s0, t1, t0, u[3], u[2], u[1], u[0]);
    c2len = fast_expansion_sum_zeroelim(c1len, c1, 4, u, c2);

    two_product(acxtail, bcytail, s1, s0);
    two_product(acytail, bcxtail, t1, t0);
    two_two_diff(s1, s0, t1, t0, u[3], u[2], u[1], u[0]);
    dlen = fast_expansion_sum_zeroelim(c2len, c2, 4, u, d);

    return d[dlen - 1];
}

}  // namespace detail

// Signed area of triangle abc, doubled. Exact sign.
inline double orient2d(const Point2& pa, const Point2& pb, const Point2& pc) {
    double detleft = (pa.x - pc.x) * (pb.y - pc.y);
    double detright = (pa.y - pc.y) * (pb.x - pc.x);
    double det = detleft - detright;
    double detsum;

    if (detleft > 0.0) {
        if (detright <= 0.0) return det;
        detsum = detleft + detright;
    } else if (detleft < 0.0) {
        if (detright >= 0.0) return det;
        detsum = -detleft - detright;
    } else {
        return det;
    }
    double errbound = detail::kCcwErrBoundA * detsum;
    if ((det >= errbound) || (-det >= errbound)) return det;
    return detail::orient2d_adapt(pa, pb, pc, detsum);
}

// -1, 0, +1 for right turn / collinear / left turn.
inline int orient2d_sign(const Point2& a, const Point2& b, const Point2& c) {
    double d = orient2d(a, b, c);
    return (d > 0.0) - (d < 0.0);
}

// ---------------------------------------------------------------------------
// Wavefront formulas.
// ---------------------------------------------------------------------------

// Inward unit normal of a directed boundary edge (interior on the left).
inline Vec2 inward_normal(const Point2& a, const Point2& b) {
    return (b - a).perp().normalized();
}

// Velocity of a polygon vertex under unit-speed inward edge offsetting.
// prev edge runs a->v, next edge runs v->b, interior on the left of both.
// Characterized by unit normal speed against both incident edges; for an
// interior angle alpha this comes out at speed 1/sin(alpha/2) along the
// interior bisector, which also covers reflex vertices.
inline Vec2 vertex_velocity(const Point2& a, const Point2& v, const Point2& b) {
    Vec2 n1 = inward_normal(a, v);
    Vec2 n2 = inward_normal(v, b);
    double det = n1.cross(n2);
    if (std::fabs(det) < 1e-14) {
        if (n1.dot(n2) > 0.0) return n1;  // straight vertex: moves like its edges
        throw degeneracy_error("vertex_velocity: incident edges fold back (angle ~ 0 or 2pi)");
    }
    // Solve n1.w = 1, n2.w = 1.
    return {(n2.y - n1.y) / det, (n1.x - n2.x) / det};
}

// Supporting plane of the slab over a directed polygon edge: contains the
// edge at z = 0, gradient = inward unit normal, so the value at a point is
// its signed distance to the edge's supporting line.
inline Plane edge_plane(const Point2& a, const Point2& b) {
    double len = dist(a, b);
    if (len <= 0.0) throw degeneracy_error("edge_plane: zero-length edge");
    if (std::fabs(b.x - a.x) <= epsilon() * len)
        throw degeneracy_error("edge_plane: vertical edge (general position violation)");
    Vec2 n = inward_normal(a, b);
    return {n.x, n.y, -(n.x * a.x + n.y * a.y)};
}

// Same construction without the vertical-edge guard; used internally where
// the caller has already validated or rotated the input.
inline Plane edge_plane_unchecked(const Point2& a, const Point2& b) {
    Vec2 n = inward_normal(a, b);
    return {n.x, n.y, -(n.x * a.x + n.y * a.y)};
}

inline Point2 rotate_point(const Point2& p, double cos_t, double sin_t) {
    return {cos_t * p.x - sin_t * p.y, sin_t * p.x + cos_t * p.y};
}

// ---------------------------------------------------------------------------
// Segment utilities.
// ---------------------------------------------------------------------------

inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    Vec2 d = b - a;
    double l2 = d.norm2();
    if (l2 == 0.0) return dist(p, a);
    double t = std::clamp((p - a).dot(d) / l2, 0.0, 1.0);
    return dist(p, a + d * t);
}

// Proper intersection test: open segments cross at a single interior point.
inline bool segments_cross(const Point2& a, const Point2& b, const Point2& c,
                           const Point2& d) {
    int o1 = orient2d_sign(a, b, c);
    int o2 = orient2d_sign(a, b, d);
    int o3 = orient2d_sign(c, d, a);
    int o4 = orient2d_sign(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

// Intersection parameter of segment (a,b) with segment (c,d); returns false
// when parallel. t is along (a,b), u along (c,d).
inline bool segment_intersection_params(const Point2& a, const Point2& b,
                                        const Point2& c, const Point2& d,
                                        double& t, double& u) {
    Vec2 r = b - a;
    Vec2 s = d - c;
    double denom = r.cross(s);
    if (std::fabs(denom) < 1e-16 * (r.norm() * s.norm() + 1e-300)) return false;
    Vec2 qp = c - a;
    t = qp.cross(s) / denom;
    u = qp.cross(r) / denom;
    return true;
}

}  // namespace sskel
