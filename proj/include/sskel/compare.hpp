#pragma once

// Skeleton comparison: symmetric Hausdorff distance between edge sets plus
// the largest height deviation at matched points.

#include <vector>

#include "sskel/geom.hpp"

namespace sskel {

struct SkeletonEdgeView {
    Point2 a, b;
    double za = 0.0, zb = 0.0;
};

struct CompareReport {
    double hausdorff = 0.0;
    double max_height_dev = 0.0;
};

inline CompareReport compare_edge_sets(const std::vector<SkeletonEdgeView>& lhs,
                                       const std::vector<SkeletonEdgeView>& rhs,
                                       int samples_per_edge = 17) {
    CompareReport rep;
    auto one_way = [&](const std::vector<SkeletonEdgeView>& from,
                       const std::vector<SkeletonEdgeView>& to) {
        for (const auto& e : from) {
            for (int s = 0; s < samples_per_edge; s++) {
                double u = samples_per_edge == 1 ? 0.5
                                                 : static_cast<double>(s) / (samples_per_edge - 1);
                Point2 p = e.a + (e.b - e.a) * u;
                double pz = e.za + (e.zb - e.za) * u;
                double best = std::numeric_limits<double>::max();
                double bestz = 0.0;
                for (const auto& f : to) {
                    Vec2 d = f.b - f.a;
                    double l2 = d.norm2();
                    double v = l2 == 0.0 ? 0.0 : std::clamp((p - f.a).dot(d) / l2, 0.0, 1.0);
                    double dd = dist(p, f.a + d * v);
                    if (dd < best) {
                        best = dd;
                        bestz = f.za + (f.zb - f.za) * v;
                    }
                }
                rep.hausdorff = std::max(rep.hausdorff, best);
                rep.max_height_dev = std::max(rep.max_height_dev, std::fabs(bestz - pz));
            }
        }
    };
    if (lhs.empty() != rhs.empty()) {
        rep.hausdorff = std::numeric_limits<double>::max();
        return rep;
    }
    one_way(lhs, rhs);
    one_way(rhs, lhs);
    return rep;
}

}  // namespace sskel
