#pragma once

// End-to-end driver: validate, optionally rotate away vertical edges,
// simulate motorcycles, build slabs, run the two-stage subdivision, and
// assemble the skeleton. Degeneracies trigger a retry under a small global
// rotation; results are rotated back.

#include "sskel/assembly.hpp"
#include "sskel/divide.hpp"

namespace sskel {

class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

struct ComputeOptions {
    bool auto_rotate = true;
    bool want_stats = false;
};

struct ComputeResult {
    Skeleton s_prime;  // with flat edges and polygon boundary
    Skeleton skeleton;  // flat edges stripped
    RecursionStats stats;
    std::size_t n = 0;
    std::size_t r = 0;
    double rotation = 0.0;  // applied internally, undone on output
};

namespace pipeline_detail {

inline void rotate_skeleton(Skeleton& skel, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    for (auto& v : skel.vertices) v.p = rotate_point(v.p, c, s);
}

inline ComputeResult compute_once(const Polygon& poly) {
    MotorcycleGraph graph = compute_motorcycle_graph(poly);
    SlabSet slabs = build_slabs(poly, graph);
    PipelineContext ctx(poly, graph, slabs);
    KP kp = init_kp(ctx);
    DivideResult divided = run_divide(ctx, kp);
    Skeleton sprime = assemble(ctx, divided.leaves);
    concatenate_collinear(sprime, ctx.tol);

    ComputeResult result;
    result.skeleton = strip_flat_edges(sprime, ctx.tol);
    result.s_prime = std::move(sprime);
    result.stats = std::move(divided.stats);
    result.n = poly.vertex_count();
    result.r = poly.reflex_count();
    return result;
}

}  // namespace pipeline_detail

inline ComputeResult compute_skeleton(Polygon poly, const ComputeOptions& opts = {}) {
    normalize_polygon(poly);
    GeneralPositionReport report = validate(poly);
    if (report.hard_reject) throw validation_error(report.summary());

    bool has_vertical = !report.ok();
    if (has_vertical && !opts.auto_rotate) throw validation_error(report.summary());

    // Retry ladder of global rotations; the first entry skips rotation when
    // the input is already clean.
    std::vector<double> angles;
    if (!has_vertical) angles.push_back(0.0);
    angles.insert(angles.end(), {1e-3, 2.718281828e-3, 7.389056099e-3, 1.9e-2});

    std::string last_error;
    for (double angle : angles) {
        Polygon attempt = angle == 0.0 ? poly : rotated_polygon(poly, angle);
        if (angle != 0.0 && !validate(attempt).ok()) continue;
        try {
            ComputeResult result = pipeline_detail::compute_once(attempt);
            if (angle != 0.0) {
                pipeline_detail::rotate_skeleton(result.s_prime, -angle);
                pipeline_detail::rotate_skeleton(result.skeleton, -angle);
            }
            result.rotation = angle;
            return result;
        } catch (const degeneracy_error& e) {
            last_error = e.what();
        } catch (const invariant_error& e) {
            last_error = e.what();
        }
        if (!opts.auto_rotate) break;
    }
    throw degeneracy_error("compute_skeleton failed on every rotation: " + last_error);
}

}  // namespace sskel
