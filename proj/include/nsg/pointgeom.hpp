#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "nsg/errors.hpp"
#include "nsg/space.hpp"

namespace nsg {

// =====================================================================
// Pointwise unit-sphere geometry: normal cones, extreme points, exposed
// points, strict convexity probing.
// =====================================================================

struct NormalCone {
    // generators normalized so f(x0) = 1; a smooth point has exactly one
    std::vector<Functional> generators;
    bool smooth = false;
};

struct ExtremeCheck {
    bool extreme = false;
    // direction z != 0 with x0 +- z still inside the unit ball
    std::optional<Vector> witness;
};

struct PointClass {
    double norm_value = 0;
    bool on_sphere = false;
    bool extreme = false;
    bool exposed = false;
    std::optional<Functional> exposing_functional;
    // direction d != 0 such that the segment from x0 to x0 + d stays on the
    // unit sphere; present whenever exposedness fails through a flat
    std::optional<Vector> flat_witness;
    // separation margin of the exposing functional over the rest of the
    // sphere (sampled away from x0); exact on polytope backends
    double margin = 0;
    Backend backend = Backend::floating;
};

// raised by constructions when a base point is not exposed; carries the full
// classification so callers can surface the obstruction
class NotExposed : public Error {
public:
    NotExposed(std::string msg, PointClass pc)
        : Error(std::move(msg)), point_class(std::move(pc)) {}
    PointClass point_class;
};

struct ConvexityProbe {
    bool strictly_convex = false;
    double max_pair_norm = 0;
    // distinct unit vectors whose midpoint also has unit norm
    std::optional<std::pair<Vector, Vector>> witness;
    double exposed_fraction = 0;
    int samples = 0;
};

namespace detail {

inline void require_on_sphere(const Space& space, const Vector& x0, double& norm_out) {
    space.check_dim(x0.dim());
    if (x0.is_zero()) throw NotOnSphere("the zero vector is not on the unit sphere");
    if (space.has_exact()) {
        const Rat g = space.norm_exact(x0);
        norm_out = to_double(g);
        if (g != 1)
            throw NotOnSphere("point has exact norm " + rat_str(g) + ", expected 1");
        return;
    }
    norm_out = space.norm(x0.approx());
    if (std::fabs(norm_out - 1.0) > space.tol().eps_abs)
        throw NotOnSphere("point has norm " + std::to_string(norm_out) + ", expected 1");
}

[[nodiscard]] inline DVec lp_gradient_at(const DVec& x, double p) {
    DVec g{0, 0};
    g.n = x.n;
    for (int i = 0; i < x.n; ++i) {
        const double xi = x.v[static_cast<size_t>(i)];
        const double s = xi > 0 ? 1.0 : xi < 0 ? -1.0 : 0.0;
        g.v[static_cast<size_t>(i)] = s * std::pow(std::fabs(xi), p - 1.0);
    }
    return g;
}

[[nodiscard]] inline int rank_d(const std::vector<DVec>& rows, int n, double tol) {
    double M[8][4] = {};
    const int m = std::min<int>(8, static_cast<int>(rows.size()));
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < n; ++c) M[r][c] = rows[static_cast<size_t>(r)].v[static_cast<size_t>(c)];
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int piv = -1;
        double best = tol;
        for (int r = rank; r < m; ++r)
            if (std::fabs(M[r][col]) > best) { best = std::fabs(M[r][col]); piv = r; }
        if (piv < 0) continue;
        for (int c = 0; c < n; ++c) std::swap(M[piv][c], M[rank][c]);
        for (int r = rank + 1; r < m; ++r) {
            const double f = M[r][col] / M[rank][col];
            for (int c = 0; c < n; ++c) M[r][c] -= f * M[rank][c];
        }
        ++rank;
    }
    return rank;
}

} // namespace detail

// ---------------------------------------------------------------------
// supporting functionals
// ---------------------------------------------------------------------

[[nodiscard]] inline NormalCone supporting_functionals(const Space& space, const Vector& x0) {
    double nv = 0;
    detail::require_on_sphere(space, x0, nv);
    NormalCone cone;

    if (space.lp_smooth()) {
        const DVec g = detail::lp_gradient_at(x0.approx(), space.spec().lp().p);
        const double gx = g.dot(x0.approx());
        cone.generators.emplace_back(Vector::from(g.scaled(1.0 / gx)));
        cone.smooth = true;
        return cone;
    }

    if (space.poly()) {
        const auto* k = space.poly();
        if (space.has_exact()) {
            for (int i : k->active_facets_exact(x0, Rat(1)))
                cone.generators.push_back(k->facets[static_cast<size_t>(i)]);
        } else {
            for (int i : k->active_facets_approx(x0.approx(), 1.0, space.tol().eps_abs))
                cone.generators.push_back(k->facets[static_cast<size_t>(i)]);
        }
        cone.smooth = cone.generators.size() == 1;
        return cone;
    }

    const auto* k = space.g2d();
    const DVec xd = x0.approx();
    const auto loc = k->locate(xd);
    auto push_normal = [&](const DVec& n) {
        const double nx = n.dot(xd);
        cone.generators.emplace_back(Vector::from(n.scaled(1.0 / nx)));
    };
    if (loc.at_junction) {
        const auto& j = k->junctions[static_cast<size_t>(loc.junction)];
        // the junction stores normals for +point; flip for the antipode
        const double side = xd.dot(j.point) >= 0 ? 1.0 : -1.0;
        const DVec nl = j.n_left.scaled(side), nr = j.n_right.scaled(side);
        push_normal(nl);
        if ((nl - nr).l2() > 1e-12) push_normal(nr);
    } else {
        push_normal(detail::outward_normal(k->pieces[static_cast<size_t>(loc.piece)], xd));
    }
    cone.smooth = cone.generators.size() == 1;
    return cone;
}

// ---------------------------------------------------------------------
// extreme points
// ---------------------------------------------------------------------

namespace detail {

// witness direction for a point inside the segment [a, b]: the shorter arm,
// halved; x0 +- z stays inside the segment and therefore on the sphere
[[nodiscard]] inline std::optional<Vector> segment_interior_witness(const DVec& a, const DVec& b,
                                                                    const DVec& x0) {
    const DVec d = b - a;
    const double len = d.l2();
    if (len <= 0) return std::nullopt;
    const double da = (x0 - a).l2(), db = (b - x0).l2();
    const double arm = 0.5 * std::min(da, db);
    if (arm <= 1e-12) return std::nullopt;
    return Vector::from(d.scaled(arm / len));
}

} // namespace detail

[[nodiscard]] inline ExtremeCheck is_extreme(const Space& space, const Vector& x0) {
    double nv = 0;
    detail::require_on_sphere(space, x0, nv);
    ExtremeCheck r;

    if (space.lp_smooth() || (space.kind() == SpaceKind::lp && !space.spec().lp().infinite &&
                              space.spec().lp().p == 2.0)) {
        // strictly convex: every sphere point is extreme
        r.extreme = true;
        return r;
    }

    if (space.poly()) {
        const auto* k = space.poly();
        if (space.has_exact()) {
            if (k->is_vertex_on_sphere(x0)) {
                r.extreme = true;
                return r;
            }
            if (auto z = k->flat_direction(x0)) {
                r.extreme = false;
                r.witness = *z;
                return r;
            }
            r.extreme = true; // active facets span but the point is a vertex
            return r;
        }
        const DVec xd = x0.approx();
        std::vector<DVec> active;
        for (int i : k->active_facets_approx(xd, 1.0, space.tol().eps_abs))
            active.push_back(k->facets_d[static_cast<size_t>(i)]);
        if (detail::rank_d(active, space.dim(), 1e-7) == space.dim()) {
            r.extreme = true;
            return r;
        }
        // fall back to the exact machinery for the witness; the facet data
        // is rational regardless of the evaluation backend
        if (auto z = k->flat_direction(Vector::from(xd))) {
            r.extreme = false;
            r.witness = *z;
        } else {
            r.extreme = true;
        }
        return r;
    }

    const auto* k = space.g2d();
    const DVec xd = x0.approx();
    const auto loc = k->locate(xd);
    if (!loc.at_junction) {
        const auto& p = k->pieces[static_cast<size_t>(loc.piece)];
        if (p.kind == detail::RPiece::Kind::segment) {
            // flip into the stored piece frame when x0 is on the mirrored half
            const bool mirrored = xd.dot(p.a + p.b) < 0;
            const DVec q = mirrored ? -xd : xd;
            if (auto z = detail::segment_interior_witness(p.a, p.b, q)) {
                r.extreme = false;
                r.witness = *z;
                return r;
            }
        }
        r.extreme = true;
        return r;
    }
    // junction point: only a pair of collinear segments keeps it non-extreme
    const auto& j = k->junctions[static_cast<size_t>(loc.junction)];
    const auto& left = k->pieces[static_cast<size_t>(j.left)];
    const auto& right = k->pieces[static_cast<size_t>(j.right)];
    if (left.kind == detail::RPiece::Kind::segment &&
        right.kind == detail::RPiece::Kind::segment &&
        (j.n_left - j.n_right).l2() <= 1e-12) {
        const bool mirrored = xd.dot(j.point) < 0;
        const DVec q = mirrored ? -xd : xd;
        if (auto z = detail::segment_interior_witness(left.a, right.b, q)) {
            r.extreme = false;
            r.witness = *z;
            return r;
        }
    }
    r.extreme = true;
    return r;
}

// ---------------------------------------------------------------------
// exposed points
// ---------------------------------------------------------------------

namespace detail {

// separation margin of f over the sphere away from x0: min of 1 - f(y) over
// a dense sample with the angular neighborhood of x0 removed
[[nodiscard]] inline double sampled_margin(const Space& space, const DVec& x0, const DVec& f) {
    double margin = 2.0;
    const int count = space.dim() == 2 ? 1440 : space.tol().grid_3d;
    for (const auto& y : space.sphere_sample(count)) {
        if (angle_between(y, x0) < 1e-2) continue;
        margin = std::min(margin, 1.0 - f.dot(y));
    }
    return margin;
}

} // namespace detail

[[nodiscard]] inline PointClass is_exposed(const Space& space, const Vector& x0) {
    PointClass pc;
    pc.backend = space.backend();
    detail::require_on_sphere(space, x0, pc.norm_value);
    pc.on_sphere = true;
    const DVec xd = x0.approx();

    if (space.lp_smooth()) {
        // smooth and strictly convex: the gradient functional exposes
        pc.extreme = true;
        pc.exposed = true;
        const DVec g = detail::lp_gradient_at(xd, space.spec().lp().p);
        const DVec f = g.scaled(1.0 / g.dot(xd));
        pc.exposing_functional = Functional(Vector::from(f));
        pc.margin = detail::sampled_margin(space, xd, f);
        return pc;
    }

    if (space.poly()) {
        const auto* k = space.poly();
        const auto ext = is_extreme(space, x0);
        pc.extreme = ext.extreme;
        if (!ext.extreme) {
            pc.exposed = false;
            pc.flat_witness = ext.witness;
            return pc;
        }
        // vertices of a polytope are exposed; the mean of the active facet
        // functionals separates strictly
        const auto active = space.has_exact()
                                ? k->active_facets_exact(x0, Rat(1))
                                : k->active_facets_approx(xd, 1.0, space.tol().eps_abs);
        Vector sum = Vector::zeros(space.dim());
        for (int i : active)
            for (int c = 0; c < space.dim(); ++c) sum[c] += k->facets[static_cast<size_t>(i)][c];
        Functional f(sum.scaled(Rat(1, static_cast<long>(active.size()))));
        pc.exposed = true;
        pc.exposing_functional = f;
        if (space.has_exact()) {
            // exact margin over the remaining vertices
            Rat second(-2);
            for (const auto& v : k->vertices) {
                if (v == x0) continue;
                const Rat fv = f(v);
                if (fv > second) second = fv;
            }
            pc.margin = to_double(Rat(1) - second);
        } else {
            const DVec fd = f.approx();
            double second = -2;
            for (const auto& v : k->vertices_d) {
                if ((v - xd).l2() <= 1e-9) continue;
                second = std::max(second, fd.dot(v));
            }
            pc.margin = 1.0 - second;
        }
        return pc;
    }

    const auto* k = space.g2d();
    const auto cone = supporting_functionals(space, x0);
    if (!cone.smooth) {
        // proper corner: the angular bisector of the cone exposes it
        const DVec n0 = detail::unit2(cone.generators[0].approx());
        const DVec n1 = detail::unit2(cone.generators[1].approx());
        const DVec mid = detail::unit2(n0 + n1);
        const DVec f = mid.scaled(1.0 / mid.dot(xd));
        pc.extreme = true;
        pc.exposed = true;
        pc.exposing_functional = Functional(Vector::from(f));
        pc.margin = detail::sampled_margin(space, xd, f);
        return pc;
    }

    // smooth point: expose iff the support set of the unique functional is
    // just x0; flats are detected through exact perpendicularity, so the
    // segment-faced verdicts carry no tolerance
    const DVec f = cone.generators[0].approx();
    const auto sup = k->support(f);
    if (!sup.flat) {
        pc.extreme = true;
        pc.exposed = true;
        pc.exposing_functional = cone.generators[0];
        pc.margin = detail::sampled_margin(space, xd, f);
        return pc;
    }
    // the support set is a whole segment; x0 fails to be exposed, and it is
    // extreme exactly when it sits at one of the segment's ends
    const double da = (xd - sup.flat_a).l2();
    const double db = (xd - sup.flat_b).l2();
    const double seg = (sup.flat_b - sup.flat_a).l2();
    pc.exposed = false;
    if (std::min(da, db) <= 1e-9 * (1 + seg)) {
        pc.extreme = true;
        pc.flat_witness = Vector::from(da <= db ? sup.flat_b - xd : sup.flat_a - xd);
    } else {
        pc.extreme = false;
        pc.flat_witness = Vector::from((sup.flat_b - sup.flat_a).scaled(
            0.5 * std::min(da, db) / seg));
    }
    return pc;
}

// ---------------------------------------------------------------------
// strict convexity probe
// ---------------------------------------------------------------------

namespace detail {

// tolerance-light exposedness used for sampled fractions; sampled points are
// only approximately on the sphere, so the strict classifiers do not apply
[[nodiscard]] inline bool exposed_light(const Space& space, const DVec& y) {
    if (space.lp_smooth() ||
        (space.kind() == SpaceKind::lp && !space.spec().lp().infinite && space.spec().lp().p == 2.0))
        return true;
    if (space.poly()) {
        const auto* k = space.poly();
        std::vector<DVec> active;
        for (int i : k->active_facets_approx(y, 1.0, 1e-9))
            active.push_back(k->facets_d[static_cast<size_t>(i)]);
        return rank_d(active, space.dim(), 1e-7) == space.dim();
    }
    const auto* k = space.g2d();
    const auto loc = k->locate(y);
    if (loc.at_junction) {
        const auto& j = k->junctions[static_cast<size_t>(loc.junction)];
        if ((j.n_left - j.n_right).l2() > 1e-9) return true; // proper corner
        return k->pieces[static_cast<size_t>(j.left)].kind != RPiece::Kind::segment &&
               k->pieces[static_cast<size_t>(j.right)].kind != RPiece::Kind::segment;
    }
    return k->pieces[static_cast<size_t>(loc.piece)].kind != RPiece::Kind::segment;
}

} // namespace detail

[[nodiscard]] inline ConvexityProbe strict_convexity_probe(const Space& space, int samples) {
    if (samples < 8) throw InvalidSpec("convexity probe needs at least 8 samples");
    ConvexityProbe probe;
    probe.samples = samples;

    // structural witnesses first: any facet carrying two extreme points, or
    // any segment piece, pins a flat exactly
    if (space.poly()) {
        const auto* k = space.poly();
        for (const auto& f : k->facets) {
            std::optional<Vector> first;
            for (const auto& v : k->vertices) {
                if (f(v) != 1) continue;
                if (!first) {
                    first = v;
                    continue;
                }
                probe.strictly_convex = false;
                probe.witness = std::make_pair(*first, v);
                probe.max_pair_norm = to_double(k->gauge(*first + v));
                break;
            }
            if (probe.witness) break;
        }
    } else if (space.g2d()) {
        for (const auto& p : space.g2d()->pieces) {
            if (p.kind != detail::RPiece::Kind::segment) continue;
            probe.strictly_convex = false;
            probe.witness = std::make_pair(Vector::from(p.a), Vector::from(p.b));
            probe.max_pair_norm = space.norm(p.a + p.b);
            break;
        }
    }

    const auto pts = space.sphere_sample(samples);
    double max_pair = 0;
    int max_i = 0;
    for (int i = 0; i < samples; ++i) {
        const auto& a = pts[static_cast<size_t>(i)];
        const auto& b = pts[static_cast<size_t>((i + 1) % samples)];
        const double v = space.norm(a + b);
        if (v > max_pair) { max_pair = v; max_i = i; }
    }
    if (!probe.witness) {
        probe.max_pair_norm = max_pair;
        if (max_pair >= 2.0 - space.tol().eps_flat) {
            probe.strictly_convex = false;
            probe.witness = std::make_pair(Vector::from(pts[static_cast<size_t>(max_i)]),
                                           Vector::from(pts[static_cast<size_t>((max_i + 1) % samples)]));
        } else {
            probe.strictly_convex = true;
        }
    }

    int exposed_count = 0;
    for (const auto& y : pts)
        if (detail::exposed_light(space, y)) ++exposed_count;
    probe.exposed_fraction = static_cast<double>(exposed_count) / samples;
    return probe;
}

} // namespace nsg
