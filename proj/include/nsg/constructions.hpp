#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nsg/orthogonality.hpp"
#include "nsg/pointgeom.hpp"

namespace nsg {

// A basis of the whole space whose members are unit vectors and whose
// non-distinguished part is strongly orthogonal to the distinguished one.
struct RelativeBasis {
    std::vector<Vector> vectors;
    int distinguished = 0;
    OrthVerdict certificate;
};

struct AttainmentReport {
    double norm_estimate = 0;
    // unit samples whose image norm comes within eps_flat of the estimate
    std::vector<DVec> attainment;
    // best representative per angular cluster (radius 1e-2)
    std::vector<DVec> clusters;
    // all clusters sit on the +-x0 axis; exact vertex argmax for polyhedral
    bool only_at_pm_x0 = false;
    // largest image norm seen outside the +-x0 cones
    double best_off_cluster = 0;
    long samples = 0;
    Backend backend = Backend::floating;
    std::optional<Rat> norm_exact;
};

struct Operator {
    Matrix matrix;
    double norm_estimate = 0;
    std::vector<DVec> attainment;
    AttainmentReport report;
};

namespace detail {

constexpr double kClusterRadius = 1e-2;

// Deterministic completion of {x0} to a basis: the kernel of f is spanned
// by e_j - (f_j / f_p) e_p for j != p, with p the heaviest coordinate of f.
[[nodiscard]] inline std::vector<Vector> kernel_basis(const Functional& f, int n) {
    int pivot = 0;
    Rat best = rat_abs(f[0]);
    for (int i = 1; i < n; ++i) {
        Rat a = rat_abs(f[i]);
        if (a > best) {
            best = a;
            pivot = i;
        }
    }
    if (best == 0) throw ZeroDirection("functional is identically zero");
    std::vector<Vector> out;
    for (int j = 0; j < n; ++j) {
        if (j == pivot) continue;
        Vector v = Vector::zeros(n);
        v[j] = 1;
        v[pivot] = -f[j] / f[pivot];
        out.push_back(std::move(v));
    }
    return out;
}

[[nodiscard]] inline Matrix invert(const Matrix& b) {
    const int n = b.dim();
    Matrix a = b;
    Matrix inv = Matrix::identity(n);
    for (int col = 0; col < n; ++col) {
        int piv = -1;
        for (int r = col; r < n; ++r)
            if (a.at(r, col) != 0) {
                piv = r;
                break;
            }
        if (piv < 0) throw SingularBasis("basis matrix is singular");
        if (piv != col)
            for (int c = 0; c < n; ++c) {
                std::swap(a.at(piv, c), a.at(col, c));
                std::swap(inv.at(piv, c), inv.at(col, c));
            }
        const Rat d = a.at(col, col);
        for (int c = 0; c < n; ++c) {
            a.at(col, c) /= d;
            inv.at(col, c) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col || a.at(r, col) == 0) continue;
            const Rat m = a.at(r, col);
            for (int c = 0; c < n; ++c) {
                a.at(r, c) -= m * a.at(col, c);
                inv.at(r, c) -= m * inv.at(col, c);
            }
        }
    }
    inv.refresh();
    return inv;
}

template <typename F>
[[nodiscard]] std::pair<double, double> golden_max(F&& h, double a, double b, int iters) {
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = h(x1);
    double f2 = h(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = h(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = h(x1);
        }
    }
    return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

} // namespace detail

// Norm maximization of z -> |A z| over the unit sphere: grid scan, local
// golden-section refinement around the leading candidates, and for
// polyhedral spaces an exact vertex maximization (the map is convex, so the
// ball maximum sits on vertices).
[[nodiscard]] inline AttainmentReport operator_norm_attainment(
    const Space& space, const Matrix& a, const std::optional<Vector>& x0 = std::nullopt,
    int samples = 8192, unsigned seed = 0) {
    if (a.dim() != space.dim()) throw DimensionMismatch("operator/space dimension mismatch");
    AttainmentReport rep;
    rep.backend = space.backend();

    const auto unitize = [&space](const DVec& z) { return z.scaled(1.0 / space.norm(z)); };
    const auto value_at = [&](const DVec& z) { return space.norm(a.apply(z)); };

    std::vector<DVec> pts = space.sphere_sample(std::max(samples, 8192), seed);
    std::optional<DVec> x0d;
    if (x0) {
        x0d = unitize(x0->approx());
        pts.push_back(*x0d);
        pts.push_back(x0d->scaled(-1.0));
    }
    rep.samples = static_cast<long>(pts.size());

    std::vector<double> vals(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) vals[i] = value_at(pts[i]);

    std::vector<size_t> order(pts.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](size_t l, size_t r) { return vals[l] > vals[r]; });

    // refine up to 24 well-separated leaders along sphere tangent lines
    std::vector<DVec> leaders;
    for (size_t idx : order) {
        if (leaders.size() >= 24) break;
        bool fresh = true;
        for (const auto& l : leaders)
            if (angle_between(l, pts[idx]) < 0.05) {
                fresh = false;
                break;
            }
        if (fresh) leaders.push_back(pts[idx]);
    }
    const int n = space.dim();
    for (DVec y : leaders) {
        double bv = value_at(y);
        double radius = 0.05;
        for (int round = 0; round < 18 && radius > 1e-9; ++round, radius *= 0.5) {
            const DVec yh = y.scaled(1.0 / y.l2());
            for (int j = 0; j < n; ++j) {
                DVec d{0, 0};
                d.n = n;
                d.v[static_cast<size_t>(j)] = 1;
                const double proj = d.dot(yh);
                for (int c = 0; c < n; ++c) d.v[static_cast<size_t>(c)] -= proj * yh.v[static_cast<size_t>(c)];
                const double dl = d.l2();
                if (dl < 1e-6) continue;
                d = d.scaled(1.0 / dl);
                const auto h = [&](double t) { return value_at(unitize(y + d.scaled(t))); };
                const auto [t, v] = detail::golden_max(h, -radius, radius, 32);
                if (v > bv) {
                    bv = v;
                    y = unitize(y + d.scaled(t));
                }
            }
        }
        pts.push_back(y);
        vals.push_back(bv);
    }

    double vmax = 0;
    for (double v : vals) vmax = std::max(vmax, v);

    // exact route: maximize over the kernel's vertices in rational arithmetic
    std::optional<bool> exact_only;
    if (space.has_exact()) {
        const auto* k = space.poly();
        Rat emax = 0;
        std::vector<const Vector*> arg;
        for (const auto& v : k->vertices) {
            const Rat g = k->gauge(a.apply(v));
            if (g > emax) {
                emax = g;
                arg.clear();
            }
            if (g == emax) arg.push_back(&v);
        }
        rep.norm_exact = emax;
        vmax = std::max(vmax, to_double(emax));
        if (x0) {
            const auto is_pm_x0 = [&](const Vector& v) {
                bool plus = true;
                bool minus = true;
                for (int c = 0; c < n; ++c) {
                    plus = plus && v[c] == (*x0)[c];
                    minus = minus && v[c] == -(*x0)[c];
                }
                return plus || minus;
            };
            bool only = space.norm_exact(a.apply(*x0)) == emax;
            for (const auto* v : arg) only = only && is_pm_x0(*v);
            exact_only = only;
        }
    }
    rep.norm_estimate = vmax;

    const double cutoff = vmax - space.tol().eps_flat;
    std::vector<size_t> attain_order;
    for (size_t i = 0; i < pts.size(); ++i)
        if (vals[i] >= cutoff) attain_order.push_back(i);
    std::sort(attain_order.begin(), attain_order.end(),
              [&](size_t l, size_t r) { return vals[l] > vals[r]; });
    for (size_t i : attain_order) {
        rep.attainment.push_back(pts[i]);
        bool fresh = true;
        for (const auto& c : rep.clusters)
            if (angle_between(c, pts[i]) <= detail::kClusterRadius) {
                fresh = false;
                break;
            }
        if (fresh) rep.clusters.push_back(pts[i]);
    }

    if (x0d) {
        bool clustered = !rep.clusters.empty();
        for (const auto& c : rep.clusters) {
            const double ang = std::min(angle_between(c, *x0d), angle_between(c, x0d->scaled(-1.0)));
            clustered = clustered && ang <= detail::kClusterRadius;
        }
        rep.only_at_pm_x0 = exact_only.value_or(clustered);
        double off = 0;
        for (size_t i = 0; i < pts.size(); ++i) {
            const double ang =
                std::min(angle_between(pts[i], *x0d), angle_between(pts[i], x0d->scaled(-1.0)));
            if (ang > detail::kClusterRadius) off = std::max(off, vals[i]);
        }
        rep.best_off_cluster = off;
    }
    return rep;
}

// Completes an exposed unit vector to a basis that is strongly orthonormal
// relative to it: the remaining members span the kernel of the exposing
// functional and are normalized in the space norm.
[[nodiscard]] inline RelativeBasis basis_from_exposed(const Space& space, const Vector& x0) {
    PointClass pc = is_exposed(space, x0);
    if (!pc.exposed) {
        std::ostringstream os;
        os << "point " << x0.str() << " is not exposed, so no basis of this kind exists";
        if (!pc.extreme) os << " (the point is not even extreme)";
        throw NotExposed(os.str(), std::move(pc));
    }
    const Functional& f = *pc.exposing_functional;
    std::vector<Vector> members;
    members.push_back(x0);
    for (Vector& v : detail::kernel_basis(f, space.dim())) {
        if (space.has_exact()) {
            const Rat nv = space.norm_exact(v);
            for (int c = 0; c < space.dim(); ++c) v[c] /= nv;
        } else {
            v = Vector::from(v.approx().scaled(1.0 / space.norm(v.approx())));
        }
        members.push_back(std::move(v));
    }
    OrthVerdict cert = is_strongly_orthogonal_relative(space, members, 0);
    if (!cert.decision) {
        std::ostringstream os;
        os << "kernel basis failed the relative orthogonality certificate (margin " << cert.margin
           << ")";
        throw CertificateFailed(os.str());
    }
    return RelativeBasis{std::move(members), 0, std::move(cert)};
}

// The contraction that fixes the distinguished member and halves the rest:
// A = B diag(1, 1/2, ..., 1/2) B^{-1}, carried out in rational arithmetic.
[[nodiscard]] inline Operator operator_from_basis(const Space& space, const RelativeBasis& basis) {
    const int n = space.dim();
    if (static_cast<int>(basis.vectors.size()) != n)
        throw SingularBasis("basis must have exactly dim(space) members");
    if (basis.distinguished < 0 || basis.distinguished >= n)
        throw IndexOutOfRange("distinguished index outside the basis");

    Matrix b(n);
    std::vector<int> order{basis.distinguished};
    for (int i = 0; i < n; ++i)
        if (i != basis.distinguished) order.push_back(i);
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) b.at(r, c) = basis.vectors[static_cast<size_t>(order[static_cast<size_t>(c)])][r];
    b.refresh();

    Matrix d(n);
    d.at(0, 0) = 1;
    for (int i = 1; i < n; ++i) d.at(i, i) = Rat(1, 2);
    d.refresh();

    Operator op;
    op.matrix = b.multiply(d).multiply(detail::invert(b));
    op.report = operator_norm_attainment(space, op.matrix, basis.vectors[static_cast<size_t>(basis.distinguished)]);
    op.norm_estimate = op.report.norm_estimate;
    op.attainment = op.report.attainment;
    return op;
}

// Pulls the exposing functional back through the operator: g = f o A with f
// a norming functional of A(x0). Valid once the operator attains its norm
// only on the +-x0 axis.
[[nodiscard]] inline Functional exposing_functional_from_operator(const Space& space,
                                                                  const Operator& op,
                                                                  const Vector& x0) {
    if (!op.report.only_at_pm_x0)
        throw AttainmentNotUnique("operator attains its norm away from the distinguished axis");
    const Vector ax0 = op.matrix.apply(x0);

    const NormalCone cone = supporting_functionals(space, ax0);
    Vector sum = Vector::zeros(space.dim());
    for (const auto& gen : cone.generators)
        for (int c = 0; c < space.dim(); ++c) sum[c] += gen[c];
    for (int c = 0; c < space.dim(); ++c) sum[c] /= Rat(static_cast<int>(cone.generators.size()));
    const Functional f(sum);

    const Functional g = op.matrix.compose(f);
    const double eps_abs = space.tol().eps_abs;

    const double at_x0 = to_double(g(x0));
    if (std::abs(at_x0 - 1) > eps_abs) {
        std::ostringstream os;
        os << "composed functional takes value " << at_x0 << " at the base point, expected 1";
        throw VerificationFailed(os.str());
    }
    double dual = 0;
    if (space.has_exact()) {
        dual = to_double(space.dual_norm_exact(g));
    } else {
        dual = space.dual_norm(g.approx());
    }
    if (std::abs(dual - 1) > (space.has_exact() ? eps_abs : 1e-6)) {
        std::ostringstream os;
        os << "composed functional has dual norm " << dual << ", expected 1";
        throw VerificationFailed(os.str());
    }
    const DVec x0d = x0.approx().scaled(1.0 / space.norm(x0.approx()));
    const DVec gd = g.approx();
    for (const auto& y : space.sphere_sample(space.dim() == 2 ? 4096 : 8192)) {
        const double ang = std::min(angle_between(y, x0d), angle_between(y, x0d.scaled(-1.0)));
        if (ang <= detail::kClusterRadius) continue;
        if (std::abs(gd.dot(y)) >= 1 - space.tol().eps_flat) {
            std::ostringstream os;
            os << "composed functional nearly attains 1 away from the base point";
            throw VerificationFailed(os.str());
        }
    }
    return g;
}

// One report per equivalence condition: exposedness, existence of the
// relative basis, and existence of the norm-one operator with its exposing
// pullback. The three stand or fall together; a split verdict is a bug.
struct RoundtripReport {
    PointClass point_class;
    bool condition_exposed = false;
    bool condition_basis = false;
    bool condition_operator = false;
    std::optional<RelativeBasis> basis;
    std::optional<Operator> op;
    std::optional<Functional> functional;
    double basis_margin = 0;
    double attainment_gap = 0;
    double functional_margin = 0;
    std::string obstruction;
    Backend backend = Backend::floating;
};

[[nodiscard]] inline RoundtripReport equivalence_roundtrip(const Space& space, const Vector& x0) {
    RoundtripReport r;
    r.backend = space.backend();
    r.point_class = is_exposed(space, x0);
    r.condition_exposed = r.point_class.exposed;

    if (r.point_class.exposed) {
        try {
            r.basis = basis_from_exposed(space, x0);
        } catch (const NotExposed&) {
            throw InconsistentClassification("basis construction rejected an exposed point " +
                                             x0.str());
        } catch (const CertificateFailed& e) {
            throw InconsistentClassification(std::string("basis certificate failed at an exposed "
                                                         "point: ") +
                                             e.what());
        }
        r.condition_basis = true;
        r.basis_margin = r.basis->certificate.margin;

        r.op = operator_from_basis(space, *r.basis);
        if (!r.op->report.only_at_pm_x0)
            throw InconsistentClassification(
                "operator attainment is not confined to the exposed axis at " + x0.str());
        try {
            r.functional = exposing_functional_from_operator(space, *r.op, x0);
        } catch (const Error& e) {
            throw InconsistentClassification(std::string("functional pullback failed at an "
                                                         "exposed point: ") +
                                             e.what());
        }
        r.condition_operator = true;
        r.attainment_gap = r.op->norm_estimate - r.op->report.best_off_cluster;

        const DVec x0d = x0.approx().scaled(1.0 / space.norm(x0.approx()));
        const DVec gd = r.functional->approx();
        double off = 0;
        for (const auto& y : space.sphere_sample(space.dim() == 2 ? 4096 : 8192)) {
            const double ang = std::min(angle_between(y, x0d), angle_between(y, x0d.scaled(-1.0)));
            if (ang > detail::kClusterRadius) off = std::max(off, std::abs(gd.dot(y)));
        }
        r.functional_margin = 1 - off;
    } else {
        bool rejected = false;
        try {
            (void)basis_from_exposed(space, x0);
        } catch (const NotExposed&) {
            rejected = true;
        }
        if (!rejected)
            throw InconsistentClassification("a relative basis was constructed at the non-exposed "
                                             "point " +
                                             x0.str());
        std::ostringstream os;
        if (!r.point_class.extreme) {
            os << "point is not extreme";
            if (r.point_class.flat_witness)
                os << ": moving by " << r.point_class.flat_witness->str()
                   << " in either direction stays on the sphere";
        } else {
            os << "point is extreme but every supporting functional also attains along a flat";
            if (r.point_class.flat_witness)
                os << ": the support set contains the segment from " << x0.str() << " to "
                   << (x0 + *r.point_class.flat_witness).str();
        }
        r.obstruction = os.str();
    }
    return r;
}

} // namespace nsg
