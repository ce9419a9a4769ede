#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "nsg/errors.hpp"
#include "nsg/space.hpp"

namespace nsg {

// =====================================================================
// Birkhoff-James orthogonality.
//
// x is BJ-orthogonal to y when lambda = 0 minimizes the convex map
// lambda -> norm(x + lambda*y); strongly so when 0 is the unique
// minimizer. On exact backends both predicates reduce to the upper
// envelope of finitely many lines and are decided without tolerances.
// =====================================================================

struct DirectionalProfile {
    double min_value = 0;
    double lo = 0, hi = 0;   // minimizer interval (flat interval on float)
    double bracket = 0;      // minimum lies within [-bracket, bracket]
    long evaluations = 0;
    Backend backend = Backend::floating;
    std::optional<Rat> min_value_exact, lo_exact, hi_exact;
};

struct OrthVerdict {
    bool decision = false;
    double margin = 0;
    Backend backend = Backend::floating;
    // true when the call sits so close to the tolerance threshold that the
    // float backend cannot commit to the answer
    bool borderline = false;
    std::optional<double> witness_lambda;
    std::optional<std::vector<double>> witness_coeffs;
    std::optional<int> witness_index;
};

namespace detail {

// Golden-section minimization of a convex function on [-bracket, bracket].
// Weak unimodality (flat bottoms) is fine: the probe interval still shrinks
// into the minimizer set.
struct GoldenResult {
    double min_value;
    double argmin;
    long evaluations;
};

template <typename F>
[[nodiscard]] GoldenResult golden_min(F&& f, double bracket, long& evals) {
    constexpr double phi = 0.61803398874989484820;
    double a = -bracket, b = bracket;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = f(c), fd = f(d);
    evals += 2;
    for (int i = 0; i < 200 && (b - a) > 1e-14 * (1 + bracket); ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
        ++evals;
    }
    const double mid = 0.5 * (a + b);
    const double fm = f(mid);
    ++evals;
    GoldenResult r{fm, mid, 0};
    if (fc < r.min_value) { r.min_value = fc; r.argmin = c; }
    if (fd < r.min_value) { r.min_value = fd; r.argmin = d; }
    // the origin matters more than any other probe: seed it explicitly so
    // exact minima at 0 are never lost to rounding
    const double f0 = f(0.0);
    ++evals;
    if (f0 <= r.min_value) { r.min_value = f0; r.argmin = 0.0; }
    return r;
}

// boundary of {lambda : f(lambda) <= level} on the given side of argmin
template <typename F>
[[nodiscard]] double level_boundary(F&& f, double argmin, double outer, double level, long& evals) {
    if (f(outer) <= level) { ++evals; return outer; }
    ++evals;
    double inside = argmin, outside = outer;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (inside + outside);
        if (f(mid) <= level) inside = mid;
        else outside = mid;
        ++evals;
    }
    return inside;
}

} // namespace detail

[[nodiscard]] inline DirectionalProfile directional_min(const Space& space, const Vector& x,
                                                        const Vector& y) {
    space.check_dim(x.dim());
    space.check_dim(y.dim());
    const DVec xd = x.approx(), yd = y.approx();
    const double ny = space.norm(yd);
    if (ny <= 0) throw ZeroDirection("directional profile needs a nonzero direction");
    const double nx = space.norm(xd);
    DirectionalProfile p;
    // any minimizer satisfies |lambda| <= 2*norm(x)/norm(y) by the triangle
    // inequality, so the bracket is complete
    p.bracket = 2.0 * nx / ny + 1e-12;

    if (space.has_exact()) {
        const auto em = space.poly()->envelope_min(Vector(x), Vector(y));
        p.backend = Backend::exact;
        p.min_value_exact = em.min_value;
        p.lo_exact = em.lo;
        p.hi_exact = em.hi;
        p.min_value = to_double(em.min_value);
        p.lo = to_double(em.lo);
        p.hi = to_double(em.hi);
        p.evaluations = em.evaluations;
        return p;
    }

    long evals = 0;
    auto f = [&](double lam) { return space.norm(xd + yd.scaled(lam)); };
    const auto g = detail::golden_min(f, p.bracket, evals);
    p.min_value = g.min_value;
    const double level = g.min_value + space.tol().eps_flat;
    p.lo = detail::level_boundary(f, g.argmin, -p.bracket, level, evals);
    p.hi = detail::level_boundary(f, g.argmin, p.bracket, level, evals);
    p.evaluations = evals;
    return p;
}

[[nodiscard]] inline OrthVerdict is_bj_orthogonal(const Space& space, const Vector& x,
                                                  const Vector& y) {
    space.check_dim(x.dim());
    space.check_dim(y.dim());
    if (x.is_zero()) throw ZeroLeft("left argument of an orthogonality query must be nonzero");
    OrthVerdict v;
    if (y.is_zero()) {
        // every vector is BJ-orthogonal to 0
        v.decision = true;
        v.margin = 0;
        v.backend = space.backend();
        return v;
    }
    const auto p = directional_min(space, x, y);
    v.backend = p.backend;
    if (p.backend == Backend::exact) {
        const Rat nx = space.norm_exact(x);
        v.decision = *p.min_value_exact == nx;
        v.margin = to_double(*p.min_value_exact - nx);
        if (!v.decision) v.witness_lambda = 0.5 * (p.lo + p.hi);
        return v;
    }
    const double nx = space.norm(x.approx());
    v.margin = p.min_value - nx;
    v.decision = v.margin >= -space.tol().eps_abs * nx;
    if (!v.decision) v.witness_lambda = 0.5 * (p.lo + p.hi);
    v.borderline = !v.decision && v.margin >= -16 * space.tol().eps_abs * nx;
    return v;
}

namespace detail {

// Scaled strictness of lambda -> norm(x + lambda*y) at 0: the worst ratio
// (f(tau) - f(0)) / (tau * norm(y)) over a geometric probe ladder from
// tau_min up to the full bracket, both signs. Positive bounded-away ratios
// certify a strict minimum at the probe resolution; a flat side drives the
// ratio to 0.
struct Strictness {
    double margin;     // min scaled excess over the ladder
    double worst_tau;  // signed probe where it happened
};

[[nodiscard]] inline Strictness sb_strictness(const Space& space, const DVec& xd, const DVec& yd) {
    const double nx = space.norm(xd), ny = space.norm(yd);
    const double scale = nx / ny;
    Strictness s{std::numeric_limits<double>::infinity(), 0};
    for (double tau = space.tol().tau_min * scale; tau <= 2.0 * scale; tau *= 2) {
        for (const double signed_tau : {tau, -tau}) {
            const double excess = space.norm(xd + yd.scaled(signed_tau)) - nx;
            const double ratio = excess / (tau * ny);
            if (ratio < s.margin) {
                s.margin = ratio;
                s.worst_tau = signed_tau;
            }
        }
    }
    return s;
}

} // namespace detail

[[nodiscard]] inline OrthVerdict is_sb_orthogonal(const Space& space, const Vector& x,
                                                  const Vector& y) {
    space.check_dim(x.dim());
    space.check_dim(y.dim());
    if (x.is_zero()) throw ZeroLeft("left argument of an orthogonality query must be nonzero");
    OrthVerdict v;
    v.backend = space.backend();
    if (y.is_zero()) {
        // norm(x + lambda*0) is constant, so 0 is never the unique minimizer
        v.decision = false;
        v.margin = 0;
        return v;
    }

    if (space.has_exact()) {
        const auto em = space.poly()->envelope_min(Vector(x), Vector(y));
        const Rat nx = space.norm_exact(x);
        v.decision = em.min_value == nx && em.lo == 0 && em.hi == 0;
        if (!v.decision) {
            // either the minimum undercuts norm(x) or the minimizer set has
            // positive width; both give a concrete witness
            const Rat w = em.lo != 0 ? em.lo : em.hi;
            v.witness_lambda = to_double(w != 0 ? w : (em.lo + em.hi) / 2);
            v.margin = to_double(em.min_value - nx);
            if (em.min_value == nx) v.margin = 0;
            return v;
        }
        // decision is exact; report the float-style strictness as the margin
        const auto s = detail::sb_strictness(space, x.approx(), y.approx());
        v.margin = s.margin;
        return v;
    }

    const auto bj = is_bj_orthogonal(space, x, y);
    const auto s = detail::sb_strictness(space, x.approx(), y.approx());
    v.margin = s.margin;
    v.decision = bj.decision && s.margin > space.tol().eps_flat;
    if (!v.decision) {
        v.witness_lambda = bj.decision ? s.worst_tau : *bj.witness_lambda;
        v.borderline = bj.decision && s.margin > space.tol().eps_flat / 16;
    } else {
        v.borderline = s.margin < 16 * space.tol().eps_flat;
    }
    return v;
}

// Hemisphere direction grids in coefficient space: every direction d gives a
// combined vector y_d = sum d_j s_j to run the strictness probe against.
namespace detail {

// Nonzero coefficients c with sum c_j s_j ~ 0, or nullopt when the spans are
// numerically independent. Plain double Gaussian elimination; k <= 3.
[[nodiscard]] inline std::optional<std::vector<double>> null_coeffs(const std::vector<DVec>& spans) {
    const int k = static_cast<int>(spans.size());
    const int n = spans.front().n;
    double M[4][4] = {};
    double scale = 0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < k; ++c) {
            M[r][c] = spans[static_cast<size_t>(c)].v[static_cast<size_t>(r)];
            scale = std::max(scale, std::fabs(M[r][c]));
        }
    const double tol = 1e-9 * (1 + scale);
    int pivot_col[4] = {-1, -1, -1, -1};
    int rank = 0;
    for (int col = 0; col < k && rank < n; ++col) {
        int piv = -1;
        double best = tol;
        for (int r = rank; r < n; ++r)
            if (std::fabs(M[r][col]) > best) { best = std::fabs(M[r][col]); piv = r; }
        if (piv < 0) continue;
        for (int c = 0; c < k; ++c) std::swap(M[piv][c], M[rank][c]);
        for (int r = 0; r < n; ++r) {
            if (r == rank) continue;
            const double f = M[r][col] / M[rank][col];
            for (int c = 0; c < k; ++c) M[r][c] -= f * M[rank][c];
        }
        pivot_col[rank] = col;
        ++rank;
    }
    int free_col = -1;
    for (int col = 0; col < k && free_col < 0; ++col) {
        bool is_pivot = false;
        for (int r = 0; r < rank; ++r) is_pivot = is_pivot || pivot_col[r] == col;
        if (!is_pivot) free_col = col;
    }
    if (free_col < 0) return std::nullopt;
    std::vector<double> z(static_cast<size_t>(k), 0.0);
    z[static_cast<size_t>(free_col)] = 1.0;
    for (int r = 0; r < rank; ++r)
        z[static_cast<size_t>(pivot_col[r])] = -M[r][free_col] / M[r][pivot_col[r]];
    return z;
}

[[nodiscard]] inline std::vector<std::vector<double>> coefficient_directions(int k, int grid_2d,
                                                                             int grid_3d) {
    std::vector<std::vector<double>> dirs;
    if (k == 1) {
        dirs.push_back({1.0});
    } else if (k == 2) {
        const int m = grid_2d >= 8 ? grid_2d / 4 : 720; // half circle resolution
        const int half = 720 > m ? 720 : m;
        for (int j = 0; j < half; ++j) {
            const double th = 3.14159265358979323846 * j / half;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
    } else {
        const int count = grid_3d >= 1024 ? grid_3d : 8192;
        const double ga = kTwoPi * (1.0 - 0.61803398874989484820);
        for (int i = 0; i < count; ++i) {
            const double z = (i + 0.5) / count; // upper hemisphere only
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            dirs.push_back({r * std::cos(ga * i), r * std::sin(ga * i), z});
        }
    }
    // canonical sign patterns catch axis-aligned and diagonal flats exactly
    std::vector<std::vector<double>> canon;
    std::vector<double> cur(static_cast<size_t>(k), 0.0);
    const double opts[3] = {-1.0, 0.0, 1.0};
    const int total = static_cast<int>(std::pow(3, k));
    for (int code = 0; code < total; ++code) {
        int c = code;
        bool nonzero = false;
        for (int j = 0; j < k; ++j) {
            cur[static_cast<size_t>(j)] = opts[c % 3];
            if (cur[static_cast<size_t>(j)] != 0) nonzero = true;
            c /= 3;
        }
        if (nonzero) dirs.push_back(cur);
    }
    return dirs;
}

} // namespace detail

// Strong orthogonality of the family relative to members[i0]:
//   norm(members[i0]) < norm(members[i0] + sum_{j != i0} lambda_j members[j])
// for every nonzero coefficient vector lambda.
[[nodiscard]] inline OrthVerdict is_strongly_orthogonal_relative(const Space& space,
                                                                 const std::vector<Vector>& members,
                                                                 int i0) {
    if (members.size() < 2)
        throw InvalidSpec("relative orthogonality needs at least two members");
    if (static_cast<int>(members.size()) > space.dim())
        throw SetTooLarge("a strongly orthogonal family cannot exceed the space dimension " +
                          std::to_string(space.dim()));
    if (i0 < 0 || i0 >= static_cast<int>(members.size()))
        throw IndexOutOfRange("distinguished index " + std::to_string(i0) +
                              " outside the member list");
    for (const auto& m : members) {
        space.check_dim(m.dim());
        if (m.is_zero()) throw ZeroDirection("family members must be nonzero");
    }

    const Vector& x0 = members[static_cast<size_t>(i0)];
    std::vector<Vector> spans;
    for (int j = 0; j < static_cast<int>(members.size()); ++j)
        if (j != i0) spans.push_back(members[static_cast<size_t>(j)]);
    const int k = static_cast<int>(spans.size());

    OrthVerdict v;
    v.backend = space.backend();

    if (space.has_exact()) {
        const auto sr = space.poly()->section_only_origin(x0, spans);
        v.decision = sr.only_origin;
        v.margin = sr.only_origin ? 1.0 : 0.0;
        if (!sr.only_origin && sr.witness_coeffs) {
            std::vector<double> w;
            for (const auto& c : *sr.witness_coeffs) w.push_back(to_double(c));
            v.witness_coeffs = std::move(w);
        }
        return v;
    }

    const DVec x0d = x0.approx();
    std::vector<DVec> spans_d;
    for (const auto& s : spans) spans_d.push_back(s.approx());
    const double nx0 = space.norm(x0d);

    // rank pre-check mirrors the exact backend: dependent spans fail outright
    if (auto nc = detail::null_coeffs(spans_d)) {
        v.decision = false;
        v.margin = 0;
        v.witness_coeffs = std::move(*nc);
        return v;
    }

    const auto dirs = detail::coefficient_directions(k, space.tol().grid_2d, space.tol().grid_3d);
    v.decision = true;
    v.margin = std::numeric_limits<double>::infinity();
    // across all failing directions, ship the deepest norm decrease found
    double witness_value = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) {
        DVec yd = spans_d[0].scaled(d[0]);
        for (int j = 1; j < k; ++j) yd = yd + spans_d[static_cast<size_t>(j)].scaled(d[static_cast<size_t>(j)]);
        const double nyd = space.norm(yd);
        if (nyd <= 1e-9 * nx0) {
            // linear dependence among the spans; the direction itself is the witness
            v.decision = false;
            v.margin = 0;
            v.witness_coeffs = d;
            return v;
        }
        const auto s = detail::sb_strictness(space, x0d, yd);
        if (s.margin < v.margin) v.margin = s.margin;
        if (s.margin <= space.tol().eps_flat) {
            v.decision = false;
            const auto prof = directional_min(space, x0, Vector::from(yd));
            const double lam = 0.5 * (prof.lo + prof.hi);
            if (prof.min_value < witness_value) {
                witness_value = prof.min_value;
                std::vector<double> w;
                for (const auto& dj : d) w.push_back(dj * lam);
                v.witness_coeffs = std::move(w);
            }
        }
    }
    if (!v.decision) {
        v.borderline = v.margin > space.tol().eps_flat / 16;
        return v;
    }
    v.borderline = v.margin < 16 * space.tol().eps_flat;
    return v;
}

// Full family check: relative strong orthogonality from every member in turn.
// Fails fast and reports the first index that breaks.
[[nodiscard]] inline OrthVerdict is_strongly_orthogonal_set(const Space& space,
                                                            const std::vector<Vector>& members) {
    OrthVerdict v;
    v.backend = space.backend();
    v.decision = true;
    v.margin = std::numeric_limits<double>::infinity();
    for (int i0 = 0; i0 < static_cast<int>(members.size()); ++i0) {
        auto r = is_strongly_orthogonal_relative(space, members, i0);
        v.margin = std::min(v.margin, r.margin);
        v.borderline = v.borderline || r.borderline;
        if (!r.decision) {
            v.decision = false;
            v.witness_index = i0;
            v.witness_coeffs = r.witness_coeffs;
            v.borderline = r.borderline;
            return v;
        }
    }
    return v;
}

} // namespace nsg
