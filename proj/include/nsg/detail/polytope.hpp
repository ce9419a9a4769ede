#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nsg/errors.hpp"
#include "nsg/vector.hpp"

namespace nsg::detail {

// Small dense rational linear algebra. Dimensions never exceed 4, so plain
// Gaussian elimination with exact arithmetic is both fast and bulletproof.

using QRow = std::vector<Rat>;
using QMat = std::vector<QRow>;

// Solves M c = rhs for square M; returns nullopt when singular.
[[nodiscard]] inline std::optional<QRow> q_solve(QMat M, QRow rhs) {
    const int k = static_cast<int>(M.size());
    for (int col = 0; col < k; ++col) {
        int piv = -1;
        for (int r = col; r < k; ++r)
            if (M[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) { piv = r; break; }
        if (piv < 0) return std::nullopt;
        std::swap(M[static_cast<size_t>(piv)], M[static_cast<size_t>(col)]);
        std::swap(rhs[static_cast<size_t>(piv)], rhs[static_cast<size_t>(col)]);
        const Rat d = M[static_cast<size_t>(col)][static_cast<size_t>(col)];
        for (int r = col + 1; r < k; ++r) {
            const Rat factor = M[static_cast<size_t>(r)][static_cast<size_t>(col)] / d;
            if (factor == 0) continue;
            for (int c = col; c < k; ++c)
                M[static_cast<size_t>(r)][static_cast<size_t>(c)] -= factor * M[static_cast<size_t>(col)][static_cast<size_t>(c)];
            rhs[static_cast<size_t>(r)] -= factor * rhs[static_cast<size_t>(col)];
        }
    }
    QRow x(static_cast<size_t>(k));
    for (int r = k - 1; r >= 0; --r) {
        Rat s = rhs[static_cast<size_t>(r)];
        for (int c = r + 1; c < k; ++c) s -= M[static_cast<size_t>(r)][static_cast<size_t>(c)] * x[static_cast<size_t>(c)];
        x[static_cast<size_t>(r)] = s / M[static_cast<size_t>(r)][static_cast<size_t>(r)];
    }
    return x;
}

[[nodiscard]] inline int q_rank(QMat M) {
    if (M.empty()) return 0;
    const int rows = static_cast<int>(M.size());
    const int cols = static_cast<int>(M.front().size());
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (M[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(M[static_cast<size_t>(piv)], M[static_cast<size_t>(rank)]);
        const Rat d = M[static_cast<size_t>(rank)][static_cast<size_t>(col)];
        for (int r = rank + 1; r < rows; ++r) {
            const Rat factor = M[static_cast<size_t>(r)][static_cast<size_t>(col)] / d;
            if (factor == 0) continue;
            for (int c = col; c < cols; ++c)
                M[static_cast<size_t>(r)][static_cast<size_t>(c)] -= factor * M[static_cast<size_t>(rank)][static_cast<size_t>(c)];
        }
        ++rank;
    }
    return rank;
}

// One nonzero vector of the nullspace of M (rows x cols), or nullopt when M
// has full column rank.
[[nodiscard]] inline std::optional<QRow> q_null_vector(QMat M) {
    if (M.empty()) return std::nullopt;
    const int rows = static_cast<int>(M.size());
    const int cols = static_cast<int>(M.front().size());
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < cols && rank < rows; ++col) {
        int piv = -1;
        for (int r = rank; r < rows; ++r)
            if (M[static_cast<size_t>(r)][static_cast<size_t>(col)] != 0) { piv = r; break; }
        if (piv < 0) continue;
        std::swap(M[static_cast<size_t>(piv)], M[static_cast<size_t>(rank)]);
        const Rat d = M[static_cast<size_t>(rank)][static_cast<size_t>(col)];
        for (int r = 0; r < rows; ++r) {
            if (r == rank) continue;
            const Rat factor = M[static_cast<size_t>(r)][static_cast<size_t>(col)] / d;
            if (factor == 0) continue;
            for (int c = 0; c < cols; ++c)
                M[static_cast<size_t>(r)][static_cast<size_t>(c)] -= factor * M[static_cast<size_t>(rank)][static_cast<size_t>(c)];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    // first free column drives the null vector
    int free_col = -1;
    for (int col = 0; col < cols; ++col)
        if (std::find(pivot_col.begin(), pivot_col.end(), col) == pivot_col.end()) { free_col = col; break; }
    if (free_col < 0) return std::nullopt;
    QRow z(static_cast<size_t>(cols), Rat(0));
    z[static_cast<size_t>(free_col)] = 1;
    for (int r = 0; r < rank; ++r) {
        const int pc = pivot_col[static_cast<size_t>(r)];
        z[static_cast<size_t>(pc)] = -M[static_cast<size_t>(r)][static_cast<size_t>(free_col)] / M[static_cast<size_t>(r)][static_cast<size_t>(pc)];
    }
    return z;
}

// Iterates over all size-k index subsets of {0..m-1}.
class SubsetIter {
public:
    SubsetIter(int m, int k) : m_(m), k_(k), idx_(static_cast<size_t>(k)) {
        for (int i = 0; i < k; ++i) idx_[static_cast<size_t>(i)] = i;
        done_ = k > m;
    }
    [[nodiscard]] bool done() const { return done_; }
    [[nodiscard]] const std::vector<int>& operator*() const { return idx_; }
    void next() {
        int i = k_ - 1;
        while (i >= 0 && idx_[static_cast<size_t>(i)] == m_ - k_ + i) --i;
        if (i < 0) { done_ = true; return; }
        ++idx_[static_cast<size_t>(i)];
        for (int j = i + 1; j < k_; ++j) idx_[static_cast<size_t>(j)] = idx_[static_cast<size_t>(j - 1)] + 1;
    }
private:
    int m_, k_;
    std::vector<int> idx_;
    bool done_ = false;
};

// =====================================================================
// Exact description of a symmetric polytope unit ball.
//
// Facet functionals are the vertices of the polar body {f : f.v <= 1 for
// all vertices v}, found by enumerating n-subsets of the vertex list. With
// them the gauge is a plain max of dot products and every predicate that
// matters downstream (directional minimization, section extremization,
// vertex tests) becomes exact.
// =====================================================================
class PolytopeKernel {
public:
    int n = 0;
    std::vector<Vector> points;       // deduped input vertex list
    std::vector<Vector> vertices;     // canonical extreme points
    std::vector<Functional> facets;   // f with ball = {x : f(x) <= 1}; symmetric list
    std::vector<DVec> facets_d;
    std::vector<DVec> vertices_d;

    static PolytopeKernel build(const std::vector<Vector>& input) {
        PolytopeKernel k;
        if (input.empty()) throw InvalidSpec("polyhedral space: empty vertex list");
        k.n = input.front().dim();
        for (const auto& v : input)
            if (v.dim() != k.n) throw InvalidSpec("polyhedral space: mixed vertex dimensions");

        // dedupe exactly
        for (const auto& v : input) {
            bool dup = false;
            for (const auto& w : k.points)
                if (w == v) { dup = true; break; }
            if (!dup) k.points.push_back(v);
        }

        for (const auto& v : k.points) {
            if (v.is_zero()) throw InvalidSpec("polyhedral space: origin listed as a vertex");
            bool has_mirror = false;
            for (const auto& w : k.points)
                if (w == -v) { has_mirror = true; break; }
            if (!has_mirror)
                throw InvalidSpec("vertices not symmetric: missing -" + v.str());
        }

        {
            QMat rows;
            for (const auto& v : k.points) {
                QRow r;
                for (int i = 0; i < k.n; ++i) r.push_back(v[i]);
                rows.push_back(std::move(r));
            }
            if (q_rank(rows) < k.n)
                throw InvalidSpec("polyhedral space: vertices do not span R^" + std::to_string(k.n));
        }

        const int m = static_cast<int>(k.points.size());
        if (k.n >= 3 && m > 48)
            throw InvalidSpec("polyhedral space: too many vertices for exact facet enumeration");

        // polar vertices = facet functionals
        std::set<std::vector<Rat>> seen;
        for (SubsetIter it(m, k.n); !it.done(); it.next()) {
            QMat M;
            QRow rhs(static_cast<size_t>(k.n), Rat(1));
            for (int i : *it) {
                QRow row;
                for (int c = 0; c < k.n; ++c) row.push_back(k.points[static_cast<size_t>(i)][c]);
                M.push_back(std::move(row));
            }
            auto f = q_solve(std::move(M), std::move(rhs));
            if (!f) continue;
            bool feasible = true;
            for (const auto& w : k.points) {
                Rat s = 0;
                for (int c = 0; c < k.n; ++c) s += (*f)[static_cast<size_t>(c)] * w[c];
                if (s > 1) { feasible = false; break; }
            }
            if (!feasible) continue;
            if (seen.insert(*f).second) {
                Vector coeffs = Vector::zeros(k.n);
                for (int c = 0; c < k.n; ++c) coeffs[c] = (*f)[static_cast<size_t>(c)];
                k.facets.emplace_back(std::move(coeffs));
            }
        }
        if (k.facets.empty())
            throw InvalidSpec("polyhedral space: facet enumeration failed (degenerate hull)");

        for (const auto& f : k.facets) k.facets_d.push_back(f.approx());

        // canonical vertices: points on the sphere whose active facets span R^n
        for (const auto& v : k.points)
            if (k.gauge(v) == 1 && k.is_vertex_on_sphere(v)) {
                k.vertices.push_back(v);
                k.vertices_d.push_back(v.approx());
            }
        if (k.vertices.empty())
            throw InvalidSpec("polyhedral space: no extreme points found");
        return k;
    }

    [[nodiscard]] Rat gauge(const Vector& x) const {
        Rat best = 0;
        for (const auto& f : facets) {
            Rat s = f(x);
            if (s > best) best = s;
        }
        return best;
    }

    // abs() keeps the float evaluation bitwise sign-symmetric; legal because
    // the facet list is symmetric.
    [[nodiscard]] double gauge_d(const DVec& x) const {
        double best = 0;
        for (const auto& f : facets_d) best = std::max(best, std::fabs(f.dot(x)));
        return best;
    }

    [[nodiscard]] std::vector<int> active_facets_exact(const Vector& x, const Rat& level) const {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(facets.size()); ++i)
            if (facets[static_cast<size_t>(i)](x) == level) idx.push_back(i);
        return idx;
    }

    [[nodiscard]] std::vector<int> active_facets_approx(const DVec& x, double level, double eps) const {
        std::vector<int> idx;
        for (int i = 0; i < static_cast<int>(facets_d.size()); ++i)
            if (facets_d[static_cast<size_t>(i)].dot(x) >= level - eps) idx.push_back(i);
        return idx;
    }

    [[nodiscard]] int rank_of_facets(const std::vector<int>& idx) const {
        QMat rows;
        for (int i : idx) {
            QRow r;
            for (int c = 0; c < n; ++c) r.push_back(facets[static_cast<size_t>(i)][c]);
            rows.push_back(std::move(r));
        }
        return q_rank(std::move(rows));
    }

    [[nodiscard]] bool is_vertex_on_sphere(const Vector& x) const {
        return rank_of_facets(active_facets_exact(x, Rat(1))) == n;
    }

    // For a sphere point that is not a vertex: a direction z with
    // gauge(x +- z) <= 1, built from the nullspace of the active facets.
    [[nodiscard]] std::optional<Vector> flat_direction(const Vector& x) const {
        const auto active = active_facets_exact(x, gauge(x));
        QMat rows;
        for (int i : active) {
            QRow r;
            for (int c = 0; c < n; ++c) r.push_back(facets[static_cast<size_t>(i)][c]);
            rows.push_back(std::move(r));
        }
        auto z = q_null_vector(std::move(rows));
        if (!z) return std::nullopt;
        Vector dir = Vector::zeros(n);
        for (int c = 0; c < n; ++c) dir[c] = (*z)[static_cast<size_t>(c)];
        // largest step that keeps x +- eps*z inside the ball
        Rat eps = 1;
        const Rat g = gauge(x);
        for (const auto& f : facets) {
            const Rat fz = f(dir);
            if (fz == 0) continue;
            const Rat room = (Rat(1) - f(x)) / rat_abs(fz);
            if (room > 0 && room < eps) eps = room;
            // room == 0 would mean an active facet escaped the nullspace
        }
        return dir.scaled(eps);
    }

    // ---- exact minimization of lambda -> gauge(x + lambda y) ----
    // The map is the upper envelope of the lines a_f + lambda b_f; its
    // minimum sits at a crossing of two envelope lines, so scanning all
    // pairwise crossings is exact and complete.
    struct EnvelopeMin {
        Rat min_value;
        Rat lo, hi; // minimizer interval
        long evaluations = 0;
    };

    [[nodiscard]] EnvelopeMin envelope_min(const Vector& x, const Vector& y) const {
        const int F = static_cast<int>(facets.size());
        std::vector<Rat> a(static_cast<size_t>(F)), b(static_cast<size_t>(F));
        for (int i = 0; i < F; ++i) {
            a[static_cast<size_t>(i)] = facets[static_cast<size_t>(i)](x);
            b[static_cast<size_t>(i)] = facets[static_cast<size_t>(i)](y);
        }
        auto envelope = [&](const Rat& lam) {
            Rat best = a[0] + lam * b[0];
            for (int i = 1; i < F; ++i) {
                Rat s = a[static_cast<size_t>(i)] + lam * b[static_cast<size_t>(i)];
                if (s > best) best = s;
            }
            return best;
        };

        EnvelopeMin r;
        r.min_value = envelope(0);
        r.evaluations = 1;
        for (int i = 0; i < F; ++i)
            for (int j = i + 1; j < F; ++j) {
                if (b[static_cast<size_t>(i)] == b[static_cast<size_t>(j)]) continue;
                const Rat lam = (a[static_cast<size_t>(i)] - a[static_cast<size_t>(j)]) /
                                (b[static_cast<size_t>(j)] - b[static_cast<size_t>(i)]);
                const Rat val = envelope(lam);
                ++r.evaluations;
                if (val < r.min_value) r.min_value = val;
            }

        bool lo_set = false, hi_set = false;
        for (int i = 0; i < F; ++i) {
            if (b[static_cast<size_t>(i)] == 0) continue;
            const Rat bound = (r.min_value - a[static_cast<size_t>(i)]) / b[static_cast<size_t>(i)];
            if (b[static_cast<size_t>(i)] > 0) {
                if (!hi_set || bound < r.hi) { r.hi = bound; hi_set = true; }
            } else {
                if (!lo_set || bound > r.lo) { r.lo = bound; lo_set = true; }
            }
        }
        if (!lo_set || !hi_set)
            throw Error("internal: unbounded envelope for nonzero direction");
        return r;
    }

    // ---- exact section test for the relative-orthogonality predicate ----
    // Q = {c : gauge(x0 + sum c_j s_j) <= gauge(x0)} is a bounded polytope
    // containing 0; the predicate holds iff Q = {0}. We enumerate Q's
    // vertices (k-subsets of the facet constraints) and look for a nonzero
    // one.
    struct SectionResult {
        bool only_origin;
        std::optional<std::vector<Rat>> witness_coeffs; // length k, nonzero
    };

    [[nodiscard]] SectionResult section_only_origin(const Vector& x0,
                                                    const std::vector<Vector>& spans) const {
        const int k = static_cast<int>(spans.size());
        const Rat r = gauge(x0);

        // linear dependence among the spans falsifies the predicate outright
        {
            QMat cols; // n x k matrix, columns are the spans
            for (int row = 0; row < n; ++row) {
                QRow qr;
                for (int j = 0; j < k; ++j) qr.push_back(spans[static_cast<size_t>(j)][row]);
                cols.push_back(std::move(qr));
            }
            if (auto z = q_null_vector(std::move(cols))) return {false, *z};
        }

        const int F = static_cast<int>(facets.size());
        QMat beta(static_cast<size_t>(F));
        QRow rhs(static_cast<size_t>(F));
        for (int i = 0; i < F; ++i) {
            for (int j = 0; j < k; ++j)
                beta[static_cast<size_t>(i)].push_back(facets[static_cast<size_t>(i)](spans[static_cast<size_t>(j)]));
            rhs[static_cast<size_t>(i)] = r - facets[static_cast<size_t>(i)](x0);
        }

        bool found_any = false;
        for (SubsetIter it(F, k); !it.done(); it.next()) {
            QMat M;
            QRow b;
            for (int i : *it) {
                M.push_back(beta[static_cast<size_t>(i)]);
                b.push_back(rhs[static_cast<size_t>(i)]);
            }
            auto c = q_solve(std::move(M), std::move(b));
            if (!c) continue;
            bool feasible = true;
            for (int i = 0; i < F && feasible; ++i) {
                Rat s = 0;
                for (int j = 0; j < k; ++j) s += beta[static_cast<size_t>(i)][static_cast<size_t>(j)] * (*c)[static_cast<size_t>(j)];
                if (s > rhs[static_cast<size_t>(i)]) feasible = false;
            }
            if (!feasible) continue;
            found_any = true;
            bool zero = true;
            for (const auto& cj : *c)
                if (cj != 0) { zero = false; break; }
            if (!zero) return {false, *c};
        }
        if (!found_any)
            throw Error("internal: section vertex enumeration found nothing");
        return {true, std::nullopt};
    }
};

} // namespace nsg::detail
