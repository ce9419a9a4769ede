#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nsg/errors.hpp"
#include "nsg/space_spec.hpp"
#include "nsg/vector.hpp"

namespace nsg::detail {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

[[nodiscard]] inline double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a < 0) a += kTwoPi;
    return a;
}

// CCW angular distance from a to b, in [0, 2pi)
[[nodiscard]] inline double ccw_gap(double a, double b) { return wrap_angle(b - a); }

[[nodiscard]] inline double cross2(const DVec& a, const DVec& b) {
    return a.v[0] * b.v[1] - a.v[1] * b.v[0];
}

[[nodiscard]] inline DVec unit2(const DVec& a) {
    const double h = std::hypot(a.v[0], a.v[1]);
    return DVec{a.v[0] / h, a.v[1] / h};
}

// =====================================================================
// Resolved boundary piece of a 2-d gauge body. Input pieces carry infinite
// carriers (lines, circles, parabolas) plus axis bounds; resolution cuts
// them down to concrete arcs with endpoints in counterclockwise order.
// =====================================================================
struct RPiece {
    enum class Kind { segment, circle, parabola };
    Kind kind;
    DVec a{0, 0}, b{0, 0}; // endpoints, body traversal a -> b is CCW
    double th0 = 0, th1 = 0; // origin angles of a and b, th1 in (th0, th0 + 2pi]

    // circle
    DVec center{0, 0};
    double radius = 0;
    double phi0 = 0, phi1 = 0; // angles around center, CCW from a to b

    // parabola: squared == 'x' means x^2 = pa + pb*y, parameter is x;
    // squared == 'y' mirrors the roles
    char squared = 'x';
    double pa = 0, pb = 0;
    double t0 = 0, t1 = 0; // parameter range, t0 < t1

    int spec_index = -1;
};

[[nodiscard]] inline DVec parabola_point(const RPiece& p, double t) {
    const double other = (t * t - p.pa) / p.pb;
    return p.squared == 'x' ? DVec{t, other} : DVec{other, t};
}

[[nodiscard]] inline double parabola_param(const RPiece& p, const DVec& pt) {
    return p.squared == 'x' ? pt.v[0] : pt.v[1];
}

// Outward normal (unit) at a point of the piece. Sign is fixed so that the
// support value n.P stays positive, which holds for any boundary point of a
// symmetric convex body.
[[nodiscard]] inline DVec outward_normal(const RPiece& p, const DVec& pt) {
    DVec n{0, 0};
    switch (p.kind) {
    case RPiece::Kind::segment: {
        const DVec t = p.b - p.a;
        n = DVec{t.v[1], -t.v[0]};
        break;
    }
    case RPiece::Kind::circle:
        n = pt - p.center;
        break;
    case RPiece::Kind::parabola: {
        const double s = parabola_param(p, pt);
        n = p.squared == 'x' ? DVec{2 * s, -p.pb} : DVec{-p.pb, 2 * s};
        break;
    }
    }
    n = unit2(n);
    if (n.dot(pt) < 0) n = -n;
    return n;
}

// =====================================================================
// Gauge body kernel: resolved CCW piece chain covering all directions,
// analytic ray intersection per piece, support maximization per piece.
// =====================================================================
class Gauge2dKernel {
public:
    std::vector<RPiece> pieces; // sorted by th0
    struct Junction {
        DVec point{0, 0};
        int left = 0, right = 0; // piece ending here / piece starting here
        DVec n_left{0, 0}, n_right{0, 0};
    };
    std::vector<Junction> junctions;

    static constexpr double kEps = 1e-9;

    // ---- construction -------------------------------------------------

    static Gauge2dKernel build(const Gauge2dSpec& spec) {
        Gauge2dKernel k;
        int index = 0;
        for (const auto& ps : spec.pieces) {
            k.pieces.push_back(resolve(ps, index));
            ++index;
        }
        if (k.pieces.empty()) throw InvalidSpec("gauge2d: no pieces");
        std::sort(k.pieces.begin(), k.pieces.end(),
                  [](const RPiece& x, const RPiece& y) { return x.th0 < y.th0; });
        k.check_closure();
        k.collect_junctions();
        k.check_symmetry_and_convexity();
        return k;
    }

    // ---- gauge ---------------------------------------------------------

    // Sign canonicalization makes gauge(-x) bitwise equal to gauge(x).
    [[nodiscard]] double gauge(DVec x) const {
        if (x.near_zero(0.0)) return 0.0;
        if (x.v[1] < 0 || (x.v[1] == 0 && x.v[0] < 0)) x = -x;
        return gauge_raw(x);
    }

    [[nodiscard]] double gauge_raw(const DVec& x) const {
        const double theta = wrap_angle(std::atan2(x.v[1], x.v[0]));
        const RPiece& p = pieces[static_cast<size_t>(piece_index_at(theta))];
        const double t = ray_hit(p, x);
        return 1.0 / t;
    }

    [[nodiscard]] int piece_index_at(double theta) const {
        // last piece whose th0 is <= theta; below the first th0 we are in the
        // wrap-around range of the final piece
        int lo = 0, hi = static_cast<int>(pieces.size()) - 1;
        if (theta < pieces.front().th0) return hi;
        while (lo < hi) {
            const int mid = (lo + hi + 1) / 2;
            if (pieces[static_cast<size_t>(mid)].th0 <= theta) lo = mid;
            else hi = mid - 1;
        }
        return lo;
    }

    [[nodiscard]] DVec boundary_point(double theta) const {
        const DVec u{std::cos(theta), std::sin(theta)};
        const RPiece& p = pieces[static_cast<size_t>(piece_index_at(wrap_angle(theta)))];
        return u.scaled(ray_hit(p, u));
    }

    // Smallest positive t with t*x on the piece; throws when the ray misses,
    // which signals invalid geometry.
    [[nodiscard]] static double ray_hit(const RPiece& p, const DVec& x) {
        switch (p.kind) {
        case RPiece::Kind::segment: {
            // t*x = a + s*(b - a)
            const DVec d = p.b - p.a;
            const double det = -x.v[0] * d.v[1] + x.v[1] * d.v[0];
            if (std::fabs(det) < 1e-300) break;
            const double t = (p.a.v[1] * d.v[0] - p.a.v[0] * d.v[1]) / det;
            if (t <= 0) break;
            const double s = std::fabs(d.v[0]) >= std::fabs(d.v[1])
                                 ? (t * x.v[0] - p.a.v[0]) / d.v[0]
                                 : (t * x.v[1] - p.a.v[1]) / d.v[1];
            if (s >= -1e-6 && s <= 1 + 1e-6) return t;
            break;
        }
        case RPiece::Kind::circle: {
            const double A = x.dot(x);
            const double B = -2.0 * x.dot(p.center);
            const double C = p.center.dot(p.center) - p.radius * p.radius;
            const double disc = B * B - 4 * A * C;
            if (disc < 0) break;
            const double sq = std::sqrt(disc);
            double best = -1;
            for (const double t : {(-B + sq) / (2 * A), (-B - sq) / (2 * A)}) {
                if (t <= 1e-12) continue;
                const DVec pt = x.scaled(t);
                const double phi = std::atan2(pt.v[1] - p.center.v[1], pt.v[0] - p.center.v[0]);
                const double rel = ccw_gap(p.phi0 - 1e-9, phi);
                if (rel <= (p.phi1 - p.phi0) + 2e-9 && t > best) best = t;
            }
            if (best > 0) return best;
            break;
        }
        case RPiece::Kind::parabola: {
            const double us = p.squared == 'x' ? x.v[0] : x.v[1];
            const double uo = p.squared == 'x' ? x.v[1] : x.v[0];
            // (t*us)^2 = pa + pb*(t*uo)
            const double A = us * us;
            const double B = -p.pb * uo;
            const double C = -p.pa;
            double roots[2];
            int nroots = 0;
            if (std::fabs(A) < 1e-14 * (1 + std::fabs(B))) {
                if (std::fabs(B) > 1e-300) roots[nroots++] = -C / B;
            } else {
                const double disc = B * B - 4 * A * C;
                if (disc >= 0) {
                    const double sq = std::sqrt(disc);
                    roots[nroots++] = (-B + sq) / (2 * A);
                    roots[nroots++] = (-B - sq) / (2 * A);
                }
            }
            const double tol = 1e-9 * (1 + std::fabs(p.t0) + std::fabs(p.t1));
            double best = -1;
            for (int i = 0; i < nroots; ++i) {
                const double t = roots[i];
                if (t <= 1e-12) continue;
                const double s = t * us;
                if (s >= p.t0 - tol && s <= p.t1 + tol && t > best) best = t;
            }
            if (best > 0) return best;
            break;
        }
        }
        throw Error("gauge2d: ray misses its boundary piece");
    }

    // ---- support maximization -------------------------------------------

    struct Support {
        double value = 0;
        DVec arg{0, 0};
        bool flat = false;      // maximum attained on a whole segment
        DVec flat_a{0, 0}, flat_b{0, 0};
        int piece = -1;
    };

    // max of f over the body; per-piece closed forms, flatness detected by
    // exact perpendicularity so segment-faced bodies classify without any
    // tolerance
    [[nodiscard]] Support support(const DVec& f) const {
        Support out;
        bool first = true;
        const double tie = 1e-12;
        for (int i = 0; i < static_cast<int>(pieces.size()); ++i) {
            const RPiece& p = pieces[static_cast<size_t>(i)];
            double val = 0;
            DVec arg{0, 0};
            bool flat = false;
            switch (p.kind) {
            case RPiece::Kind::segment: {
                const double fa = f.dot(p.a), fb = f.dot(p.b);
                const DVec d = p.b - p.a;
                if (f.dot(d) == 0.0) {
                    val = fa;
                    arg = p.a;
                    flat = true;
                } else if (fa >= fb) {
                    val = fa; arg = p.a;
                } else {
                    val = fb; arg = p.b;
                }
                break;
            }
            case RPiece::Kind::circle: {
                val = std::max(f.dot(p.a), f.dot(p.b));
                arg = f.dot(p.a) >= f.dot(p.b) ? p.a : p.b;
                const double fn = std::hypot(f.v[0], f.v[1]);
                if (fn > 0) {
                    const double phi = std::atan2(f.v[1], f.v[0]);
                    if (ccw_gap(p.phi0 - 1e-12, phi) <= (p.phi1 - p.phi0) + 2e-12) {
                        const DVec cand = p.center + f.scaled(p.radius / fn);
                        const double cval = f.dot(cand);
                        if (cval > val) { val = cval; arg = cand; }
                    }
                }
                break;
            }
            case RPiece::Kind::parabola: {
                val = std::max(f.dot(p.a), f.dot(p.b));
                arg = f.dot(p.a) >= f.dot(p.b) ? p.a : p.b;
                const double fs = p.squared == 'x' ? f.v[0] : f.v[1];
                const double fo = p.squared == 'x' ? f.v[1] : f.v[0];
                // d/dt [fs*t + fo*(t^2 - pa)/pb] = fs + 2*fo*t/pb
                if (fo / p.pb < 0) {
                    const double ts = -fs * p.pb / (2 * fo);
                    if (ts >= p.t0 && ts <= p.t1) {
                        const DVec cand = parabola_point(p, ts);
                        const double cval = f.dot(cand);
                        if (cval > val) { val = cval; arg = cand; }
                    }
                }
                break;
            }
            }
            const bool better = first || val > out.value + tie * (1 + std::fabs(out.value));
            const bool tied = !first && std::fabs(val - out.value) <= tie * (1 + std::fabs(out.value));
            if (better) {
                out.value = val;
                out.arg = arg;
                out.piece = i;
                out.flat = flat;
                if (flat) { out.flat_a = p.a; out.flat_b = p.b; }
            } else if (tied && flat && !out.flat) {
                out.flat = true;
                out.flat_a = p.a;
                out.flat_b = p.b;
                out.piece = i;
            }
            first = false;
        }
        return out;
    }

    // ---- location -------------------------------------------------------

    struct Location {
        int piece = -1;
        bool at_junction = false;
        int junction = -1;
    };

    [[nodiscard]] Location locate(const DVec& x) const {
        const double theta = wrap_angle(std::atan2(x.v[1], x.v[0]));
        Location loc;
        loc.piece = piece_index_at(theta);
        const double scale = x.l2();
        for (int j = 0; j < static_cast<int>(junctions.size()); ++j) {
            const DVec d = x - junctions[static_cast<size_t>(j)].point;
            if (d.l2() <= 1e-9 * (1 + scale)) {
                loc.at_junction = true;
                loc.junction = j;
                break;
            }
        }
        return loc;
    }

private:
    // ---- piece resolution ------------------------------------------------

    [[nodiscard]] static RPiece resolve(const PieceSpec& ps, int index) {
        RPiece r;
        r.spec_index = index;
        if (std::holds_alternative<SegmentPiece>(ps)) {
            const auto& seg = std::get<SegmentPiece>(ps);
            r.kind = RPiece::Kind::segment;
            if (std::fabs(cross2(seg.a, seg.b)) < 1e-12 * (1 + seg.a.l2() * seg.b.l2()))
                throw InvalidSpec("pieces[" + std::to_string(index) + "]: segment is radial or degenerate");
            if (cross2(seg.a, seg.b) > 0) { r.a = seg.a; r.b = seg.b; }
            else { r.a = seg.b; r.b = seg.a; }
        } else if (std::holds_alternative<CircleArcPiece>(ps)) {
            const auto& arc = std::get<CircleArcPiece>(ps);
            r.kind = RPiece::Kind::circle;
            r.center = arc.center;
            r.radius = arc.radius;
            resolve_circle(r, arc, index);
        } else {
            const auto& par = std::get<ParabolaArcPiece>(ps);
            r.kind = RPiece::Kind::parabola;
            r.squared = par.squared;
            r.pa = par.a;
            r.pb = par.b;
            resolve_parabola(r, par, index);
        }
        finish_angles(r, index);
        return r;
    }

    static void resolve_circle(RPiece& r, const CircleArcPiece& arc, int index) {
        const std::string where = "pieces[" + std::to_string(index) + "]";
        std::vector<double> cuts;
        auto add_cos_cuts = [&](double bound) {
            const double c = (bound - r.center.v[0]) / r.radius;
            if (std::fabs(c) <= 1) {
                const double phi = std::acos(std::clamp(c, -1.0, 1.0));
                cuts.push_back(wrap_angle(phi));
                cuts.push_back(wrap_angle(-phi));
            }
        };
        auto add_sin_cuts = [&](double bound) {
            const double s = (bound - r.center.v[1]) / r.radius;
            if (std::fabs(s) <= 1) {
                const double phi = std::asin(std::clamp(s, -1.0, 1.0));
                cuts.push_back(wrap_angle(phi));
                cuts.push_back(wrap_angle(3.14159265358979323846 - phi));
            }
        };
        const auto& bb = arc.bounds;
        if (bb.x_min) add_cos_cuts(*bb.x_min);
        if (bb.x_max) add_cos_cuts(*bb.x_max);
        if (bb.y_min) add_sin_cuts(*bb.y_min);
        if (bb.y_max) add_sin_cuts(*bb.y_max);

        auto at = [&](double phi) {
            return DVec{r.center.v[0] + r.radius * std::cos(phi),
                        r.center.v[1] + r.radius * std::sin(phi)};
        };
        auto ok = [&](double phi) {
            const DVec p = at(phi);
            return bb.admits(p.v[0], p.v[1], 1e-12 * (1 + r.radius));
        };

        if (cuts.empty()) {
            if (!ok(0.0)) throw InvalidSpec(where + ": circle arc excluded by its bounds");
            r.phi0 = 0;
            r.phi1 = kTwoPi;
            r.a = r.b = at(0.0);
            return;
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double x, double y) { return std::fabs(x - y) < 1e-12; }),
                   cuts.end());
        // feasible sub-arcs between consecutive cuts, then merge across shared
        // cut points; a valid piece list leaves exactly one arc
        const int nc = static_cast<int>(cuts.size());
        std::vector<std::pair<double, double>> feas;
        for (int i = 0; i < nc; ++i) {
            const double lo = cuts[static_cast<size_t>(i)];
            const double span = nc == 1 ? kTwoPi : ccw_gap(lo, cuts[static_cast<size_t>((i + 1) % nc)]);
            if (span < 1e-12) continue;
            if (ok(lo + span / 2)) feas.emplace_back(lo, lo + span);
        }
        if (feas.empty()) throw InvalidSpec(where + ": circle arc excluded by its bounds");
        // merge wrap-adjacent feasible arcs
        bool merged = true;
        while (merged && feas.size() > 1) {
            merged = false;
            for (size_t i = 0; i < feas.size() && !merged; ++i)
                for (size_t j = 0; j < feas.size() && !merged; ++j) {
                    if (i == j) continue;
                    if (std::fabs(wrap_angle(feas[i].second) - wrap_angle(feas[j].first)) < 1e-12) {
                        feas[i].second += feas[j].second - feas[j].first;
                        feas.erase(feas.begin() + static_cast<long>(j));
                        merged = true;
                    }
                }
        }
        if (feas.size() != 1)
            throw InvalidSpec(where + ": bounds leave more than one circle arc");
        r.phi0 = feas.front().first;
        r.phi1 = feas.front().second;
        if (r.phi1 - r.phi0 >= kTwoPi - 1e-12) { r.phi0 = 0; r.phi1 = kTwoPi; }
        r.a = at(r.phi0);
        r.b = at(r.phi1);
    }

    static void resolve_parabola(RPiece& r, const ParabolaArcPiece& par, int index) {
        const std::string where = "pieces[" + std::to_string(index) + "]";
        const auto& bb = par.bounds;
        std::vector<double> cuts;
        auto direct_lo = r.squared == 'x' ? bb.x_min : bb.y_min;
        auto direct_hi = r.squared == 'x' ? bb.x_max : bb.y_max;
        auto other_lo = r.squared == 'x' ? bb.y_min : bb.x_min;
        auto other_hi = r.squared == 'x' ? bb.y_max : bb.x_max;
        if (direct_lo) cuts.push_back(*direct_lo);
        if (direct_hi) cuts.push_back(*direct_hi);
        auto add_other = [&](double bound) {
            const double t2 = r.pa + r.pb * bound;
            if (t2 >= 0) {
                cuts.push_back(std::sqrt(t2));
                cuts.push_back(-std::sqrt(t2));
            }
        };
        if (other_lo) add_other(*other_lo);
        if (other_hi) add_other(*other_hi);
        if (cuts.empty()) throw InvalidSpec(where + ": parabola arc needs bounds");
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double x, double y) { return std::fabs(x - y) < 1e-12; }),
                   cuts.end());

        auto ok = [&](double t) {
            const DVec p = parabola_point(r, t);
            return bb.admits(p.v[0], p.v[1], 1e-12 * (1 + std::fabs(t)));
        };
        // unbounded tails must be infeasible
        if (ok(cuts.front() - 1.0) || ok(cuts.back() + 1.0))
            throw InvalidSpec(where + ": parabola arc unbounded under its bounds");
        std::optional<std::pair<double, double>> range;
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            if (cuts[i + 1] - cuts[i] < 1e-12) continue;
            if (ok((cuts[i] + cuts[i + 1]) / 2)) {
                if (range && std::fabs(range->second - cuts[i]) > 1e-12)
                    throw InvalidSpec(where + ": bounds leave more than one parabola arc");
                if (range) range->second = cuts[i + 1];
                else range = {cuts[i], cuts[i + 1]};
            }
        }
        if (!range) throw InvalidSpec(where + ": parabola arc excluded by its bounds");
        r.t0 = range->first;
        r.t1 = range->second;
        const DVec pa = parabola_point(r, r.t0);
        const DVec pb = parabola_point(r, r.t1);
        if (cross2(pa, pb) > 0) { r.a = pa; r.b = pb; }
        else { r.a = pb; r.b = pa; }
    }

    static void finish_angles(RPiece& r, int index) {
        if (r.kind == RPiece::Kind::circle && r.phi1 - r.phi0 >= kTwoPi - 1e-12) {
            r.th0 = 0;
            r.th1 = kTwoPi;
            return;
        }
        if (r.a.near_zero(1e-12) || r.b.near_zero(1e-12))
            throw InvalidSpec("pieces[" + std::to_string(index) + "]: boundary touches the origin");
        r.th0 = wrap_angle(std::atan2(r.a.v[1], r.a.v[0]));
        const double gap = ccw_gap(r.th0, wrap_angle(std::atan2(r.b.v[1], r.b.v[0])));
        if (gap < 1e-12 || gap > kTwoPi - 1e-12)
            throw InvalidSpec("pieces[" + std::to_string(index) + "]: piece subtends no angle");
        r.th1 = r.th0 + gap;
    }

    // ---- validation -------------------------------------------------------

    void check_closure() const {
        const int m = static_cast<int>(pieces.size());
        if (m == 1) {
            if (pieces[0].th1 - pieces[0].th0 < kTwoPi - 1e-9)
                throw InvalidSpec("gauge2d: boundary leaves uncovered directions");
            return;
        }
        double total = 0;
        for (int i = 0; i < m; ++i) {
            const RPiece& cur = pieces[static_cast<size_t>(i)];
            const RPiece& nxt = pieces[static_cast<size_t>((i + 1) % m)];
            const DVec gap = cur.b - nxt.a;
            const double scale = 1 + cur.b.l2();
            if (gap.l2() > 1e-9 * scale)
                throw InvalidSpec("gauge2d: pieces do not close up near angle " +
                                   std::to_string(cur.th1) + " (gap " + std::to_string(gap.l2()) + ")");
            total += cur.th1 - cur.th0;
        }
        if (std::fabs(total - kTwoPi) > 1e-9)
            throw InvalidSpec("gauge2d: pieces cover " + std::to_string(total) +
                               " radians instead of the full circle");
    }

    void collect_junctions() {
        const int m = static_cast<int>(pieces.size());
        for (int i = 0; i < m; ++i) {
            const RPiece& cur = pieces[static_cast<size_t>(i)];
            const RPiece& nxt = pieces[static_cast<size_t>((i + 1) % m)];
            Junction j;
            j.point = cur.b;
            j.left = i;
            j.right = (i + 1) % m;
            j.n_left = outward_normal(cur, cur.b);
            j.n_right = outward_normal(nxt, nxt.a);
            junctions.push_back(j);
        }
    }

    void check_symmetry_and_convexity() const {
        // corner turns must be CCW and short of a half turn
        for (const auto& j : junctions) {
            const double cr = cross2(j.n_left, j.n_right);
            const double dt = j.n_left.dot(j.n_right);
            if (cr < -1e-9 || (std::fabs(cr) <= 1e-9 && dt < 0))
                throw InvalidSpec("gauge2d: boundary turns clockwise at junction (" +
                                   std::to_string(j.point.v[0]) + ", " + std::to_string(j.point.v[1]) + ")");
        }
        // sampled polygon convexity plus origin symmetry of the raw gauge
        const int N = 1440;
        std::vector<DVec> pts;
        pts.reserve(static_cast<size_t>(N));
        double scale = 0;
        for (int i = 0; i < N; ++i) {
            DVec p{0, 0};
            try {
                p = boundary_point(kTwoPi * i / N);
            } catch (const Error&) {
                throw InvalidSpec("gauge2d: boundary is not star shaped around the origin");
            }
            scale = std::max(scale, p.l2());
            pts.push_back(p);
        }
        for (int i = 0; i < N; ++i) {
            const double g = gauge_raw(-pts[static_cast<size_t>(i)]);
            if (std::fabs(g - 1.0) > 1e-9)
                throw InvalidSpec("gauge2d: body is not symmetric about the origin");
        }
        for (int i = 0; i < N; ++i) {
            const DVec& p0 = pts[static_cast<size_t>(i)];
            const DVec& p1 = pts[static_cast<size_t>((i + 1) % N)];
            const DVec& p2 = pts[static_cast<size_t>((i + 2) % N)];
            if (cross2(p1 - p0, p2 - p1) < -1e-9 * scale * scale)
                throw InvalidSpec("gauge2d: boundary is not convex near (" +
                                   std::to_string(p1.v[0]) + ", " + std::to_string(p1.v[1]) + ")");
        }
    }
};

} // namespace nsg::detail
