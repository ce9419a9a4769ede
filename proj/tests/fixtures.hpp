#pragma once

// Shared space fixtures for the test suite.

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "nsg/space.hpp"

namespace fixtures {

using namespace nsg;

// square with circular caps: segments x = +-1 for |y| <= 1, circle arcs of
// radius 1 centered at (0, +-1)
[[nodiscard]] inline SpaceSpec stadium() {
    SegmentPiece right{DVec{1, -1}, DVec{1, 1}};
    SegmentPiece left{DVec{-1, 1}, DVec{-1, -1}};
    CircleArcPiece top;
    top.center = DVec{0, 1};
    top.radius = 1;
    top.bounds.y_min = 1;
    CircleArcPiece bottom;
    bottom.center = DVec{0, -1};
    bottom.radius = 1;
    bottom.bounds.y_max = -1;
    return SpaceSpec::make_gauge2d({right, top, left, bottom});
}

// square with parabolic caps x^2 = 3 - 2y above and x^2 = 3 + 2y below;
// genuine corners at (+-1, +-1) where the cap arrives with slope -+1, and
// not strictly convex on the sides
[[nodiscard]] inline SpaceSpec parabolic() {
    SegmentPiece right{DVec{1, -1}, DVec{1, 1}};
    SegmentPiece left{DVec{-1, 1}, DVec{-1, -1}};
    ParabolaArcPiece up;
    up.squared = 'x';
    up.a = 3;
    up.b = -2;
    up.bounds.y_min = 1;
    ParabolaArcPiece down;
    down.squared = 'x';
    down.a = 3;
    down.b = 2;
    down.bounds.y_max = -1;
    return SpaceSpec::make_gauge2d({right, up, left, down});
}

[[nodiscard]] inline SpaceSpec hexagon() {
    std::vector<Vector> v = {
        Vector{Rat(2), Rat(0)},  Vector{Rat(1), Rat(2)},   Vector{Rat(-1), Rat(2)},
        Vector{Rat(-2), Rat(0)}, Vector{Rat(-1), Rat(-2)}, Vector{Rat(1), Rat(-2)},
    };
    return SpaceSpec::make_polyhedral(v);
}

[[nodiscard]] inline SpaceSpec square2() {
    std::vector<Vector> v = {
        Vector{Rat(1), Rat(1)},
        Vector{Rat(-1), Rat(1)},
        Vector{Rat(-1), Rat(-1)},
        Vector{Rat(1), Rat(-1)},
    };
    return SpaceSpec::make_polyhedral(v);
}

[[nodiscard]] inline SpaceSpec cross2() {
    std::vector<Vector> v = {
        Vector{Rat(1), Rat(0)},
        Vector{Rat(0), Rat(1)},
        Vector{Rat(-1), Rat(0)},
        Vector{Rat(0), Rat(-1)},
    };
    return SpaceSpec::make_polyhedral(v);
}

// random symmetric polygon with small rational vertices and decently
// separated directions, so vertex angles stay well away from 180 degrees
[[nodiscard]] inline SpaceSpec random_polygon(std::mt19937& rng) {
    std::uniform_int_distribution<int> kd(3, 5);
    std::uniform_int_distribution<int> num(-12, 12);
    std::uniform_int_distribution<int> den(1, 6);
    for (;;) {
        const int k = kd(rng);
        std::vector<Vector> dirs;
        std::vector<double> angles;
        int guard = 0;
        while (static_cast<int>(dirs.size()) < k && ++guard < 400) {
            Rat x(num(rng), den(rng));
            Rat y(num(rng), den(rng));
            double xd = to_double(x);
            double yd = to_double(y);
            const double r2 = xd * xd + yd * yd;
            if (r2 < 0.64 || r2 > 6.25) continue;
            if (yd < 0 || (yd == 0 && xd <= 0)) {
                x = -x;
                y = -y;
                xd = -xd;
                yd = -yd;
            }
            const double a = std::atan2(yd, xd);
            bool separated = true;
            for (const double b : angles) {
                double gap = std::abs(a - b);
                gap = std::min(gap, 3.14159265358979323846 - gap);
                if (gap < 0.28) {
                    separated = false;
                    break;
                }
            }
            if (!separated) continue;
            angles.push_back(a);
            dirs.push_back(Vector{x, y});
        }
        if (static_cast<int>(dirs.size()) < k) continue;
        std::vector<Vector> sym;
        for (const auto& v : dirs) {
            sym.push_back(v);
            sym.push_back(-v);
        }
        return SpaceSpec::make_polyhedral(sym);
    }
}

// the two sphere vertices spanning a polygon edge
[[nodiscard]] inline std::pair<Vector, Vector> facet_endpoints(const detail::PolytopeKernel& k,
                                                               int facet) {
    std::vector<const Vector*> on;
    for (const auto& v : k.vertices)
        if (k.facets[static_cast<size_t>(facet)](v) == 1) on.push_back(&v);
    if (on.size() != 2) throw Error("facet does not have exactly two sphere vertices");
    return {*on[0], *on[1]};
}

// octahedron with one vertex pair pulled out, still symmetric
[[nodiscard]] inline SpaceSpec spiky3() {
    std::vector<Vector> v = {
        Vector{Rat(2), Rat(0), Rat(0)},  Vector{Rat(-2), Rat(0), Rat(0)},
        Vector{Rat(0), Rat(1), Rat(0)},  Vector{Rat(0), Rat(-1), Rat(0)},
        Vector{Rat(0), Rat(0), Rat(1)},  Vector{Rat(0), Rat(0), Rat(-1)},
    };
    return SpaceSpec::make_polyhedral(v);
}

} // namespace fixtures
