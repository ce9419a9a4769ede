#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsg/errors.hpp"
#include "nsg/vector.hpp"

namespace nsg {

using json = nlohmann::ordered_json;

enum class SpaceKind { lp, polyhedral, gauge2d };

[[nodiscard]] inline std::string to_string(SpaceKind k) {
    switch (k) {
        case SpaceKind::lp: return "lp";
        case SpaceKind::polyhedral: return "polyhedral";
        case SpaceKind::gauge2d: return "gauge2d";
    }
    return "?";
}

struct LpSpec {
    double p = 2.0;
    bool infinite = false; // p = infinity
    int dim = 2;
};

struct PolyhedralSpec {
    std::vector<Vector> vertices; // must be symmetric, span R^n
};

// ---- gauge2d boundary pieces ----
//
// Optional axis bounds select the portion of the full conic that belongs to
// the boundary. A bound that is absent does not constrain that side.
struct AxisBounds {
    std::optional<double> x_min, x_max, y_min, y_max;

    [[nodiscard]] bool admits(double x, double y, double slack) const {
        if (x_min && x < *x_min - slack) return false;
        if (x_max && x > *x_max + slack) return false;
        if (y_min && y < *y_min - slack) return false;
        if (y_max && y > *y_max + slack) return false;
        return true;
    }
};

struct SegmentPiece {
    DVec a{0, 0}, b{0, 0};
};

struct CircleArcPiece {
    DVec center{0, 0};
    double radius = 1.0;
    AxisBounds bounds;
};

// squared == 'x': the curve x^2 = a + b*y, parametrized by x.
// squared == 'y': the mirrored form y^2 = a + b*x, parametrized by y.
struct ParabolaArcPiece {
    char squared = 'x';
    double a = 0.0, b = 0.0;
    AxisBounds bounds;
};

using PieceSpec = std::variant<SegmentPiece, CircleArcPiece, ParabolaArcPiece>;

struct Gauge2dSpec {
    std::vector<PieceSpec> pieces;
};

struct SpaceSpec {
    SpaceKind kind = SpaceKind::lp;
    std::variant<LpSpec, PolyhedralSpec, Gauge2dSpec> data = LpSpec{};

    [[nodiscard]] const LpSpec& lp() const { return std::get<LpSpec>(data); }
    [[nodiscard]] const PolyhedralSpec& polyhedral() const { return std::get<PolyhedralSpec>(data); }
    [[nodiscard]] const Gauge2dSpec& gauge2d() const { return std::get<Gauge2dSpec>(data); }

    [[nodiscard]] int dim() const {
        switch (kind) {
            case SpaceKind::lp: return lp().dim;
            case SpaceKind::polyhedral:
                return polyhedral().vertices.empty() ? 0 : polyhedral().vertices.front().dim();
            case SpaceKind::gauge2d: return 2;
        }
        return 0;
    }

    static SpaceSpec make_lp(double p, int dim) {
        SpaceSpec s;
        s.kind = SpaceKind::lp;
        s.data = LpSpec{p, false, dim};
        return s;
    }
    static SpaceSpec make_linf(int dim) {
        SpaceSpec s;
        s.kind = SpaceKind::lp;
        s.data = LpSpec{std::numeric_limits<double>::infinity(), true, dim};
        return s;
    }
    static SpaceSpec make_polyhedral(std::vector<Vector> vertices) {
        SpaceSpec s;
        s.kind = SpaceKind::polyhedral;
        s.data = PolyhedralSpec{std::move(vertices)};
        return s;
    }
    static SpaceSpec make_gauge2d(std::vector<PieceSpec> pieces) {
        SpaceSpec s;
        s.kind = SpaceKind::gauge2d;
        s.data = Gauge2dSpec{std::move(pieces)};
        return s;
    }
};

// ---- JSON mapping ----

namespace spec_json {

inline Rat scalar_from_json(const json& j, const std::string& where) {
    if (j.is_string()) return parse_rat(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_number_float()) return rat_of(j.get<double>());
    throw InvalidSpec(where + ": expected number or rational string");
}

inline double double_from_json(const json& j, const std::string& where) {
    return to_double(scalar_from_json(j, where));
}

inline DVec dvec2_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2)
        throw InvalidSpec(where + ": expected [x, y]");
    return DVec(double_from_json(j[0], where), double_from_json(j[1], where));
}

inline AxisBounds bounds_from_json(const json& j) {
    AxisBounds b;
    if (j.contains("x_min")) b.x_min = double_from_json(j["x_min"], "x_min");
    if (j.contains("x_max")) b.x_max = double_from_json(j["x_max"], "x_max");
    if (j.contains("y_min")) b.y_min = double_from_json(j["y_min"], "y_min");
    if (j.contains("y_max")) b.y_max = double_from_json(j["y_max"], "y_max");
    return b;
}

inline json bounds_to_json(const AxisBounds& b, json j) {
    if (b.x_min) j["x_min"] = *b.x_min;
    if (b.x_max) j["x_max"] = *b.x_max;
    if (b.y_min) j["y_min"] = *b.y_min;
    if (b.y_max) j["y_max"] = *b.y_max;
    return j;
}

} // namespace spec_json

[[nodiscard]] inline SpaceSpec space_spec_from_json(const json& j) {
    using namespace spec_json;
    if (!j.is_object() || !j.contains("kind"))
        throw InvalidSpec("space file: missing \"kind\"");
    const std::string kind = j["kind"].get<std::string>();

    if (kind == "lp") {
        if (!j.contains("p")) throw InvalidSpec("lp space: missing \"p\"");
        if (!j.contains("dim")) throw InvalidSpec("lp space: missing \"dim\"");
        const int dim = j["dim"].get<int>();
        const auto& pj = j["p"];
        if (pj.is_string()) {
            const std::string ps = pj.get<std::string>();
            if (ps == "inf" || ps == "infinity" || ps == "oo")
                return SpaceSpec::make_linf(dim);
            return SpaceSpec::make_lp(to_double(parse_rat(ps)), dim);
        }
        return SpaceSpec::make_lp(pj.get<double>(), dim);
    }

    if (kind == "polyhedral") {
        if (!j.contains("vertices") || !j["vertices"].is_array())
            throw InvalidSpec("polyhedral space: missing \"vertices\" array");
        std::vector<Vector> verts;
        int idx = 0;
        for (const auto& vj : j["vertices"]) {
            const std::string where = "vertices[" + std::to_string(idx++) + "]";
            if (!vj.is_array())
                throw InvalidSpec(where + ": expected coordinate array");
            std::vector<Rat> coords;
            for (const auto& cj : vj) coords.push_back(scalar_from_json(cj, where));
            verts.emplace_back(std::move(coords));
        }
        return SpaceSpec::make_polyhedral(std::move(verts));
    }

    if (kind == "gauge2d") {
        if (!j.contains("pieces") || !j["pieces"].is_array())
            throw InvalidSpec("gauge2d space: missing \"pieces\" array");
        std::vector<PieceSpec> pieces;
        int idx = 0;
        for (const auto& pj : j["pieces"]) {
            const std::string where = "pieces[" + std::to_string(idx++) + "]";
            if (!pj.is_object() || !pj.contains("type"))
                throw InvalidSpec(where + ": missing \"type\"");
            const std::string type = pj["type"].get<std::string>();
            if (type == "segment") {
                SegmentPiece s;
                if (!pj.contains("from") || !pj.contains("to"))
                    throw InvalidSpec(where + ": segment needs \"from\" and \"to\"");
                s.a = dvec2_from_json(pj["from"], where + ".from");
                s.b = dvec2_from_json(pj["to"], where + ".to");
                pieces.emplace_back(s);
            } else if (type == "circle_arc") {
                CircleArcPiece c;
                if (!pj.contains("center") || !pj.contains("radius"))
                    throw InvalidSpec(where + ": circle_arc needs \"center\" and \"radius\"");
                c.center = dvec2_from_json(pj["center"], where + ".center");
                c.radius = double_from_json(pj["radius"], where + ".radius");
                if (c.radius <= 0) throw InvalidSpec(where + ": radius must be positive");
                c.bounds = bounds_from_json(pj);
                pieces.emplace_back(c);
            } else if (type == "parabola_arc") {
                ParabolaArcPiece p;
                const std::string sq = pj.value("squared", "x");
                if (sq != "x" && sq != "y")
                    throw InvalidSpec(where + ": \"squared\" must be \"x\" or \"y\"");
                p.squared = sq[0];
                if (!pj.contains("a") || !pj.contains("b"))
                    throw InvalidSpec(where + ": parabola_arc needs coefficients \"a\" and \"b\"");
                p.a = double_from_json(pj["a"], where + ".a");
                p.b = double_from_json(pj["b"], where + ".b");
                if (p.b == 0) throw InvalidSpec(where + ": coefficient b must be nonzero");
                p.bounds = bounds_from_json(pj);
                pieces.emplace_back(p);
            } else {
                throw InvalidSpec(where + ": unknown piece type '" + type + "'");
            }
        }
        return SpaceSpec::make_gauge2d(std::move(pieces));
    }

    throw InvalidSpec("space file: unknown kind '" + kind + "'");
}

[[nodiscard]] inline json space_spec_to_json(const SpaceSpec& spec) {
    using namespace spec_json;
    json j;
    j["kind"] = to_string(spec.kind);
    switch (spec.kind) {
        case SpaceKind::lp:
            if (spec.lp().infinite)
                j["p"] = "inf";
            else
                j["p"] = spec.lp().p;
            j["dim"] = spec.lp().dim;
            break;
        case SpaceKind::polyhedral: {
            json verts = json::array();
            for (const auto& v : spec.polyhedral().vertices) {
                json vj = json::array();
                for (int i = 0; i < v.dim(); ++i) vj.push_back(rat_str(v[i]));
                verts.push_back(vj);
            }
            j["vertices"] = verts;
            break;
        }
        case SpaceKind::gauge2d: {
            json pieces = json::array();
            for (const auto& piece : spec.gauge2d().pieces) {
                json pj;
                if (const auto* s = std::get_if<SegmentPiece>(&piece)) {
                    pj["type"] = "segment";
                    pj["from"] = {s->a[0], s->a[1]};
                    pj["to"] = {s->b[0], s->b[1]};
                } else if (const auto* c = std::get_if<CircleArcPiece>(&piece)) {
                    pj["type"] = "circle_arc";
                    pj["center"] = {c->center[0], c->center[1]};
                    pj["radius"] = c->radius;
                    pj = bounds_to_json(c->bounds, pj);
                } else if (const auto* p = std::get_if<ParabolaArcPiece>(&piece)) {
                    pj["type"] = "parabola_arc";
                    pj["squared"] = std::string(1, p->squared);
                    pj["a"] = p->a;
                    pj["b"] = p->b;
                    pj = bounds_to_json(p->bounds, pj);
                }
                pieces.push_back(pj);
            }
            j["pieces"] = pieces;
            break;
        }
    }
    return j;
}

// Reads and validates a space-definition file. Diagnostics name the
// offending field; JSON syntax errors keep the parser's byte position.
[[nodiscard]] inline SpaceSpec load_space_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open space file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidSpec("space file '" + path + "': " + e.what());
    }
    try {
        return space_spec_from_json(j);
    } catch (const InvalidSpec& e) {
        throw InvalidSpec("space file '" + path + "': " + e.what());
    }
}

} // namespace nsg
