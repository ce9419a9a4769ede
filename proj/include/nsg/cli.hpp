#pragma once

#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nsg/constructions.hpp"

namespace nsg::cli {

enum class Command { norm, orth, classify, basis, op, roundtrip, probe };

[[nodiscard]] inline std::string to_string(Command c) {
    switch (c) {
        case Command::norm: return "norm";
        case Command::orth: return "orth";
        case Command::classify: return "classify";
        case Command::basis: return "basis";
        case Command::op: return "operator";
        case Command::roundtrip: return "roundtrip";
        case Command::probe: return "probe";
    }
    return "?";
}

struct RunConfig {
    std::string space_path;
    Command command = Command::norm;
    std::vector<std::string> vector_args;
    ToleranceConfig tol;
    bool json_output = false;
    long seed = 0;
    BackendRequest backend = BackendRequest::automatic;
    int probe_samples = 1024;
};

struct RunResult {
    int exit_code = 0;
    std::string text;
    json report;
};

// exit code conventions; a verdict of "no" is still a successful computation
constexpr int kExitComputed = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInconsistent = 2;

[[nodiscard]] inline SpaceSpec parse_space_file(const std::string& path) {
    return load_space_spec(path);
}

// "1,0" or "3/4,-2" or "0.5,1e-3"; every component goes through the exact
// scalar parser so the exact backend sees exact inputs
[[nodiscard]] inline Vector parse_vector(const std::string& text, int dim) {
    std::vector<Rat> coords;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) coords.push_back(parse_rat(item));
    if (static_cast<int>(coords.size()) != dim) {
        std::ostringstream os;
        os << "vector '" << text << "' has " << coords.size() << " coordinates, space has " << dim;
        throw DimensionMismatch(os.str());
    }
    return Vector(std::move(coords));
}

// Environment override hook; explicit command-line flags are applied on top
// by the front end.
inline void apply_env_overrides(ToleranceConfig& tol) {
    if (const char* v = std::getenv("NSG_TOL_EPS_ABS")) tol.eps_abs = to_double(parse_rat(v));
}

namespace detail {

[[nodiscard]] inline json vector_json(const Vector& v) {
    json a = json::array();
    for (int i = 0; i < v.dim(); ++i) a.push_back(rat_str(v[i]));
    return a;
}

[[nodiscard]] inline json dvec_json(const DVec& v) {
    json a = json::array();
    for (int i = 0; i < v.n; ++i) a.push_back(v.v[static_cast<size_t>(i)]);
    return a;
}

[[nodiscard]] inline std::string dvec_str(const DVec& v) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < v.n; ++i) os << (i ? ", " : "") << v.v[static_cast<size_t>(i)];
    os << ")";
    return os.str();
}

struct ReportBuilder {
    json j;
    std::ostringstream text;

    ReportBuilder(const RunConfig& cfg, const Space& space, const std::vector<Vector>& inputs) {
        j["command"] = to_string(cfg.command);
        j["space"] = {{"path", cfg.space_path},
                      {"kind", nsg::to_string(space.spec().kind)},
                      {"dim", space.dim()},
                      {"backend", nsg::to_string(space.backend())}};
        j["inputs"] = json::array();
        for (const auto& v : inputs) j["inputs"].push_back(vector_json(v));
        j["verdicts"] = json::array();
        j["margins"] = json::array();
        j["witnesses"] = json::array();
        j["seed"] = cfg.seed;
        j["tolerances"] = {{"eps_abs", space.tol().eps_abs},
                           {"eps_flat", space.tol().eps_flat},
                           {"grid_2d", space.tol().grid_2d},
                           {"grid_3d", space.tol().grid_3d},
                           {"tau_min", space.tol().tau_min}};
    }

    void verdict(const std::string& name, json value) {
        j["verdicts"].push_back({{"name", name}, {"value", std::move(value)}});
    }
    void margin(const std::string& name, double value) {
        j["margins"].push_back({{"name", name}, {"value", value}});
    }
    void witness(const std::string& name, json value) {
        j["witnesses"].push_back({{"name", name}, {"value", std::move(value)}});
    }

    [[nodiscard]] RunResult finish(const RunConfig& cfg, int code) && {
        RunResult r;
        r.exit_code = code;
        r.report = std::move(j);
        r.text = cfg.json_output ? r.report.dump(2) + "\n" : text.str();
        return r;
    }
};

inline void run_norm(ReportBuilder& rb, const Space& space, const std::vector<Vector>& xs) {
    for (const auto& x : xs) {
        if (space.has_exact()) {
            const Rat n = space.norm_exact(x);
            rb.verdict("norm", rat_str(n));
            rb.margin("norm", to_double(n));
            rb.text << "norm " << x.str() << " = " << rat_str(n) << " (exact)\n";
        } else {
            const double n = space.norm(x.approx());
            rb.verdict("norm", n);
            rb.margin("norm", n);
            rb.text << "norm " << x.str() << " = " << n << "\n";
        }
    }
}

inline void run_orth_pair(ReportBuilder& rb, const Space& space, const Vector& x,
                          const Vector& y) {
    const OrthVerdict bj = is_bj_orthogonal(space, x, y);
    const OrthVerdict sb = is_sb_orthogonal(space, x, y);
    const DirectionalProfile prof = directional_min(space, x, y);
    rb.verdict("bj", bj.decision);
    rb.verdict("sb", sb.decision);
    rb.margin("bj_margin", bj.margin);
    rb.margin("sb_margin", sb.margin);
    rb.witness("minimizer_interval", json::array({prof.lo, prof.hi}));
    if (sb.witness_lambda) rb.witness("sb_witness_lambda", *sb.witness_lambda);

    rb.text << "BJ: " << (bj.decision ? "true" : "false") << " (margin " << bj.margin << ")";
    if (bj.borderline) rb.text << " [borderline]";
    rb.text << "; SB: " << (sb.decision ? "true" : "false");
    if (sb.decision)
        rb.text << " (margin " << sb.margin << ")";
    else
        rb.text << " (minimizer interval [" << prof.lo << ", " << prof.hi << "])";
    if (sb.borderline) rb.text << " [borderline]";
    rb.text << "\n";
}

inline void run_orth_family(ReportBuilder& rb, const Space& space,
                            const std::vector<Vector>& xs) {
    const OrthVerdict rel = is_strongly_orthogonal_relative(space, xs, 0);
    rb.verdict("strongly_orthogonal_relative", rel.decision);
    rb.margin("relative_margin", rel.margin);
    rb.text << "strongly orthogonal relative to " << xs[0].str() << ": "
            << (rel.decision ? "true" : "false") << " (margin " << rel.margin << ")";
    if (rel.witness_coeffs) {
        json w = json::array();
        for (double c : *rel.witness_coeffs) w.push_back(c);
        rb.witness("witness_coefficients", w);
        rb.text << "; witness coefficients (";
        for (size_t i = 0; i < rel.witness_coeffs->size(); ++i)
            rb.text << (i ? ", " : "") << (*rel.witness_coeffs)[i];
        rb.text << ")";
    }
    if (rel.borderline) rb.text << " [borderline]";
    rb.text << "\n";
}

inline void describe_class(ReportBuilder& rb, const Space& space, const PointClass& pc) {
    rb.verdict("on_sphere", pc.on_sphere);
    rb.verdict("extreme", pc.extreme);
    rb.verdict("exposed", pc.exposed);
    rb.margin("classification_margin", pc.margin);
    if (pc.exposing_functional)
        rb.witness("exposing_functional", vector_json(pc.exposing_functional->coeffs()));
    if (pc.flat_witness) rb.witness("flat_witness", vector_json(*pc.flat_witness));

    rb.text << "extreme: " << (pc.extreme ? "true" : "false")
            << "; exposed: " << (pc.exposed ? "true" : "false");
    if (pc.exposing_functional)
        rb.text << "; exposing functional "
                << (space.has_exact() ? pc.exposing_functional->str()
                                      : dvec_str(pc.exposing_functional->approx()));
    if (pc.flat_witness)
        rb.text << "; flat witness "
                << (space.has_exact() ? pc.flat_witness->str() : dvec_str(pc.flat_witness->approx()));
    rb.text << "; margin " << pc.margin << "\n";
}

inline void run_basis(ReportBuilder& rb, const Space& space, const Vector& x0) {
    try {
        const RelativeBasis basis = basis_from_exposed(space, x0);
        rb.verdict("basis_exists", true);
        json members = json::array();
        for (const auto& v : basis.vectors) members.push_back(vector_json(v));
        rb.witness("basis", members);
        rb.margin("certificate_margin", basis.certificate.margin);
        rb.text << "strongly orthonormal basis relative to " << x0.str() << ":\n";
        for (const auto& v : basis.vectors)
            rb.text << "  " << (space.has_exact() ? v.str() : dvec_str(v.approx())) << "\n";
        rb.text << "certificate margin " << basis.certificate.margin << "\n";
    } catch (const NotExposed& e) {
        rb.verdict("basis_exists", false);
        rb.verdict("obstruction", e.what());
        rb.margin("classification_margin", e.point_class.margin);
        if (e.point_class.flat_witness)
            rb.witness("flat_witness", vector_json(*e.point_class.flat_witness));
        rb.text << "no basis: " << e.what() << "\n";
    }
}

inline void run_operator(ReportBuilder& rb, const Space& space, const Vector& x0) {
    const RelativeBasis basis = basis_from_exposed(space, x0);
    const Operator op = operator_from_basis(space, basis);
    json rows = json::array();
    for (int r = 0; r < space.dim(); ++r) {
        json row = json::array();
        for (int c = 0; c < space.dim(); ++c) row.push_back(rat_str(op.matrix.at(r, c)));
        rows.push_back(row);
    }
    rb.verdict("norm_estimate", op.norm_estimate);
    rb.verdict("attains_only_on_axis", op.report.only_at_pm_x0);
    rb.margin("off_axis_gap", op.norm_estimate - op.report.best_off_cluster);
    rb.witness("matrix", rows);
    json clusters = json::array();
    for (const auto& c : op.report.clusters) clusters.push_back(dvec_json(c));
    rb.witness("attainment_clusters", clusters);

    rb.text << "operator fixing " << x0.str() << " and halving its complement:\n";
    for (int r = 0; r < space.dim(); ++r) {
        rb.text << "  [";
        for (int c = 0; c < space.dim(); ++c)
            rb.text << (c ? ", " : " ") << rat_str(op.matrix.at(r, c));
        rb.text << " ]\n";
    }
    rb.text << "norm estimate " << op.norm_estimate << "; attainment clusters "
            << op.report.clusters.size() << "; only on the +-x0 axis: "
            << (op.report.only_at_pm_x0 ? "true" : "false") << "\n";
}

inline void run_roundtrip(ReportBuilder& rb, const Space& space, const Vector& x0) {
    const RoundtripReport rep = equivalence_roundtrip(space, x0);
    rb.verdict("condition_1_exposed", rep.condition_exposed);
    rb.verdict("condition_2_basis", rep.condition_basis);
    rb.verdict("condition_3_operator", rep.condition_operator);
    rb.margin("classification_margin", rep.point_class.margin);
    rb.margin("basis_margin", rep.basis_margin);
    rb.margin("attainment_gap", rep.attainment_gap);
    rb.margin("functional_margin", rep.functional_margin);
    if (rep.functional) rb.witness("exposing_functional", vector_json(rep.functional->coeffs()));
    if (!rep.obstruction.empty()) rb.verdict("obstruction", rep.obstruction);

    rb.text << "exposed: " << (rep.condition_exposed ? "true" : "false")
            << "; relative basis: " << (rep.condition_basis ? "true" : "false")
            << "; norm-one operator: " << (rep.condition_operator ? "true" : "false") << "\n";
    if (rep.condition_operator) {
        rb.text << "margins: basis " << rep.basis_margin << ", attainment gap "
                << rep.attainment_gap << ", functional " << rep.functional_margin << "\n";
    }
    if (!rep.obstruction.empty()) rb.text << "obstruction: " << rep.obstruction << "\n";
}

inline void run_probe(ReportBuilder& rb, const Space& space, int samples) {
    const ConvexityProbe probe = strict_convexity_probe(space, samples);
    rb.verdict("strictly_convex", probe.strictly_convex);
    rb.margin("max_pair_norm", probe.max_pair_norm);
    rb.margin("exposed_fraction", probe.exposed_fraction);
    if (probe.witness) {
        rb.witness("witness_pair", json::array({vector_json(probe.witness->first),
                                                vector_json(probe.witness->second)}));
    }
    rb.text << "strict convexity at resolution " << probe.samples << ": "
            << (probe.strictly_convex ? "holds, no witness" : "fails, witness found") << "\n";
    if (probe.witness)
        rb.text << "witness pair " << probe.witness->first.str() << " and "
                << probe.witness->second.str() << " (midpoint stays on the sphere)\n";
    rb.text << "max pair norm " << probe.max_pair_norm << "; exposed fraction "
            << probe.exposed_fraction << "\n";
}

} // namespace detail

[[nodiscard]] inline RunResult run(const RunConfig& cfg) {
    try {
        const SpaceSpec spec = parse_space_file(cfg.space_path);
        const Space space = build_space(spec, cfg.tol, cfg.backend);

        const auto arity_error = [&](const std::string& need) -> RunResult {
            RunResult r;
            r.exit_code = kExitInputError;
            r.text = to_string(cfg.command) + " needs " + need + "\n";
            return r;
        };

        std::vector<Vector> inputs;
        for (const auto& s : cfg.vector_args) inputs.push_back(parse_vector(s, space.dim()));

        detail::ReportBuilder rb(cfg, space, inputs);
        switch (cfg.command) {
            case Command::norm:
                if (inputs.empty()) return arity_error("at least one vector");
                detail::run_norm(rb, space, inputs);
                break;
            case Command::orth:
                if (inputs.size() < 2) return arity_error("two vectors (or more for the relative check)");
                if (inputs.size() == 2)
                    detail::run_orth_pair(rb, space, inputs[0], inputs[1]);
                else
                    detail::run_orth_family(rb, space, inputs);
                break;
            case Command::classify:
                if (inputs.size() != 1) return arity_error("exactly one vector");
                detail::describe_class(rb, space, is_exposed(space, inputs[0]));
                break;
            case Command::basis:
                if (inputs.size() != 1) return arity_error("exactly one vector");
                detail::run_basis(rb, space, inputs[0]);
                break;
            case Command::op:
                if (inputs.size() != 1) return arity_error("exactly one vector");
                detail::run_operator(rb, space, inputs[0]);
                break;
            case Command::roundtrip:
                if (inputs.size() != 1) return arity_error("exactly one vector");
                detail::run_roundtrip(rb, space, inputs[0]);
                break;
            case Command::probe:
                if (!inputs.empty()) return arity_error("no vectors");
                detail::run_probe(rb, space, cfg.probe_samples);
                break;
        }
        return std::move(rb).finish(cfg, kExitComputed);
    } catch (const InconsistentClassification& e) {
        RunResult r;
        r.exit_code = kExitInconsistent;
        r.text = std::string("internal inconsistency: ") + e.what() + "\n";
        return r;
    } catch (const Error& e) {
        RunResult r;
        r.exit_code = kExitInputError;
        r.text = std::string("error: ") + e.what() + "\n";
        return r;
    }
}

} // namespace nsg::cli
