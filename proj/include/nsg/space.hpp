#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nsg/detail/gauge2d.hpp"
#include "nsg/detail/polytope.hpp"
#include "nsg/errors.hpp"
#include "nsg/space_spec.hpp"
#include "nsg/tolerance.hpp"
#include "nsg/vector.hpp"

namespace nsg {

enum class Backend { floating, exact };

[[nodiscard]] inline std::string to_string(Backend b) {
    return b == Backend::exact ? "exact" : "float";
}

// Backend request as it arrives from callers; automatic picks exact
// whenever the space supports it.
enum class BackendRequest { automatic, exact, floating };

// =====================================================================
// A finite-dimensional normed space with a chosen evaluation backend.
//
// lp spaces use closed-form norms; p in {1, inf} additionally carries the
// exact polytope kernel (cross polytope / cube vertices). Polyhedral
// spaces always carry the kernel. Gauge bodies evaluate through the 2-d
// piece chain.
// =====================================================================
class Space {
public:
    [[nodiscard]] static bool exact_capable(const SpaceSpec& spec) {
        if (spec.kind == SpaceKind::polyhedral) return true;
        if (spec.kind == SpaceKind::lp)
            return spec.lp().infinite || spec.lp().p == 1.0;
        return false;
    }

    Space(SpaceSpec spec, ToleranceConfig tol, BackendRequest req)
        : spec_(std::move(spec)), tol_(tol) {
        tol_.validate();
        if (spec_.kind == SpaceKind::lp) {
            const auto& lp = spec_.lp();
            if (lp.dim < kMinDim || lp.dim > kMaxDim)
                throw InvalidSpec("lp dimension " + std::to_string(lp.dim) +
                                  " outside supported range [2,4]");
            if (!lp.infinite && !(lp.p >= 1.0 && std::isfinite(lp.p)))
                throw InvalidSpec("lp exponent must satisfy p >= 1");
        }
        const bool capable = exact_capable(spec_);
        if (req == BackendRequest::exact && !capable)
            throw InvalidSpec("exact backend is not available for this space");
        backend_ = (req != BackendRequest::floating && capable) ? Backend::exact
                                                                : Backend::floating;
        switch (spec_.kind) {
        case SpaceKind::lp:
            if (capable) poly_ = build_lp_kernel(spec_.lp());
            break;
        case SpaceKind::polyhedral:
            poly_ = std::make_shared<detail::PolytopeKernel>(
                detail::PolytopeKernel::build(spec_.polyhedral().vertices));
            break;
        case SpaceKind::gauge2d:
            g2d_ = std::make_shared<detail::Gauge2dKernel>(
                detail::Gauge2dKernel::build(spec_.gauge2d()));
            break;
        }
    }

    [[nodiscard]] const SpaceSpec& spec() const { return spec_; }
    [[nodiscard]] const ToleranceConfig& tol() const { return tol_; }
    [[nodiscard]] Backend backend() const { return backend_; }
    [[nodiscard]] int dim() const { return spec_.dim(); }
    [[nodiscard]] SpaceKind kind() const { return spec_.kind; }
    [[nodiscard]] bool has_exact() const { return backend_ == Backend::exact; }

    [[nodiscard]] const detail::PolytopeKernel* poly() const { return poly_.get(); }
    [[nodiscard]] const detail::Gauge2dKernel* g2d() const { return g2d_.get(); }

    [[nodiscard]] bool lp_smooth() const {
        return spec_.kind == SpaceKind::lp && !spec_.lp().infinite && spec_.lp().p > 1.0;
    }

    // ---- norm -----------------------------------------------------------

    [[nodiscard]] double norm(const DVec& x) const {
        check_dim(x.n);
        switch (spec_.kind) {
        case SpaceKind::lp: {
            const auto& lp = spec_.lp();
            if (lp.infinite) {
                double m = 0;
                for (int i = 0; i < x.n; ++i) m = std::max(m, std::fabs(x.v[static_cast<size_t>(i)]));
                return m;
            }
            if (lp.p == 1.0) {
                double s = 0;
                for (int i = 0; i < x.n; ++i) s += std::fabs(x.v[static_cast<size_t>(i)]);
                return s;
            }
            if (lp.p == 2.0) {
                double s = 0;
                for (int i = 0; i < x.n; ++i) s += x.v[static_cast<size_t>(i)] * x.v[static_cast<size_t>(i)];
                return std::sqrt(s);
            }
            double s = 0;
            for (int i = 0; i < x.n; ++i) s += std::pow(std::fabs(x.v[static_cast<size_t>(i)]), lp.p);
            return std::pow(s, 1.0 / lp.p);
        }
        case SpaceKind::polyhedral:
            return poly_->gauge_d(x);
        case SpaceKind::gauge2d:
            return g2d_->gauge(x);
        }
        throw Error("unreachable space kind");
    }

    [[nodiscard]] double norm(const Vector& x) const { return norm(x.approx()); }

    [[nodiscard]] Rat norm_exact(const Vector& x) const {
        check_dim(x.dim());
        if (!poly_) throw InvalidSpec("exact norm requires the exact backend");
        return poly_->gauge(x);
    }

    // ---- dual norm --------------------------------------------------------

    [[nodiscard]] double dual_norm(const DVec& f) const {
        check_dim(f.n);
        switch (spec_.kind) {
        case SpaceKind::lp: {
            const auto& lp = spec_.lp();
            // conjugate exponent
            if (lp.infinite) {
                double s = 0;
                for (int i = 0; i < f.n; ++i) s += std::fabs(f.v[static_cast<size_t>(i)]);
                return s;
            }
            if (lp.p == 1.0) {
                double m = 0;
                for (int i = 0; i < f.n; ++i) m = std::max(m, std::fabs(f.v[static_cast<size_t>(i)]));
                return m;
            }
            const double q = lp.p / (lp.p - 1.0);
            double s = 0;
            for (int i = 0; i < f.n; ++i) s += std::pow(std::fabs(f.v[static_cast<size_t>(i)]), q);
            return std::pow(s, 1.0 / q);
        }
        case SpaceKind::polyhedral: {
            double m = 0;
            for (const auto& v : poly_->vertices_d) m = std::max(m, std::fabs(f.dot(v)));
            return m;
        }
        case SpaceKind::gauge2d:
            return g2d_->support(f).value;
        }
        throw Error("unreachable space kind");
    }

    [[nodiscard]] double dual_norm(const Functional& f) const { return dual_norm(f.approx()); }

    [[nodiscard]] Rat dual_norm_exact(const Functional& f) const {
        check_dim(f.dim());
        if (!poly_) throw InvalidSpec("exact dual norm requires the exact backend");
        Rat best = 0;
        for (const auto& v : poly_->vertices) {
            Rat s = rat_abs(f(v));
            if (s > best) best = s;
        }
        return best;
    }

    // ---- unit sphere sampling ----------------------------------------------

    // Deterministic low-discrepancy sphere grids, gauge normalized. The seed
    // rotates the pattern without changing its distribution.
    [[nodiscard]] std::vector<DVec> sphere_sample(int count, unsigned seed = 0) const {
        if (count <= 0) throw InvalidSpec("sphere_sample: count must be positive");
        std::vector<DVec> out;
        out.reserve(static_cast<size_t>(count));
        const double phase = seed == 0 ? 0.0
                                       : detail::wrap_angle(0.61803398874989484820 *
                                                            static_cast<double>(seed) * detail::kTwoPi);
        const int n = dim();
        if (n == 2) {
            for (int i = 0; i < count; ++i) {
                const double th = detail::kTwoPi * i / count + phase;
                out.push_back(normalized(DVec{std::cos(th), std::sin(th)}));
            }
        } else if (n == 3) {
            // Fibonacci sphere
            const double ga = detail::kTwoPi * (1.0 - 0.61803398874989484820);
            for (int i = 0; i < count; ++i) {
                const double z = 1.0 - (2.0 * i + 1.0) / count;
                const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double th = ga * i + phase;
                out.push_back(normalized(DVec{r * std::cos(th), r * std::sin(th), z}));
            }
        } else {
            // Halton(2,3,5) mapped onto S^3
            for (int i = 0; i < count; ++i) {
                const int k = i + 1 + static_cast<int>(seed % 97) * 131;
                const double u = halton(k, 2), v = halton(k, 3), w = halton(k, 5);
                const double su = std::sqrt(u), cu = std::sqrt(1.0 - u);
                out.push_back(normalized(DVec{cu * std::sin(detail::kTwoPi * v),
                                              cu * std::cos(detail::kTwoPi * v),
                                              su * std::sin(detail::kTwoPi * w),
                                              su * std::cos(detail::kTwoPi * w)}));
            }
        }
        return out;
    }

    [[nodiscard]] DVec normalized(const DVec& x) const {
        const double g = norm(x);
        if (g <= 0) throw ZeroDirection("cannot normalize the zero vector");
        return x.scaled(1.0 / g);
    }

    void check_dim(int n) const {
        if (n != dim())
            throw DimensionMismatch("vector dimension " + std::to_string(n) +
                                    " does not match space dimension " + std::to_string(dim()));
    }

private:
    [[nodiscard]] static std::shared_ptr<detail::PolytopeKernel> build_lp_kernel(const LpSpec& lp) {
        std::vector<Vector> verts;
        if (lp.infinite) {
            const int total = 1 << lp.dim;
            for (int mask = 0; mask < total; ++mask) {
                Vector v = Vector::zeros(lp.dim);
                for (int i = 0; i < lp.dim; ++i) v[i] = (mask >> i) & 1 ? Rat(1) : Rat(-1);
                verts.push_back(v);
            }
        } else {
            for (int i = 0; i < lp.dim; ++i) {
                Vector v = Vector::zeros(lp.dim);
                v[i] = 1;
                verts.push_back(v);
                v[i] = -1;
                verts.push_back(v);
            }
        }
        return std::make_shared<detail::PolytopeKernel>(detail::PolytopeKernel::build(verts));
    }

    [[nodiscard]] static double halton(int i, int base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= base;
            r += f * (i % base);
            i /= base;
        }
        return r;
    }

    SpaceSpec spec_;
    ToleranceConfig tol_;
    Backend backend_ = Backend::floating;
    std::shared_ptr<detail::PolytopeKernel> poly_;
    std::shared_ptr<detail::Gauge2dKernel> g2d_;
};

[[nodiscard]] inline Space build_space(const SpaceSpec& spec,
                                       const ToleranceConfig& tol = {},
                                       BackendRequest req = BackendRequest::automatic) {
    return Space(spec, tol, req);
}

} // namespace nsg
