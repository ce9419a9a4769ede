#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "nsg/space.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace nsg;

namespace {

[[nodiscard]] DVec random_vec(std::mt19937& rng, int n, double lo = -5.0, double hi = 5.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    DVec v{0, 0};
    v.n = n;
    do {
        for (int i = 0; i < n; ++i) v.v[static_cast<size_t>(i)] = d(rng);
    } while (v.l2() < 1e-3);
    return v;
}

[[nodiscard]] std::vector<Space> survey_spaces() {
    std::vector<Space> out;
    out.push_back(build_space(SpaceSpec::make_lp(1.0, 2)));
    out.push_back(build_space(SpaceSpec::make_lp(1.5, 2)));
    out.push_back(build_space(SpaceSpec::make_lp(2.0, 3)));
    out.push_back(build_space(SpaceSpec::make_lp(3.0, 4)));
    out.push_back(build_space(SpaceSpec::make_linf(2)));
    out.push_back(build_space(SpaceSpec::make_linf(3)));
    out.push_back(build_space(fixtures::hexagon()));
    out.push_back(build_space(fixtures::spiky3()));
    out.push_back(build_space(fixtures::stadium()));
    out.push_back(build_space(fixtures::parabolic()));
    return out;
}

} // namespace

// ---------------------------------------------------------------------
// pinned values
// ---------------------------------------------------------------------

TEST_CASE("stadium norms match the bisection oracle", "[space][gauge2d]") {
    auto s = build_space(fixtures::stadium());

    CHECK(s.norm(DVec{0, 2}) == Catch::Approx(1.0).margin(1e-12));
    CHECK(s.norm(DVec{1, 1}) == Catch::Approx(1.0).margin(1e-12));
    CHECK(s.norm(DVec{1, 0}) == Catch::Approx(1.0).margin(1e-12));

    // oracle pins the cap direction: ray through (1,1) leaves at the junction
    const double pinned = oracle::gauge_bisect(oracle::stadium_member, DVec{2, 2});
    CHECK(pinned == Catch::Approx(2.0).margin(1e-9));
    CHECK(s.norm(DVec{2, 2}) == Catch::Approx(pinned).margin(1e-9));

    std::mt19937 rng(991);
    for (int i = 0; i < 200; ++i) {
        const DVec x = random_vec(rng, 2);
        const double want = oracle::gauge_bisect(oracle::stadium_member, x);
        CHECK(s.norm(x) == Catch::Approx(want).margin(1e-9 * (1 + want)));
    }
}

TEST_CASE("parabolic body norms match the bisection oracle", "[space][gauge2d]") {
    auto s = build_space(fixtures::parabolic());

    CHECK(s.norm(DVec{0, 1.5}) == Catch::Approx(1.0).margin(1e-12));
    CHECK(s.norm(DVec{1, 1}) == Catch::Approx(1.0).margin(1e-12));
    CHECK(s.norm(DVec{0, 3}) == Catch::Approx(2.0).margin(1e-12));

    std::mt19937 rng(992);
    for (int i = 0; i < 200; ++i) {
        const DVec x = random_vec(rng, 2);
        const double want = oracle::gauge_bisect(oracle::parabolic_member, x);
        CHECK(s.norm(x) == Catch::Approx(want).margin(1e-9 * (1 + want)));
    }
}

TEST_CASE("lp norms take their closed forms", "[space][lp]") {
    auto l1 = build_space(SpaceSpec::make_lp(1.0, 3));
    auto l2 = build_space(SpaceSpec::make_lp(2.0, 2));
    auto li = build_space(SpaceSpec::make_linf(3));
    CHECK(l1.norm(DVec{1, -2, 3}) == Catch::Approx(6.0));
    CHECK(l2.norm(DVec{3, 4}) == Catch::Approx(5.0));
    CHECK(li.norm(DVec{1, -2, 1.5}) == Catch::Approx(2.0));

    auto l3 = build_space(SpaceSpec::make_lp(3.0, 2));
    CHECK(l3.norm(DVec{1, 1}) == Catch::Approx(std::pow(2.0, 1.0 / 3.0)));
}

TEST_CASE("dual norms pair conjugate exponents and polar vertices", "[space][dual]") {
    auto li3 = build_space(SpaceSpec::make_linf(3));
    CHECK(li3.dual_norm(DVec{1, 1, 1}) == Catch::Approx(3.0));
    CHECK(rat_str(li3.dual_norm_exact(Functional(Vector{Rat(1), Rat(1), Rat(1)}))) == "3");

    auto l2 = build_space(SpaceSpec::make_lp(2.0, 2));
    CHECK(l2.dual_norm(DVec{3, 4}) == Catch::Approx(5.0));

    auto l15 = build_space(SpaceSpec::make_lp(1.5, 2));
    // conjugate exponent 3
    CHECK(l15.dual_norm(DVec{1, 1}) == Catch::Approx(std::pow(2.0, 1.0 / 3.0)));

    // gauge bodies: closed-form support against an independent boundary scan
    auto st = build_space(fixtures::stadium());
    auto pb = build_space(fixtures::parabolic());
    std::mt19937 rng(41);
    for (int i = 0; i < 50; ++i) {
        const DVec f = random_vec(rng, 2);
        auto nrm_st = [&](const DVec& u) { return st.norm(u); };
        auto nrm_pb = [&](const DVec& u) { return pb.norm(u); };
        CHECK(st.dual_norm(f) == Catch::Approx(oracle::dual_scan_2d(nrm_st, f)).margin(1e-6 * (1 + st.dual_norm(f))));
        CHECK(pb.dual_norm(f) == Catch::Approx(oracle::dual_scan_2d(nrm_pb, f)).margin(1e-6 * (1 + pb.dual_norm(f))));
    }
}

TEST_CASE("dual norm certifies the functional bound on the ball", "[space][dual]") {
    std::mt19937 rng(42);
    for (auto& s : survey_spaces()) {
        for (int i = 0; i < 40; ++i) {
            const DVec f = random_vec(rng, s.dim());
            const double dn = s.dual_norm(f);
            for (const auto& p : s.sphere_sample(64, static_cast<unsigned>(i)))
                CHECK(f.dot(p) <= dn * (1 + 1e-9) + 1e-12);
        }
    }
}

// ---------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------

TEST_CASE("euclidean plane sampling starts at the axis and takes quarter turns", "[space][sample]") {
    auto l2 = build_space(SpaceSpec::make_lp(2.0, 2));
    const auto pts = l2.sphere_sample(4);
    REQUIRE(pts.size() == 4);
    CHECK(pts[0].v[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(pts[0].v[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(pts[1].v[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(pts[1].v[1] == Catch::Approx(1.0).margin(1e-12));
    CHECK(pts[2].v[0] == Catch::Approx(-1.0).margin(1e-12));
    CHECK(pts[3].v[1] == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("sphere samples land on the unit sphere of every backend", "[space][sample]") {
    for (auto& s : survey_spaces()) {
        for (const auto& p : s.sphere_sample(500))
            REQUIRE(s.norm(p) == Catch::Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("sampling is deterministic in count and seed", "[space][sample]") {
    auto s = build_space(SpaceSpec::make_lp(2.0, 3));
    const auto a = s.sphere_sample(128, 7);
    const auto b = s.sphere_sample(128, 7);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i)
        for (int c = 0; c < 3; ++c)
            CHECK(a[i].v[static_cast<size_t>(c)] == b[i].v[static_cast<size_t>(c)]);
    const auto c = s.sphere_sample(128, 8);
    bool all_same = true;
    for (size_t i = 0; i < a.size() && all_same; ++i)
        all_same = a[i].v[0] == c[i].v[0] && a[i].v[1] == c[i].v[1];
    CHECK_FALSE(all_same);
}

// ---------------------------------------------------------------------
// norm axioms
// ---------------------------------------------------------------------

TEST_CASE("norms are homogeneous, subadditive and sign symmetric", "[space][axioms]") {
    std::mt19937 rng(2024);
    for (auto& s : survey_spaces()) {
        for (int i = 0; i < 1000; ++i) {
            const DVec x = random_vec(rng, s.dim());
            const DVec y = random_vec(rng, s.dim());
            const double nx = s.norm(x), ny = s.norm(y);

            // sign symmetry is bitwise by construction
            REQUIRE(s.norm(-x) == nx);

            std::uniform_real_distribution<double> alpha(-3.0, 3.0);
            const double a = alpha(rng);
            REQUIRE(s.norm(x.scaled(a)) == Catch::Approx(std::fabs(a) * nx).margin(1e-12 * (1 + nx)));

            REQUIRE(s.norm(x + y) <= nx + ny + 1e-12 * (1 + nx + ny));
        }
    }
}

TEST_CASE("exact and floating backends agree on polytope gauges", "[space][backend]") {
    std::mt19937 rng(77);
    for (const auto& spec : {SpaceSpec::make_lp(1.0, 3), SpaceSpec::make_linf(3),
                             fixtures::hexagon(), fixtures::spiky3()}) {
        auto s = build_space(spec);
        REQUIRE(s.has_exact());
        for (int i = 0; i < 1000; ++i) {
            const DVec x = random_vec(rng, s.dim());
            const Rat exact = s.norm_exact(Vector::from(x));
            CHECK(s.norm(x) == Catch::Approx(to_double(exact)).margin(1e-12 * (1 + to_double(exact))));
        }
    }
}

TEST_CASE("boundary construction points have unit gauge", "[space][gauge2d]") {
    for (const auto& spec : {fixtures::stadium(), fixtures::parabolic()}) {
        auto s = build_space(spec);
        const auto* k = s.g2d();
        REQUIRE(k != nullptr);
        for (int i = 0; i < 1440; ++i) {
            const DVec p = k->boundary_point(6.283185307179586 * i / 1440);
            REQUIRE(s.norm(p) == Catch::Approx(1.0).margin(1e-9));
        }
    }
}

// ---------------------------------------------------------------------
// validation and rejection
// ---------------------------------------------------------------------

TEST_CASE("asymmetric or degenerate specs are rejected", "[space][validation]") {
    // missing mirror vertex
    std::vector<Vector> bad = {Vector{Rat(1), Rat(0)}, Vector{Rat(-1), Rat(0)},
                               Vector{Rat(0), Rat(1)}};
    CHECK_THROWS_AS(build_space(SpaceSpec::make_polyhedral(bad)), InvalidSpec);

    // vertices confined to a line
    std::vector<Vector> flat = {Vector{Rat(1), Rat(1)}, Vector{Rat(-1), Rat(-1)}};
    CHECK_THROWS_AS(build_space(SpaceSpec::make_polyhedral(flat)), InvalidSpec);

    // gauge body with a gap
    SegmentPiece right{DVec{1, -1}, DVec{1, 1}};
    SegmentPiece left{DVec{-1, 1}, DVec{-1, -1}};
    CHECK_THROWS_AS(build_space(SpaceSpec::make_gauge2d({right, left})), InvalidSpec);

    // shifted cap breaks symmetry
    {
        CircleArcPiece top;
        top.center = DVec{0, 1};
        top.radius = 1;
        top.bounds.y_min = 1;
        CircleArcPiece bottom;
        bottom.center = DVec{0, -0.5};
        bottom.radius = 1;
        bottom.bounds.y_max = -0.5;
        SegmentPiece r2{DVec{1, -0.5}, DVec{1, 1}};
        SegmentPiece l2{DVec{-1, 1}, DVec{-1, -0.5}};
        CHECK_THROWS_AS(build_space(SpaceSpec::make_gauge2d({r2, top, l2, bottom})), InvalidSpec);
    }

    // non-convex chain: caps dented inward
    {
        SegmentPiece r3{DVec{1, -1}, DVec{1, 1}};
        SegmentPiece l3{DVec{-1, 1}, DVec{-1, -1}};
        CircleArcPiece top;
        top.center = DVec{0, 3};
        top.radius = std::sqrt(5.0);
        top.bounds.y_max = 1;
        top.bounds.x_min = -1;
        top.bounds.x_max = 1;
        CircleArcPiece bottom;
        bottom.center = DVec{0, -3};
        bottom.radius = std::sqrt(5.0);
        bottom.bounds.y_min = -1;
        bottom.bounds.x_min = -1;
        bottom.bounds.x_max = 1;
        CHECK_THROWS_AS(build_space(SpaceSpec::make_gauge2d({r3, top, l3, bottom})), InvalidSpec);
    }

    CHECK_THROWS_AS(build_space(SpaceSpec::make_lp(0.5, 2)), InvalidSpec);
    CHECK_THROWS_AS(build_space(SpaceSpec::make_lp(2.0, 5)), InvalidSpec);
    CHECK_THROWS_AS(build_space(SpaceSpec::make_lp(2.0, 1)), InvalidSpec);
}

TEST_CASE("exact backend requests fail on smooth lp spaces", "[space][backend]") {
    CHECK_THROWS_AS(build_space(SpaceSpec::make_lp(2.0, 2), ToleranceConfig{}, BackendRequest::exact),
                    InvalidSpec);
    CHECK_NOTHROW(build_space(SpaceSpec::make_lp(1.0, 2), ToleranceConfig{}, BackendRequest::exact));
    CHECK_NOTHROW(build_space(fixtures::hexagon(), ToleranceConfig{}, BackendRequest::exact));
    // float works everywhere
    auto s = build_space(fixtures::hexagon(), ToleranceConfig{}, BackendRequest::floating);
    CHECK(s.backend() == Backend::floating);
}

TEST_CASE("dimension mismatches are reported", "[space][validation]") {
    auto s = build_space(SpaceSpec::make_lp(2.0, 2));
    CHECK_THROWS_AS(s.norm(DVec{1, 2, 3}), DimensionMismatch);
    CHECK_THROWS_AS(s.check_dim(3), DimensionMismatch);
}

TEST_CASE("space specs survive a json round trip", "[space][serialization]") {
    for (const auto& spec : {SpaceSpec::make_lp(1.5, 3), SpaceSpec::make_linf(4),
                             fixtures::hexagon(), fixtures::stadium(), fixtures::parabolic()}) {
        const auto js = space_spec_to_json(spec);
        const auto back = space_spec_from_json(js);
        auto a = build_space(spec);
        auto b = build_space(back);
        std::mt19937 rng(5);
        for (int i = 0; i < 50; ++i) {
            const DVec x = random_vec(rng, a.dim());
            REQUIRE(a.norm(x) == Catch::Approx(b.norm(x)).margin(1e-12));
        }
    }
}
