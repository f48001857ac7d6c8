#include "sunit/descent.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <map>
#include <random>
#include <set>

using namespace sunit;
using sunit::testing::rf;

namespace {

RatFunc c(std::uint32_t p, std::int64_t v) { return RatFunc::constant(p, v); }
RatFunc tt(std::uint32_t p) { return RatFunc::t(p); }

GroupPresentation t_and_one_minus_t(std::uint32_t p) { return build_group({tt(p), c(p, 1) - tt(p)}, FieldContext(p)); }

LinearVariety x_plus_y(std::uint32_t p) { return affine_variety(p, 2, {{c(p, 1), c(p, 1), c(p, 1)}}); }

LinearVariety plane(std::uint32_t p) { return affine_variety(p, 3, {{c(p, 1), c(p, 1), c(p, -1), c(p, 1)}}); }

ExpPoint coords_of(const Vec& x, const std::vector<Place>& fs) {
    auto pt = point_coords(x, fs);
    REQUIRE(pt.has_value());
    return *pt;
}

BigInt brute_pow_mod(const BigInt& q, int e, const BigInt& n) {
    BigInt r = 1;
    for (int i = 0; i < e; ++i) r = (r * q) % n;
    return r;
}

bool brute_holds(const BigInt& q, int e, const std::vector<CongruenceConstraint>& cons) {
    for (const auto& k : cons)
        if (mod_floor(k.L * brute_pow_mod(q, e, k.N), k.N) != mod_floor(k.M, k.N)) return false;
    return true;
}

// Brute-force set {(x, 1 - x)} with x and 1 - x in the group and height at most b.
std::set<ExpPoint> brute_line_points(const DescentContext& ctx, const GroupPresentation& grp, std::int64_t b) {
    const std::uint32_t p = ctx.p();
    std::set<ExpPoint> out;
    for (const auto& e : enumerate_bounded(grp, b)) {
        const RatFunc x = reconstruct(e, grp);
        const RatFunc y = c(p, 1) - x;
        if (y.is_zero()) continue;
        auto m = support_coords(y, ctx.support());
        if (!m || !member_coords(*m, grp)) continue;
        if (proj_height({c(p, 1), x, y}) > b) continue;
        out.insert(coords_of({x, y}, ctx.support()));
    }
    return out;
}

std::set<ExpPoint> expanded(const DescentContext& ctx, const SolutionSet& sol, const BigInt& cap) {
    std::set<ExpPoint> out;
    for (const auto& f : sol.families)
        for (auto& x : expand_family(ctx, f, cap)) out.insert(x);
    return out;
}

}  // namespace

TEST_CASE("congruence_solve examples") {
    auto a = congruence_solve(3, {{1, 2, 5}});
    CHECK_FALSE(a.finite);
    CHECK(a.period == 4);
    CHECK(a.offsets == std::vector<BigInt>{3});
    CHECK(a.exceptional.empty());

    auto b = congruence_solve(3, {{1, 3, 9}});
    CHECK(b.finite);
    CHECK(b.exceptional == std::vector<BigInt>{1});
    CHECK(b.offsets.empty());

    auto d = congruence_solve(2, {{1, 42, 83}});
    CHECK_FALSE(d.finite);
    CHECK(d.period == 82);
    REQUIRE(d.offsets.size() == 1);
    CHECK(d.offsets[0] == 81);
    CHECK(d.contains(81));
    CHECK(d.contains(81 + 82));
    CHECK_FALSE(d.contains(80));

    CHECK_THROWS_AS(congruence_solve(6, {{1, 1, 5}}), MathError);
    CHECK_THROWS_AS(congruence_solve(1, {{1, 1, 5}}), MathError);
}

TEST_CASE("congruence_solve agrees with brute force on random systems") {
    std::mt19937_64 rng(11);
    const std::vector<int> qs{2, 3, 4, 5, 7, 8, 9};
    std::uniform_int_distribution<int> qd(0, static_cast<int>(qs.size()) - 1), nd(1, 50), lm(-50, 50), kd(1, 2);
    for (int it = 0; it < 300; ++it) {
        const BigInt q = qs[qd(rng)];
        std::vector<CongruenceConstraint> cons;
        for (int k = kd(rng); k > 0; --k) cons.push_back({lm(rng), lm(rng), nd(rng)});
        const auto sol = congruence_solve(q, cons);
        for (int e = 0; e <= 600; ++e) REQUIRE(sol.contains(e) == brute_holds(q, e, cons));
    }
}

TEST_CASE("x + y = 1 over the radical of <t, 1 - t> has p + 4 families") {
    for (std::uint32_t p : {3u, 5u, 7u}) {
        CAPTURE(p);
        DescentContext ctx(x_plus_y(p), t_and_one_minus_t(p));
        const auto sol = solve(ctx, SolveMode::Radical);
        REQUIRE(sol.families.size() == p + 4);
        const RatFunc t = tt(p), one = c(p, 1);
        std::set<ExpPoint> base{
            coords_of({t, one - t}, ctx.support()),
            coords_of({one - t, t}, ctx.support()),
            coords_of({one / t, -(one - t) / t}, ctx.support()),
            coords_of({-(one - t) / t, one / t}, ctx.support()),
            coords_of({one / (one - t), -t / (one - t)}, ctx.support()),
            coords_of({-t / (one - t), one / (one - t)}, ctx.support()),
        };
        std::set<ExpPoint> constants, frobenius;
        for (const auto& f : sol.families) {
            CHECK(f.q == p);
            CHECK(f.point_tail());
            if (f.h() == 0) {
                constants.insert(f.tail);
            } else {
                CHECK(f.h() == 1);
                CHECK(f.steps[0] == ExpMatrix(2, IntVec(2, 0)));
                frobenius.insert(f.tail);
            }
        }
        CHECK(frobenius == base);
        std::set<ExpPoint> expected_constants;
        for (std::int64_t a = 2; a < p; ++a)
            expected_constants.insert(coords_of({c(p, a), c(p, 1 - a)}, ctx.support()));
        CHECK(constants == expected_constants);
    }
}

TEST_CASE("t^42 x + y = 1 over <t^83, 1 - t> in characteristic 2") {
    const std::uint32_t p = 2;
    const RatFunc t = tt(p), one = c(p, 1);
    const GroupPresentation g = build_group({t.pow(83), one - t}, FieldContext(p));
    DescentContext ctx(affine_variety(p, 2, {{t.pow(42), one, one}}), g);
    const auto sol = solve(ctx, SolveMode::Group);
    CHECK(sol.mode == SolveMode::Group);
    CHECK(sol.certificate.f == 82);
    const BigInt on_gen("29130742641316365655570");
    const BigInt on_one_minus_t("2417851639229258349412352");
    ExpPoint minimal{{MonicCoords{1, {83 * on_gen, 0}}, MonicCoords{1, {0, on_one_minus_t}}}};
    int hits = 0;
    for (const auto& f : sol.families) {
        CHECK(f.h() == 1);
        REQUIRE(f.congruence.size() == 1);
        CHECK(f.congruence[0].period == 82);
        if (family_member(f, {BigInt(0)}) != minimal) continue;
        ++hits;
        const auto pts = expand_family(ctx, f, on_one_minus_t);
        REQUIRE(pts.size() == 1);
        CHECK(pts[0] == minimal);
        CHECK(verify_point(ctx.variety(), g, minimal).passed());
    }
    CHECK(hits == 1);
}

TEST_CASE("t x + y = 1 over <t^p, 1 - t> only keeps e = 0") {
    const std::uint32_t p = 3;
    const RatFunc t = tt(p), one = c(p, 1);
    const GroupPresentation g = build_group({t.pow(3), one - t}, FieldContext(p));
    DescentContext ctx(affine_variety(p, 2, {{t, one, one}}), g);
    const auto radical_sol = solve(ctx, SolveMode::Radical);
    CHECK(std::any_of(radical_sol.families.begin(), radical_sol.families.end(), [](const FrobeniusFamily& f) { return f.h() == 1; }));
    const auto sol = descend_to_G(ctx, radical_sol);
    REQUIRE(sol.families.size() == 1);
    const auto& f = sol.families[0];
    CHECK(f.h() == 0);
    CHECK(f.tail == coords_of({one, one - t}, ctx.support()));
    REQUIRE(f.congruence.size() == 1);
    CHECK(f.congruence[0] == IndexConstraint{0, 0});
    CHECK(sol.isolated.size() == 1);
}

TEST_CASE("descent with G equal to its radical leaves the families unchanged") {
    const std::uint32_t p = 3;
    DescentContext base(x_plus_y(p), t_and_one_minus_t(p));
    DescentContext ctx(x_plus_y(p), base.radical_group());
    const auto rad = solve(ctx, SolveMode::Radical);
    const auto grp = descend_to_G(ctx, rad);
    CHECK(grp.certificate.f == 1);
    REQUIRE(grp.families.size() == rad.families.size());
    for (std::size_t i = 0; i < rad.families.size(); ++i) {
        CHECK(grp.families[i].steps == rad.families[i].steps);
        CHECK(grp.families[i].tail == rad.families[i].tail);
        CHECK(grp.families[i].q == rad.families[i].q);
    }
}

TEST_CASE("plane x + y - z = 1 over the radical of <t, 1 - t> for p = 5") {
    const std::uint32_t p = 5;
    const RatFunc t = tt(p), one = c(p, 1);
    const GroupPresentation g = t_and_one_minus_t(p);
    DescentContext ctx(plane(p), g);
    const auto sol = solve(ctx, SolveMode::Radical);

    const LinearVariety line = affine_variety(p, 3, {{t, one, c(p, 0), one}, {one - t, c(p, 0), c(p, -1), c(p, 0)}});
    CHECK(std::any_of(sol.families.begin(), sol.families.end(),
                      [&](const FrobeniusFamily& f) { return f.carrier && *f.carrier == line; }));

    const ExpPoint ones = coords_of({one, one, one}, ctx.support());
    CHECK(std::any_of(sol.families.begin(), sol.families.end(), [&](const FrobeniusFamily& f) {
        return f.h() == 0 && f.tail == ones && f.subgroup == std::vector<std::vector<std::size_t>>{{0, 2}};
    }));

    const ExpPoint point = coords_of({t, (one - t) / t, (one - t) * (one - t) / t}, ctx.support());
    CHECK(std::any_of(sol.families.begin(), sol.families.end(),
                      [&](const FrobeniusFamily& f) { return f.point_tail() && f.tail == point; }));

    // Points x = t^((q-1) r), y = (1-t)^(q r), z = t^((q-1) r) (1-t)^r.
    for (int q : {5, 25})
        for (int r : {5, 25}) {
            CAPTURE(q);
            CAPTURE(r);
            const Vec x{t.pow((q - 1) * r), (one - t).pow(q * r), t.pow((q - 1) * r) * (one - t).pow(r)};
            CHECK(verify_point(ctx.variety(), g, x).passed());
            const ExpPoint e = coords_of(x, ctx.support());
            bool member = false;
            for (const auto& f : sol.families) {
                if (f.h() != 2) continue;
                for (int a = 0; a < 3 && !member; ++a)
                    for (int b = 0; b < 3 && !member; ++b) member = family_member(f, {BigInt(a), BigInt(b)}) == e;
            }
            CHECK(member);
        }

    for (const auto& f : sol.families) CHECK(f.h() <= 2);
}

TEST_CASE("family count for the plane is reproducible across runs and thread counts") {
    const std::uint32_t p = 5;
    DescentContext ctx(plane(p), t_and_one_minus_t(p));
    SolveOptions one_thread, four_threads;
    four_threads.threads = 4;
    const auto a = solve(ctx, SolveMode::Radical, one_thread);
    const auto b = solve(ctx, SolveMode::Radical, four_threads);
    const auto c2 = solve(ctx, SolveMode::Radical, one_thread);
    REQUIRE(a.families.size() == b.families.size());
    REQUIRE(a.families.size() == c2.families.size());
    for (std::size_t i = 0; i < a.families.size(); ++i) {
        CHECK(family_equal(a.families[i], b.families[i]));
        CHECK(family_equal(a.families[i], c2.families[i]));
    }
    CHECK(a.provenance == b.provenance);
}

TEST_CASE("symmetrized points of the plane") {
    const std::uint32_t p = 5;
    const RatFunc t = tt(p), one = c(p, 1);
    DescentContext ctx(plane(p), t_and_one_minus_t(p));
    const auto sol = solve(ctx, SolveMode::Radical);
    const ExpPoint first = coords_of({t.pow(4), (one - t).pow(5), t.pow(4) * (one - t)}, ctx.support());
    const FrobeniusFamily* fam = nullptr;
    for (const auto& f : sol.families)
        if (f.h() == 2 && family_member(f, {BigInt(0), BigInt(0)}) == first) fam = &f;
    REQUIRE(fam != nullptr);
    const FrobeniusFamily sym = symmetrize(ctx, *fam);
    CHECK(sym.kind == FamilyKind::Symmetric);
    REQUIRE(sym.points.size() == 3);
    // x = t^(s-r), y = (1-t)^s, z = t^(s-r) (1-t)^r with r = 5^l1, s = 5^(l2+1), in any order.
    for (int l1 = 0; l1 < 4; ++l1)
        for (int l2 = 0; l2 < 4; ++l2) {
            const ExpPoint m = family_member(sym, {BigInt(l1), BigInt(l2)});
            CHECK(on_variety(ctx.variety().forms(), ctx.support(), m));
            const std::int64_t r = static_cast<std::int64_t>(std::pow(5, l1)), s = static_cast<std::int64_t>(std::pow(5, l2 + 1));
            const Vec expected{t.pow(s - r), (one - t).pow(s), t.pow(s - r) * (one - t).pow(r)};
            CHECK(m == coords_of(expected, ctx.support()));
        }

    // h = 0 families symmetrize to their tail.
    for (const auto& f : sol.families)
        if (f.h() == 0) {
            const auto s = symmetrize(ctx, f);
            REQUIRE(s.points.size() == 1);
            RatMatrix want;
            for (const auto& m : f.tail.coords) want.emplace_back(m.exponents.begin(), m.exponents.end());
            CHECK(s.points[0].exponents == want);
        }
}

TEST_CASE("nondegenerate filter keeps point tails and drops cosets") {
    const std::uint32_t p = 5;
    const RatFunc t = tt(p), one = c(p, 1);
    DescentContext ctx(plane(p), t_and_one_minus_t(p));
    const auto sol = solve(ctx, SolveMode::Radical);
    const auto kept = theorem3_filter(ctx, sol.families);
    std::size_t point_tailed = 0;
    for (const auto& f : sol.families) point_tailed += f.point_tail();
    CHECK(kept.size() == point_tailed);
    CHECK(kept.size() < sol.families.size());
    for (const auto& f : kept) CHECK(f.point_tail());

    // Members with a vanishing subsum are removed at expansion time.
    ExpandOptions nd;
    nd.nondegenerate = true;
    for (const auto& f : sol.families) {
        if (f.point_tail()) continue;
        CHECK(expand_family(ctx, f, 3, nd).empty());
        CHECK_FALSE(expand_family(ctx, f, 3).empty());
    }

    DescentContext degenerate(affine_variety(p, 2, {{one, c(p, 0), t}}), t_and_one_minus_t(p));
    CHECK_THROWS_AS(theorem3_filter(degenerate, {}), MathError);
}

TEST_CASE("expand_family examples") {
    const std::uint32_t p = 3;
    const RatFunc t = tt(p), one = c(p, 1);
    DescentContext ctx(x_plus_y(p), t_and_one_minus_t(p));
    const auto sol = solve(ctx, SolveMode::Radical);
    const ExpPoint base = coords_of({t, one - t}, ctx.support());
    const FrobeniusFamily* fam = nullptr;
    for (const auto& f : sol.families)
        if (f.tail == base) fam = &f;
    REQUIRE(fam != nullptr);
    const auto pts = expand_family(ctx, *fam, 9);
    std::set<ExpPoint> got(pts.begin(), pts.end());
    std::set<ExpPoint> want{base, coords_of({t.pow(3), (one - t).pow(3)}, ctx.support()),
                            coords_of({t.pow(9), (one - t).pow(9)}, ctx.support())};
    CHECK(got == want);
    CHECK(expand_family(ctx, *fam, 0).empty());
}

TEST_CASE("solutions of x + y = 1 up to height 27 match brute force in both modes") {
    const std::uint32_t p = 3;
    const GroupPresentation g = t_and_one_minus_t(p);
    DescentContext ctx(x_plus_y(p), g);
    const auto rad = solve(ctx, SolveMode::Radical);
    CHECK(expanded(ctx, rad, 27) == brute_line_points(ctx, ctx.radical_group(), 27));
    const auto grp = solve(ctx, SolveMode::Group);
    const auto group_points = expanded(ctx, grp, 27);
    CHECK(group_points == brute_line_points(ctx, g, 27));
    // The group members are exactly the radical members that lie in G.
    std::set<ExpPoint> restricted;
    for (const auto& x : expanded(ctx, rad, 27))
        if (verify_point(ctx.variety(), g, x).passed()) restricted.insert(x);
    CHECK(restricted == group_points);
}

TEST_CASE("coset inputs") {
    const std::uint32_t p = 3;
    const RatFunc t = tt(p), one = c(p, 1);
    // x1 = t x2 is a coset of the diagonal subgroup.
    DescentContext ctx(LinearVariety(p, 2, {{c(p, 0), one, -t}}), t_and_one_minus_t(p));
    const auto sol = solve(ctx, SolveMode::Radical);
    REQUIRE(sol.families.size() == 1);
    CHECK(sol.families[0].h() == 0);
    CHECK(sol.families[0].subgroup == std::vector<std::vector<std::size_t>>{{0, 1}});
    for (const auto& x : expand_family(ctx, sol.families[0], 3)) CHECK(verify_point(ctx.variety(), ctx.radical_group(), x).passed());

    // A ratio outside the radical leaves nothing.
    DescentContext outside(affine_variety(p, 2, {{one, c(p, 0), one + t * t}}), t_and_one_minus_t(p));
    CHECK(solve(outside, SolveMode::Radical).families.empty());
}

TEST_CASE("proposition step on x + y = 1 against the splitting") {
    const std::uint32_t p = 3;
    const RatFunc t = tt(p), one = c(p, 1);
    DescentContext ctx(x_plus_y(p), t_and_one_minus_t(p));
    const auto& v = ctx.variety();
    std::set<ExpPoint> points;
    for (std::size_t a = 0; a < ctx.class_count(); ++a)
        for (std::size_t b = 0; b < ctx.class_count(); ++b) {
            const auto pc = proposition_step(v, ctx, {a, b});
            const std::vector<RatFunc> g{one, ctx.rep(a), ctx.rep(b)};
            const auto split = split_variety(v, g);
            if (a == 0 && b == 0) {
                CHECK(pc.s == 1);
                REQUIRE(pc.reduced.has_value());
                CHECK(*pc.reduced == v);
            }
            if (pc.s == 1 && !pc.empty) {
                REQUIRE(split.has_value());
                CHECK(*pc.reduced == *split);
                CHECK(image_variety(*split, g) == v);
            }
            if (pc.s == 2 && !pc.empty) {
                REQUIRE(pc.point.has_value());
                REQUIRE(split.has_value());
                CHECK(split->dim() == 0);
                CHECK(verify_point(v, ctx.radical_group(), *pc.point).passed());
                points.insert(coords_of(*pc.point, ctx.support()));
            }
            if (!split) CHECK(pc.empty);
        }
    std::set<ExpPoint> base{
        coords_of({t, one - t}, ctx.support()),
        coords_of({one - t, t}, ctx.support()),
        coords_of({one / t, -(one - t) / t}, ctx.support()),
        coords_of({-(one - t) / t, one / t}, ctx.support()),
        coords_of({one / (one - t), -t / (one - t)}, ctx.support()),
        coords_of({-t / (one - t), one / (one - t)}, ctx.support()),
    };
    CHECK(points == base);
}

TEST_CASE("proposition step on t x + y = 1 reduces by a p-th root") {
    const std::uint32_t p = 3;
    const RatFunc t = tt(p), one = c(p, 1);
    const LinearVariety v = affine_variety(p, 2, {{t, one, one}});
    DescentContext ctx(v, t_and_one_minus_t(p));
    // Class of t^2 on x and the trivial class on y: t * t^2 is a cube.
    std::optional<std::size_t> t_squared;
    for (std::size_t k = 0; k < ctx.class_count(); ++k)
        if (ctx.rep(k) == t * t) t_squared = k;
    REQUIRE(t_squared.has_value());
    const auto pc = proposition_step(v, ctx, {*t_squared, 0});
    CHECK(pc.s == 1);
    REQUIRE(pc.reduced.has_value());
    CHECK(*pc.reduced == affine_variety(p, 2, {{t, one, one}}));
    REQUIRE(pc.psi.has_value());
    CHECK(pc.psi->scalars == std::vector<RatFunc>{one, t * t, one});

    // A free coordinate is rejected.
    const LinearVariety free_var = affine_variety(p, 2, {{one, c(p, 0), t}});
    CHECK_THROWS_AS(proposition_step(free_var, ctx, {0, 0}), MathError);
}

TEST_CASE("bound certificate values") {
    const std::uint32_t p = 3;
    const GroupPresentation g = t_and_one_minus_t(p);
    const auto cert = bound_certificate(x_plus_y(p), g, 3);
    const BigInt d4 = big_pow(BigInt(4), 12);
    CHECK(delta(4) == d4);
    CHECK(cert.delta == 32 * big_pow(80 * d4, 5));
    CHECK(cert.rho == 5);
    CHECK(cert.eta == 16);
    CHECK(cert.psi_const == big_pow(BigInt(2), 36));
    CHECK(cert.h_star == 1);
    CHECK(cert.index == radical(g).index);
    CHECK(cert.ceiling("theorem2") == 3 * cert.ceiling("theorem1"));
    CHECK_THROWS_AS(bound_certificate(x_plus_y(p), g, 4), MathError);
}

TEST_CASE("verify_point examples") {
    const std::uint32_t p = 5;
    const RatFunc t = tt(p), one = c(p, 1);
    const GroupPresentation g = t_and_one_minus_t(p);
    const LinearVariety v = x_plus_y(p);
    for (int e = 0; e < 4; ++e) {
        const std::int64_t q = static_cast<std::int64_t>(std::pow(5, e));
        CHECK(verify_point(v, g, Vec{t.pow(q), (one - t).pow(q)}).passed());
    }
    const auto bad = verify_point(v, g, Vec{t, t});
    CHECK_FALSE(bad.on_variety);
    CHECK_FALSE(bad.passed());
}

TEST_CASE("property: random two-term equations give sound families within the certificate") {
    std::mt19937_64 rng(5);
    int cases = 0;
    for (int it = 0; cases < 200 && it < 1000; ++it) {
        const std::uint32_t p = it % 2 ? 3 : 5;
        const RatFunc t = tt(p), one = c(p, 1);
        const GroupPresentation g = t_and_one_minus_t(p);
        std::uniform_int_distribution<int> ed(-2, 2), cd(1, static_cast<int>(p) - 1);
        auto elem = [&] { return c(p, cd(rng)) * t.pow(ed(rng)) * (one - t).pow(ed(rng)); };
        const LinearVariety v = affine_variety(p, 2, {{elem(), elem(), c(p, cd(rng))}});
        DescentContext ctx(v, g);
        const SolveMode mode = it % 3 ? SolveMode::Radical : SolveMode::Group;
        const auto sol = solve(ctx, mode);
        ++cases;
        for (const auto& f : sol.families) {
            CHECK(f.h() <= 1);
            check_family_bounds(ctx, sol.certificate, f);
            const BigInt cap = point_height(ctx.support(), f.tail) + 4;
            for (const auto& x : expand_family(ctx, f, cap)) {
                CHECK(verify_point(v, mode == SolveMode::Group ? g : ctx.radical_group(), x).passed());
                CHECK(point_height(ctx.support(), x) <= cap);
            }
        }
    }
    CHECK(cases == 200);
}
