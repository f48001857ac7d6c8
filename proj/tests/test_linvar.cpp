#include "sunit/linvar.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <map>

using namespace sunit;
using sunit::testing::random_ratfunc;
using sunit::testing::rf;

namespace {

RatFunc c(std::uint32_t p, std::int64_t v) { return RatFunc::constant(p, v); }

// Line t x + y = 1, z = (1 - t) x.
LinearVariety sample_line(std::uint32_t p) {
    RatFunc t = RatFunc::t(p);
    return affine_variety(p, 3, {{t, c(p, 1), c(p, 0), c(p, 1)}, {c(p, 1) - t, c(p, 0), c(p, -1), c(p, 0)}});
}

LinearVariety sample_plane(std::uint32_t p) {
    return affine_variety(p, 3, {{c(p, 1), c(p, 1), c(p, -1), c(p, 1)}});
}

GroupPresentation t_and_one_minus_t(std::uint32_t p) {
    return build_group({RatFunc::t(p), rf(p, {1, p - 1})}, FieldContext(p));
}

bool in_group_times_constants(const RatFunc& a, const GroupPresentation& g) {
    auto mc = support_coords(a, g.finite_support);
    return mc && g.lattice.contains(mc->exponents);
}

// Equation-wise test: every coefficient of the normalized equations lies in G F_p* and
// every alternating cycle quotient of coefficients is a constant.
bool equationwise_isotrivial(const LinearVariety& v, const GroupPresentation& g) {
    const std::size_t size = v.n() + 1;
    const std::uint32_t p = v.p();
    // Potentials on variables: g_j / g_i must match a(i, j) up to a constant.
    std::vector<std::optional<RatFunc>> pot(size);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::map<std::pair<std::size_t, std::size_t>, RatFunc> weight;
    for (std::size_t row = 0; row < v.pivots().size(); ++row)
        for (auto j : v.free_variables()) {
            RatFunc a = v.coefficient(row, j);
            if (a.is_zero()) continue;
            if (!in_group_times_constants(a, g)) return false;
            edges.emplace_back(v.pivots()[row], j);
            weight[{v.pivots()[row], j}] = a;
        }
    bool changed = true;
    while (true) {
        changed = false;
        for (auto [i, j] : edges) {
            const RatFunc& a = weight[{i, j}];
            if (pot[i] && !pot[j]) pot[j] = a * *pot[i], changed = true;
            else if (pot[j] && !pot[i]) pot[i] = *pot[j] / a, changed = true;
            else if (pot[i] && pot[j] && !(a * *pot[i] / *pot[j]).is_constant()) return false;
        }
        if (changed) continue;
        auto root = std::find_if(edges.begin(), edges.end(), [&](auto e) { return !pot[e.first]; });
        if (root == edges.end()) break;
        pot[root->first] = c(p, 1);
    }
    return true;
}

bool defined_over_constants(const LinearVariety& v) {
    for (const auto& row : v.forms())
        for (const auto& x : row)
            if (!x.is_constant()) return false;
    return true;
}

// Any psi with exponents of both generators in [-1, 1] trivializing V.
bool brute_witness(const LinearVariety& v, const GroupPresentation& g) {
    const std::size_t n = v.n();
    const std::uint32_t p = v.p();
    std::vector<int> e(2 * n, -1);
    while (true) {
        DiagonalAutomorphism psi{{c(p, 1)}, {}};
        for (std::size_t i = 0; i < n; ++i)
            psi.scalars.push_back(g.free_generators[0].pow(std::int64_t(e[2 * i])) *
                                  g.free_generators[1].pow(std::int64_t(e[2 * i + 1])));
        Matrix forms = v.forms();
        for (auto& row : forms)
            for (std::size_t j = 0; j <= n; ++j) row[j] /= psi.scalars[j];
        if (defined_over_constants(LinearVariety(p, n, forms))) return true;
        std::size_t i = 0;
        while (i < e.size() && ++e[i] > 1) e[i++] = -1;
        if (i == e.size()) return false;
    }
}

BigInt factorial(std::size_t n) { return n <= 1 ? BigInt(1) : BigInt(n) * factorial(n - 1); }

}  // namespace

TEST_CASE("triangularize examples") {
    const std::uint32_t p = 5;
    LinearVariety plane = sample_plane(p);
    CHECK(plane.dim() == 2);
    CHECK(plane.forms().size() == 1);
    CHECK(plane.pivots() == std::vector<std::size_t>{3});

    LinearVariety line = sample_line(p);
    CHECK(line.dim() == 1);
    CHECK(line.pivots() == std::vector<std::size_t>{3, 2});
    CHECK(line.free_variables() == std::vector<std::size_t>{0, 1});
    RatFunc t = RatFunc::t(p);
    // z = (1 - t) x and y = 1 - t x.
    CHECK(line.coefficient(0, 1) == c(p, 1) - t);
    CHECK(line.coefficient(0, 0).is_zero());
    CHECK(line.coefficient(1, 0) == c(p, 1));
    CHECK(line.coefficient(1, 1) == -t);
    CHECK(line.height() == 1);
    CHECK(triangularize(p, 3, line.forms()) == line);

    CHECK_THROWS_AS(affine_variety(p, 1, {{c(p, 1), c(p, 1)}, {c(p, 1), c(p, 2)}}), MathError);
    CHECK_THROWS_AS(affine_variety(p, 2, {{c(p, 1), c(p, 1), c(p, 1)}, {c(p, 2), c(p, 2), c(p, 2)}}), MathError);
}

TEST_CASE("is_transversal examples") {
    const std::uint32_t p = 5;
    CHECK(is_transversal(affine_variety(p, 2, {{c(p, 1), c(p, 1), c(p, 1)}})));
    CHECK_FALSE(is_transversal(LinearVariety(p, 2, {{c(p, 1), c(p, 1), c(p, 0)}})));
    CHECK(is_transversal(sample_line(p)));
}

TEST_CASE("coset_form examples") {
    const std::uint32_t p = 5;
    RatFunc t = RatFunc::t(p);
    LinearVariety v(p, 2, {{-t, c(p, 1), c(p, 0)}});
    auto cf = coset_form(v);
    REQUIRE(cf.has_value());
    CHECK(cf->block == std::vector<std::size_t>{0, 0, 1});
    CHECK(cf->ratio[1] == t);
    CHECK(cf->free_blocks == std::vector<std::size_t>{1});
    CHECK_FALSE(cf->is_subgroup());
    CHECK(cf->variety(p) == v);

    CHECK_FALSE(coset_form(affine_variety(p, 2, {{c(p, 1), c(p, 1), c(p, 1)}})).has_value());

    // x = z, y = 1.
    LinearVariety line = affine_variety(p, 3, {{c(p, 1), c(p, 0), c(p, -1), c(p, 0)}, {c(p, 0), c(p, 1), c(p, 0), c(p, 1)}});
    auto cl = coset_form(line);
    REQUIRE(cl.has_value());
    CHECK(cl->block == std::vector<std::size_t>{0, 1, 0, 1});
    CHECK(cl->is_subgroup());
    CHECK(cl->variety(p) == line);
    CHECK_FALSE(coset_form(sample_line(p)).has_value());
}

TEST_CASE("isotrivial_witness examples") {
    const std::uint32_t p = 5;
    RatFunc t = RatFunc::t(p);
    GroupPresentation g = t_and_one_minus_t(p);

    LinearVariety v = affine_variety(p, 2, {{t, c(p, 1), c(p, 1)}});
    auto w = isotrivial_witness(v, g);
    REQUIRE(w.has_value());
    CHECK(w->scalars[1] / w->scalars[0] == t);
    CHECK((w->scalars[2] / w->scalars[0]).is_constant());
    CHECK(defined_over_constants(apply_automorphism(*w, v)));

    LinearVariety line = sample_line(p);
    auto wl = isotrivial_witness(line, g);
    REQUIRE(wl.has_value());
    const auto& s = wl->scalars;
    CHECK((s[1] / s[0] / t).is_constant());
    CHECK((s[2] / s[0]).is_constant());
    CHECK((s[3] / s[0] * (c(p, 1) - t) / t).is_constant());
    CHECK(wl->height() <= 3 * 2 * line.height());
    CHECK(wl->elements.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) CHECK(reconstruct(wl->elements[i], g) == s[i]);

    CHECK_FALSE(isotrivial_witness(affine_variety(p, 2, {{t + c(p, 1), c(p, 1), c(p, 1)}}), g).has_value());
    CHECK_FALSE(isotrivial_witness(sample_line(p), build_group({t}, FieldContext(p))).has_value());
    CHECK(isotrivial_witness(sample_plane(p), g).has_value());
}

TEST_CASE("apply_automorphism examples") {
    const std::uint32_t p = 7;
    RatFunc t = RatFunc::t(p);
    LinearVariety line = sample_line(p);
    CHECK(apply_automorphism(identity_automorphism(p, 3), line) == line);
    DiagonalAutomorphism psi{{c(p, 1), t, rf(p, {1, 6}), t * t}, {}};
    CHECK(apply_automorphism(psi.inverse(), apply_automorphism(psi, line)) == line);
    DiagonalAutomorphism trivializer{{c(p, 1), t, c(p, 1), t / (c(p, 1) - t)}, {}};
    LinearVariety image = apply_automorphism(trivializer, line);
    CHECK(defined_over_constants(image));
    // x~ + y~ = 1 and z~ = x~.
    CHECK(image == affine_variety(p, 3, {{c(p, 1), c(p, 1), c(p, 0), c(p, 1)}, {c(p, 1), c(p, 0), c(p, -1), c(p, 0)}}));
    CHECK_THROWS_AS(apply_automorphism(identity_automorphism(p, 2), line), MathError);
}

TEST_CASE("intersect examples") {
    const std::uint32_t p = 5;
    LinearVariety line = sample_line(p), plane = sample_plane(p);
    CHECK(intersect(line, line) == line);
    CHECK(plane.contains(line));
    CHECK_FALSE(line.contains(plane));
    CHECK(intersect(plane, line) == line);
    auto h1 = affine_variety(p, 2, {{c(p, 1), c(p, 1), c(p, 1)}});
    auto h2 = affine_variety(p, 2, {{c(p, 1), c(p, 1), c(p, 2)}});
    CHECK_FALSE(intersect(h1, h2).has_value());
}

TEST_CASE("vanishing_subsums examples") {
    const std::uint32_t p = 5;
    RatFunc t = RatFunc::t(p), u = rf(p, {1, 4});
    Vec coeffs{c(p, -1), c(p, 1), c(p, 1), c(p, -1)};
    // x = t^(s-r), y = (1-t)^s, z = t^(s-r) (1-t)^r with r = 5, s = 25.
    Vec point{c(p, 1), t.pow(20), u.pow(25), t.pow(20) * u.pow(5)};
    CHECK(vanishing_subsums(point, coeffs).empty());
    Vec equal{c(p, 1), c(p, 1), u.pow(5), u.pow(5)};
    auto subs = vanishing_subsums(equal, coeffs);
    CHECK(subs == std::vector<std::vector<std::size_t>>{{0, 1}, {2, 3}});
    Vec degenerate{c(p, 1), c(p, 1), c(p, 0), c(p, 0)};
    CHECK(vanishing_subsums(degenerate, coeffs).size() == 6);
    CHECK_THROWS_AS(vanishing_subsums({c(p, 1), t, t, t}, coeffs), MathError);
}

TEST_CASE("property: triangular form is canonical") {
    std::mt19937_64 rng(81);
    int cases = 0;
    while (cases < 200) {
        const std::uint32_t p = cases % 2 ? 5 : 7;
        const std::size_t n = 2 + cases % 3;
        const std::size_t k = 1 + cases % n;
        Matrix forms(k, Vec());
        for (auto& row : forms)
            for (std::size_t j = 0; j <= n; ++j) row.push_back(random_ratfunc(rng, p, 1));
        LinearVariety v(p, 1, {});
        try {
            v = LinearVariety(p, n, forms);
        } catch (const MathError&) {
            continue;
        }
        ++cases;
        // Random invertible recombination of the forms gives the same variety.
        Matrix mixed = forms;
        for (std::size_t i = 1; i < k; ++i) {
            RatFunc r = random_ratfunc(rng, p, 1);
            for (std::size_t j = 0; j <= n; ++j) mixed[i][j] += r * forms[0][j];
        }
        for (std::size_t j = 0; j <= n; ++j) mixed[0][j] *= c(p, 3);
        LinearVariety w(p, n, mixed);
        CHECK(w == v);
        CHECK(w.grassmannians() == v.grassmannians());
        CHECK(triangularize(p, n, v.forms()) == v);
        CHECK(v.dim() == n - k);
        // The point with every free variable equal to 1 lies on all input forms.
        Vec point(n + 1, RatFunc(p));
        for (auto j : v.free_variables()) point[j] = c(p, 1);
        for (std::size_t row = 0; row < v.pivots().size(); ++row) {
            RatFunc s(p);
            for (auto j : v.free_variables()) s += v.coefficient(row, j) * point[j];
            point[v.pivots()[row]] = s;
        }
        for (const auto& f : forms) CHECK(dot(f, point).is_zero());
    }
}

TEST_CASE("property: intersection heights") {
    std::mt19937_64 rng(82);
    int upper = 0, lower = 0;
    while (upper < 200 || lower < 200) {
        const std::uint32_t p = 5;
        const std::size_t n = 3;
        auto random_variety = [&](std::size_t k, bool avoid_last) -> std::optional<LinearVariety> {
            Matrix forms(k, Vec());
            for (auto& row : forms)
                for (std::size_t j = 0; j <= n; ++j)
                    row.push_back(avoid_last && j == n ? RatFunc(p) : random_ratfunc(rng, p, 1));
            try {
                return LinearVariety(p, n, forms);
            } catch (const MathError&) {
                return std::nullopt;
            }
        };
        auto v = random_variety(1, false), w = random_variety(1, false);
        if (v && w) {
            if (auto x = intersect(*v, *w)) {
                ++upper;
                CHECK(x->height() <= v->height() + w->height());
                CHECK(v->contains(*x));
                CHECK(w->contains(*x));
            }
        }
        auto base = random_variety(1, true);
        if (!base) continue;
        Vec e(n + 1, RatFunc(p));
        e[n - 1] = c(p, 1);
        if (base->contains(e)) continue;  // X_{n-1} vanishes on V
        RatFunc a = random_ratfunc(rng, p, 2);
        Vec form(n + 1, RatFunc(p));
        form[n] = c(p, 1);
        form[n - 1] = -a;
        LinearVariety wl(p, n, {form});
        auto x = intersect(*base, wl);
        REQUIRE(x.has_value());
        ++lower;
        CHECK(x->height() >= std::max(base->height(), wl.height()));
        CHECK(wl.height() == height(a));
    }
}

TEST_CASE("property: isotriviality agrees with the equation-wise test and brute force") {
    std::mt19937_64 rng(83);
    std::uniform_int_distribution<int> ex(-1, 1), pick(0, 3);
    const std::uint32_t p = 5;
    RatFunc t = RatFunc::t(p);
    GroupPresentation g1 = t_and_one_minus_t(p);
    GroupPresentation g2 = build_group({t.pow(2), rf(p, {1, 1})}, FieldContext(p));
    int cases = 0, positive = 0, negative = 0;
    while (cases < 200) {
        const GroupPresentation& g = cases % 2 ? g1 : g2;
        const std::size_t n = 2 + cases % 2;
        const std::size_t k = 1 + (cases / 2) % (n - 1);
        std::uniform_int_distribution<Residue> cd(0, p - 1);
        Matrix forms(k, Vec());
        for (auto& row : forms)
            for (std::size_t j = 0; j <= n; ++j) row.push_back(c(p, cd(rng)));
        DiagonalAutomorphism psi{{c(p, 1)}, {}};
        for (std::size_t i = 0; i < n; ++i)
            psi.scalars.push_back(g.free_generators[0].pow(std::int64_t(ex(rng))) *
                                  g.free_generators[1].pow(std::int64_t(ex(rng))));
        for (auto& row : forms)
            for (std::size_t j = 0; j <= n; ++j) row[j] *= psi.scalars[j];
        int twist = pick(rng);
        if (twist == 0) forms[0][0] *= t + c(p, 2);
        if (twist == 1) forms[0][n] *= t;
        LinearVariety v(p, 1, {});
        try {
            v = LinearVariety(p, n, forms);
        } catch (const MathError&) {
            continue;
        }
        ++cases;
        auto w = isotrivial_witness(v, g);
        CHECK(w.has_value() == equationwise_isotrivial(v, g));
        if (w) {
            ++positive;
            CHECK(defined_over_constants(apply_automorphism(*w, v)));
            CHECK(BigInt(w->height()) <= factorial(n) * v.height());
            for (std::size_t i = 0; i <= n; ++i) CHECK(reconstruct(w->elements[i], g) == w->scalars[i]);
        } else {
            ++negative;
            CHECK_FALSE(brute_witness(v, g));
        }
    }
    CHECK(positive >= 50);
    CHECK(negative >= 20);
}

TEST_CASE("property: coset descriptions reproduce the variety") {
    std::mt19937_64 rng(84);
    std::uniform_int_distribution<int> coin(0, 2);
    int found = 0;
    for (int iter = 0; iter < 240; ++iter) {
        const std::uint32_t p = 7;
        const std::size_t n = 3;
        // Random partition into blocks with random ratios, sometimes plus a non-binary form.
        std::vector<std::size_t> rep(n + 1);
        Matrix forms;
        for (std::size_t i = 0; i <= n; ++i) {
            std::uniform_int_distribution<std::size_t> r(0, i);
            rep[i] = coin(rng) ? i : rep[r(rng)];
            if (rep[i] == i) continue;
            Vec f(n + 1, RatFunc(p));
            f[i] = c(p, 1);
            f[rep[i]] = -random_ratfunc(rng, p, 1);
            forms.push_back(std::move(f));
        }
        bool extra = iter % 4 == 0 && forms.size() + 1 < n;
        if (extra) {
            Vec f;
            for (std::size_t j = 0; j <= n; ++j) f.push_back(random_ratfunc(rng, p, 1));
            forms.push_back(f);
        }
        LinearVariety v(p, 1, {});
        try {
            v = LinearVariety(p, n, forms);
        } catch (const MathError&) {
            continue;
        }
        auto cf = coset_form(v);
        if (!extra) CHECK(cf.has_value());
        if (cf) {
            ++found;
            CHECK(cf->variety(p) == v);
        }
    }
    CHECK(found >= 150);
}

TEST_CASE("property: automorphism round trips and bounds") {
    std::mt19937_64 rng(85);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint32_t p = 5;
        const std::size_t n = 3;
        Matrix forms(1 + iter % 2, Vec());
        for (auto& row : forms)
            for (std::size_t j = 0; j <= n; ++j) row.push_back(random_ratfunc(rng, p, 1));
        std::optional<LinearVariety> v;
        try {
            v = LinearVariety(p, n, forms);
        } catch (const MathError&) {
            continue;
        }
        DiagonalAutomorphism psi;
        for (std::size_t j = 0; j <= n; ++j) psi.scalars.push_back(random_ratfunc(rng, p, 2));
        LinearVariety image(p, 1, {});
        try {
            image = apply_automorphism(psi, *v);
        } catch (const MathError&) {
            continue;  // the image can lose its affine points
        }
        CHECK(image.height() <= v->height() + static_cast<Height>(n) * psi.height());
        CHECK(apply_automorphism(psi.inverse(), image) == *v);
    }
}
