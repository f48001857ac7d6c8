#include "sunit/ffield.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace sunit;
using sunit::testing::random_poly;
using sunit::testing::random_ratfunc;
using sunit::testing::rf;

namespace {

// All monic polynomials of the given degree, in increasing order.
std::vector<Poly> monic_of_degree(std::uint32_t p, int d) {
    std::vector<Poly> out;
    std::vector<Residue> c(d + 1, 0);
    c[d] = 1;
    while (true) {
        out.emplace_back(p, c);
        int i = 0;
        while (i < d && ++c[i] == p) c[i++] = 0;
        if (i == d) break;
    }
    return out;
}

// Trial-division factorization, independent of the library's algorithm.
std::vector<std::pair<Poly, int>> brute_factor(Poly f) {
    const std::uint32_t p = f.p();
    f = f.monic();
    std::vector<std::pair<Poly, int>> out;
    for (int d = 1; 2 * d <= f.degree(); ++d) {
        for (const auto& q : monic_of_degree(p, d)) {
            int m = 0;
            while (f.degree() >= d && (f % q).is_zero()) {
                f = f / q;
                ++m;
            }
            if (m) out.emplace_back(q, m);
        }
    }
    if (f.degree() > 0) {
        bool merged = false;
        for (auto& [q, m] : out)
            if (q == f) ++m, merged = true;
        if (!merged) out.emplace_back(f, 1);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool brute_irreducible(const Poly& f) {
    auto fs = brute_factor(f);
    return fs.size() == 1 && fs[0].second == 1;
}

}  // namespace

TEST_CASE("field context rejects composite moduli") {
    CHECK(FieldContext(7).constant_field_order() == 6);
    CHECK_THROWS_AS(FieldContext(9), MathError);
    CHECK_THROWS_AS(FieldContext(1), MathError);
}

TEST_CASE("factor_poly examples") {
    SUBCASE("t^2+1 is irreducible over F_3") {
        Poly f(3, {1, 0, 1});
        CHECK(brute_irreducible(f));
        auto fac = factor_poly(f);
        REQUIRE(fac.factors.size() == 1);
        CHECK(fac.factors[0].first == f);
        CHECK(fac.factors[0].second == 1);
        CHECK(is_irreducible(f));
    }
    SUBCASE("t^2+1 splits over F_5") {
        Poly f(5, {1, 0, 1});
        auto fac = factor_poly(f);
        REQUIRE(fac.factors.size() == 2);
        CHECK(fac.factors[0].first == Poly(5, {2, 1}));
        CHECK(fac.factors[1].first == Poly(5, {3, 1}));
        CHECK(fac.factors == brute_factor(f));
    }
    SUBCASE("t is its own factorization") {
        auto fac = factor_poly(Poly::t(7));
        CHECK(fac.unit == 1);
        REQUIRE(fac.factors.size() == 1);
        CHECK(fac.factors[0].first == Poly::t(7));
    }
    SUBCASE("leading constant and p-th power parts") {
        // 2*(t+1)^3*(t^2+1) over F_3
        Poly f = Poly(3, {1, 1}).pow(3) * Poly(3, {1, 0, 1});
        f = f.scaled(2);
        auto fac = factor_poly(f);
        CHECK(fac.unit == 2);
        CHECK(fac.factors == brute_factor(f));
    }
    CHECK_THROWS_AS(factor_poly(Poly(5)), MathError);
}

TEST_CASE("ord_at examples") {
    const std::uint32_t p = 5;
    RatFunc x = rf(p, {0, 1}, {1, p - 1});  // t/(1-t)
    CHECK(ord_at(x, Place::finite(Poly::t(p))) == 1);
    CHECK(ord_at(x, Place::infinity(p)) == 0);
    RatFunc y = RatFunc(Poly(p, {1, p - 1})).pow(4);
    CHECK(ord_at(y, Place::finite(Poly(p, {p - 1, 1}))) == 4);
    CHECK_THROWS_AS(ord_at(RatFunc(p), Place::infinity(p)), MathError);
}

TEST_CASE("divisor examples") {
    const std::uint32_t p = 7;
    Divisor d = divisor(rf(p, {0, 1}, {1, p - 1}));
    Divisor expect{{Place::finite(Poly::t(p)), 1}, {Place::finite(Poly(p, {p - 1, 1})), -1}};
    CHECK(d == expect);
    CHECK(divisor(RatFunc::constant(p, 3)).empty());
    Divisor sq = divisor(rf(p, {0, 0, 1}));
    Divisor sq_expect{{Place::finite(Poly::t(p)), 2}, {Place::infinity(p), -2}};
    CHECK(sq == sq_expect);
    CHECK_THROWS_AS(divisor(RatFunc(p)), MathError);
}

TEST_CASE("derivative examples") {
    const std::uint32_t p = 5;
    CHECK(derivative(RatFunc(Poly::monomial(p, 1, p))).is_zero());
    CHECK(derivative(RatFunc::constant(p, 3)).is_zero());
    RatFunc x = rf(p, {0, 1}, {1, p - 1});
    RatFunc one_minus_t = rf(p, {1, p - 1});
    RatFunc expect = one_minus_t.pow(-2);
    CHECK(derivative(x) == expect);
    // Cleared denominators: x' * (1-t)^2 = 1.
    CHECK(derivative(x) * one_minus_t * one_minus_t == RatFunc::constant(p, 1));
}

TEST_CASE("pth_root examples") {
    const std::uint32_t p = 3;
    RatFunc one_minus_t = rf(p, {1, p - 1});
    CHECK(pth_root(one_minus_t.pow(p)) == one_minus_t);
    RatFunc y = rf(p, {0, 0, 1}, {1, 1});
    auto r = pth_root(rf(p, {0, 0, 0, 0, 0, 0, 1}, {1, 0, 0, 1}));
    REQUIRE(r.has_value());
    CHECK(*r == y);
    CHECK(r->pow(p) == y.pow(p));
    CHECK_FALSE(pth_root(RatFunc::t(p)).has_value());
    CHECK_THROWS_AS(pth_root(RatFunc(p)), MathError);
}

TEST_CASE("frobenius_power examples") {
    const std::uint32_t p = 3;
    RatFunc one_minus_t = rf(p, {1, p - 1});
    CHECK(frobenius_power(one_minus_t, p, 1) == rf(p, {1, 0, 0, p - 1}));
    CHECK(frobenius_power(RatFunc::t(p), p * p, 1) == RatFunc(Poly::monomial(p, 1, 9)));
    RatFunc x = rf(p, {0, 1}, {1, p - 1});
    RatFunc direct = x * x * x * x * x * x * x * x * x;
    CHECK(frobenius_power(x, 3, 2) == direct);
    CHECK(frobenius_power(x, 3, 2) == RatFunc(Poly::monomial(p, 1, 9), Poly(p, {1}) - Poly::monomial(p, 1, 9)));
    CHECK_THROWS_AS(frobenius_power(x, 3, 40), ResourceError);
    CHECK_THROWS_AS(frobenius_power(x, 2, 1), MathError);
}

TEST_CASE("frobenius_split reassembles") {
    std::mt19937_64 rng(11);
    for (std::uint32_t p : {2u, 3u, 5u}) {
        for (int iter = 0; iter < 70; ++iter) {
            RatFunc x = random_ratfunc(rng, p, 6);
            auto parts = frobenius_split(x);
            REQUIRE(parts.size() == p);
            RatFunc sum(p);
            for (std::uint32_t i = 0; i < p; ++i)
                sum += RatFunc(Poly::monomial(p, 1, i)) * parts[i].pow(std::int64_t(p));
            CHECK(sum == x);
        }
    }
}

TEST_CASE("monic factors reassemble") {
    std::mt19937_64 rng(12);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint32_t p = iter % 2 ? 3 : 7;
        RatFunc x = random_ratfunc(rng, p, 5);
        auto mf = monic_factors(x);
        RatFunc prod = RatFunc::constant(p, mf.constant);
        for (auto& [w, k] : mf.orders) prod *= RatFunc(w.poly()).pow(k);
        CHECK(prod == x);
    }
}

TEST_CASE("property: canonical form is unique") {
    std::mt19937_64 rng(1);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint32_t p = 5;
        Poly a = random_poly(rng, p, 4), b = random_poly(rng, p, 4), c = random_poly(rng, p, 3);
        RatFunc x(a, b);
        RatFunc y(a * c, b * c);  // same element, different raw representative
        CHECK(x == y);
        CHECK(x.den().is_monic());
        CHECK(poly_gcd(x.num(), x.den()).degree() <= 0);
    }
}

TEST_CASE("property: product formula") {
    std::mt19937_64 rng(2);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint32_t p = iter % 3 == 0 ? 2 : (iter % 3 == 1 ? 3 : 11);
        RatFunc x = random_ratfunc(rng, p, 7);
        CHECK(divisor_degree(divisor(x)) == 0);
    }
}

TEST_CASE("property: derivative is linear over p-th powers") {
    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint32_t p = iter % 2 ? 3 : 5;
        RatFunc x = random_ratfunc(rng, p, 5);
        RatFunc c = random_ratfunc(rng, p, 2).pow(std::int64_t(p));
        CHECK(derivative(c * x) == c * derivative(x));
        RatFunc y = random_ratfunc(rng, p, 4);
        CHECK(derivative(x * y) == derivative(x) * y + x * derivative(y));
    }
}

TEST_CASE("property: pth_root inverts p-th powers") {
    std::mt19937_64 rng(4);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint32_t p = iter % 2 ? 2 : 3;
        RatFunc x = random_ratfunc(rng, p, 5);
        auto r = pth_root(x.pow(std::int64_t(p)));
        REQUIRE(r.has_value());
        CHECK(*r == x);
        CHECK(pth_root(x).has_value() == derivative(x).is_zero());
    }
}

TEST_CASE("property: factorization multiplies back and matches trial division") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint32_t p = iter % 4 == 0 ? 2 : (iter % 4 == 1 ? 3 : (iter % 4 == 2 ? 5 : 7));
        Poly f = random_poly(rng, p, 8);
        if (f.degree() <= 0) continue;
        auto fac = factor_poly(f);
        Poly prod = Poly::constant(p, fac.unit);
        for (auto& [q, m] : fac.factors) {
            CHECK(q.is_monic());
            CHECK(brute_irreducible(q));
            prod = prod * q.pow(m);
        }
        CHECK(prod == f);
        CHECK(fac.factors == brute_factor(f));
        CHECK(is_irreducible(f) == brute_irreducible(f));
    }
}
