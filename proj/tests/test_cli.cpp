#include "problem.hpp"

#include <doctest.h>

using namespace sunit;
using namespace sunit::cli;

namespace {

RatFunc expr(std::uint32_t p, const std::string& s) { return parse_ratfunc(p, {s, 1, 1}); }
RatFunc c(std::uint32_t p, std::int64_t v) { return RatFunc::constant(p, v); }

}  // namespace

TEST_CASE("expression precedence") {
    const std::uint32_t p = 7;
    const RatFunc t = RatFunc::t(p);
    CHECK(expr(p, "-t^2") == -(t * t));
    CHECK(expr(p, "2*t+3") == c(p, 2) * t + c(p, 3));
    CHECK(expr(p, "1 - t - t") == c(p, 1) - c(p, 2) * t);
    CHECK(expr(p, "t/t^2*t") == c(p, 1));
    CHECK(expr(p, "(1+t)^(2)") == (c(p, 1) + t) * (c(p, 1) + t));
    CHECK(expr(p, "2*-t") == -(c(p, 2) * t));
    CHECK(expr(p, "10") == c(p, 3));
    CHECK(expr(p, "123456789012345678901234567890") == c(p, static_cast<std::int64_t>(mod_floor(BigInt("123456789012345678901234567890"), BigInt(7)))));
}

TEST_CASE("expression errors carry positions") {
    const std::uint32_t p = 3;
    try {
        expr(p, "t^(1/2)");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 5);
    }
    CHECK_THROWS_AS(expr(p, "t^-1"), ParseError);
    CHECK_THROWS_AS(expr(p, "t +"), ParseError);
    CHECK_THROWS_AS(expr(p, "(t"), ParseError);
    CHECK_THROWS_AS(expr(p, "s"), ParseError);
    CHECK_THROWS_AS(expr(p, "2t"), ParseError);
    CHECK_THROWS_AS(expr(p, "1/(t-t)"), SemanticError);
    CHECK_THROWS_AS(expr(p, "x1"), SemanticError);
    CHECK_THROWS_AS(expr(p, "t^10000001"), SemanticError);
}

TEST_CASE("equations") {
    const std::uint32_t p = 5;
    const RatFunc t = RatFunc::t(p);
    const Matrix forms = parse_equations(p, {{"x1 + x2 - x3 = 1", 1, 1}}, std::nullopt);
    CHECK(forms == Matrix{{c(p, -1), c(p, 1), c(p, 1), c(p, -1)}});
    CHECK(parse_equations(p, {{"t*x = (1-t)*y + 2", 1, 1}}, 3) == Matrix{{c(p, -2), t, t - c(p, 1), c(p, 0)}});
    CHECK(parse_equations(p, {{"X1 + X2 = X0", 1, 1}}, std::nullopt) == Matrix{{c(p, -1), c(p, 1), c(p, 1)}});
    CHECK(parse_equations(p, {{"x1 - x2", 1, 1}}, std::nullopt) == Matrix{{c(p, 0), c(p, 1), c(p, -1)}});
    CHECK_THROWS_AS(parse_equations(p, {{"x1*x2 = 1", 1, 1}}, std::nullopt), SemanticError);
    CHECK_THROWS_AS(parse_equations(p, {{"x1 + X2 = 0", 1, 1}}, std::nullopt), SemanticError);
    CHECK_THROWS_AS(parse_equations(p, {{"X1 + X2 = 1", 1, 1}}, std::nullopt), SemanticError);
    CHECK_THROWS_AS(parse_equations(p, {{"x1 - x1 = 0", 1, 1}}, std::nullopt), SemanticError);
    CHECK_THROWS_AS(parse_equations(p, {{"x3 = 1", 1, 1}}, 2), SemanticError);
}

TEST_CASE("problem files") {
    SUBCASE("one-line form of the big-exponent instance") {
        const auto spec = parse_problem("p=2; gens=[\"t^83\",\"1-t\"]; eq=\"t^42*x1 + x2 = 1\"");
        REQUIRE(spec.p == 2u);
        REQUIRE(spec.generators.size() == 2);
        const Problem pr = build_problem(spec);
        const RatFunc t = RatFunc::t(2);
        REQUIRE(pr.variety.has_value());
        CHECK(*pr.variety == affine_variety(2, 2, {{t.pow(42), c(2, 1), c(2, 1)}}));
        CHECK(regulator_sq(pr.group) == 20667);
    }
    SUBCASE("sectioned form of the plane") {
        const std::string text = "# plane\n[field]\np = 5\n[group]\nt   # first\n1 - t\n[variety]\nx1+x2-x3 = 1\n"
                                 "[options]\nmode = group\nheight_cap = 30\nthreads = 2\nisotrivial_refine = on\n";
        const auto spec = parse_problem(text);
        CHECK(spec.p == 5u);
        REQUIRE(spec.generators.size() == 2);
        CHECK(spec.generators[1].line == 6);
        CHECK(spec.equations.size() == 1);
        CHECK(spec.mode == SolveMode::Group);
        CHECK(spec.height_cap == BigInt(30));
        CHECK(spec.threads == 2u);
        CHECK(spec.isotrivial_refine == true);
        const Problem pr = build_problem(spec);
        CHECK(pr.variety->n() == 3);
    }
    SUBCASE("positions point into the file") {
        try {
            build_problem(parse_problem("[field]\np = 3\n[group]\nt^(1/2)\n"));
            FAIL("no error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
            CHECK(e.column() == 5);
        }
    }
    CHECK_THROWS_AS(parse_problem("[fields]\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("p = 3\np = 5\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("gens = [\"t\" \"1-t\"]\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("eq = \"x1 = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("[field]\nt + 1\n"), ParseError);
    CHECK_THROWS_AS(parse_problem("mode = both\n"), ParseError);
    CHECK_THROWS_AS(build_problem(parse_problem("p = 9; gens = [\"t\"]")), SemanticError);
    CHECK_THROWS_AS(build_problem(parse_problem("p = 3; gens = [\"t - t\"]")), SemanticError);
    CHECK_THROWS_AS(build_problem(parse_problem("gens = [\"t\"]")), SemanticError);
    CHECK_THROWS_AS(build_problem(parse_problem("p = 3; gens = [\"t\"]; eq = [\"x1 = 1\", \"x1 = 2\"]")), SemanticError);
}
