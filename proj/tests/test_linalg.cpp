#include "sunit/linalg.hpp"
#include "test_support.hpp"

#include <doctest.h>

using namespace sunit;
using sunit::testing::random_ratfunc;

namespace {

// Cofactor expansion along the first row.
RatFunc cofactor_det(const Matrix& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    RatFunc s(m[0][0].p());
    for (std::size_t j = 0; j < n; ++j) {
        Matrix sub;
        for (std::size_t i = 1; i < n; ++i) {
            Vec row;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            sub.push_back(row);
        }
        RatFunc term = m[0][j] * cofactor_det(sub);
        s += (j % 2 ? -term : term);
    }
    return s;
}

}  // namespace

TEST_CASE("property: determinant matches cofactor expansion") {
    std::mt19937_64 rng(21);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint32_t p = 5;
        const std::size_t n = 1 + iter % 4;
        Matrix m(n, Vec());
        for (auto& row : m)
            for (std::size_t j = 0; j < n; ++j) row.push_back(iter % 7 == 0 && j == 0 ? RatFunc(p) : random_ratfunc(rng, p, 2));
        CHECK(determinant(m) == cofactor_det(m));
    }
}

TEST_CASE("property: kernel vectors are annihilated and solve is consistent") {
    std::mt19937_64 rng(22);
    for (int iter = 0; iter < 200; ++iter) {
        const std::uint32_t p = 3;
        const std::size_t rows = 1 + iter % 3, cols = rows + 1 + iter % 2;
        Matrix m(rows, Vec());
        for (auto& row : m)
            for (std::size_t j = 0; j < cols; ++j) row.push_back(random_ratfunc(rng, p, 2));
        Matrix ker = kernel(m, cols);
        CHECK(ker.size() == cols - rank(m));
        for (auto& v : ker)
            for (auto& x : mat_vec(m, v)) CHECK(x.is_zero());
        Vec x0;
        for (std::size_t j = 0; j < cols; ++j) x0.push_back(random_ratfunc(rng, p, 2));
        Vec b = mat_vec(m, x0);
        auto x = solve(m, b);
        REQUIRE(x.has_value());
        CHECK(mat_vec(m, *x) == b);
    }
}
