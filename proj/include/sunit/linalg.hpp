#pragma once

// Dense linear algebra over F_p(t).

#include "sunit/ffield.hpp"

#include <optional>
#include <vector>

namespace sunit {

using Vec = std::vector<RatFunc>;
using Matrix = std::vector<Vec>;

Matrix zero_matrix(std::uint32_t p, std::size_t rows, std::size_t cols);

struct Echelon {
    Matrix rows;                    // reduced, pivots normalized to 1, zero rows dropped
    std::vector<std::size_t> pivots;  // pivot column of each row
};

// Reduced row echelon form; columns are scanned in the given order (default natural).
Echelon rref(const Matrix& m, const std::vector<std::size_t>& column_order = {});
std::size_t rank(const Matrix& m);
RatFunc determinant(Matrix m);
// Basis of {x : m x = 0}.
Matrix kernel(const Matrix& m, std::size_t cols);
// Some solution of m x = b, or nothing.
std::optional<Vec> solve(const Matrix& m, const Vec& b);
// Maximal minors of a full-row-rank k x n matrix, columns in lexicographic order.
std::vector<RatFunc> maximal_minors(const Matrix& m);

Vec mat_vec(const Matrix& m, const Vec& v);
RatFunc dot(const Vec& a, const Vec& b);

// Scales a nonzero vector to coprime polynomial entries whose first nonzero entry is monic.
std::vector<Poly> primitive_polys(const Vec& v);

}  // namespace sunit
