#pragma once

// Heights of elements, vectors, projective points and linear varieties over F_p(t).

#include "sunit/ffield.hpp"
#include "sunit/linalg.hpp"

#include <cstdint>
#include <vector>

namespace sunit {

using Height = std::int64_t;

// max(deg num, deg den).
Height height(const RatFunc& x);
// Sum over places of deg(w) * max(0, -ord_w) on the coordinates; zero entries are ignored.
Height height_vec(const std::vector<RatFunc>& xs);
// Sum over places of deg(w) * max_i(-ord_w(x_i)); invariant under scaling.
Height proj_height(const std::vector<RatFunc>& point);
// Height of (1, x'/x, ..., x^(i)/x).
Height height_i(const RatFunc& x, int i);

// Canonical Grassmannian coordinates of the variety cut out by the given independent forms.
std::vector<Poly> grassmann_coordinates(const Matrix& forms);
// Height of the variety cut out by the given independent forms.
Height variety_height(const Matrix& forms);

}  // namespace sunit
