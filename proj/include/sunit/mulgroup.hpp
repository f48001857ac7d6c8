#pragma once

// Finitely generated subgroups of F_p(t)*.
//
// Elements are handled in monic coordinates: x = c * prod_w P_w^{v_w} over the finite
// places of the support, with c in F_p*. The order at infinity is then -sum deg(w) v_w.
// A group is its exponent lattice in these coordinates together with the constants
// it contains. Since F_p(t) has genus 0 and trivial class group, every vector on the
// support is the divisor of such a product, so radicals come from saturation.

#include "sunit/ffield.hpp"
#include "sunit/heights.hpp"
#include "sunit/intmat.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace sunit {

// c * prod f_i^{e_i} over the free generators of a presentation.
struct GroupElement {
    IntVec exponents;
    Residue constant = 1;
    friend bool operator==(const GroupElement&, const GroupElement&) = default;
    friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

// Element in monic coordinates relative to a fixed list of finite places.
struct MonicCoords {
    Residue constant = 1;
    IntVec exponents;
    friend bool operator==(const MonicCoords&, const MonicCoords&) = default;
    friend auto operator<=>(const MonicCoords&, const MonicCoords&) = default;
};

struct GroupPresentation {
    FieldContext ctx{2};
    std::vector<Place> support;         // infinity first when it occurs
    std::vector<Place> finite_support;  // coordinates of exponent vectors
    IntMatrix lattice_basis;            // r x |support|, entry -ord_w(g) * deg(w)
    std::vector<RatFunc> free_generators;
    IntMatrix generator_exponents;          // monic exponents of the free generators
    std::vector<Residue> generator_constants;
    std::uint64_t constant_order = 1;   // |G cap F_p*|
    Residue constant_generator = 1;     // generates G cap F_p*
    Lattice lattice;

    std::size_t rank() const { return generator_exponents.size(); }
    std::uint32_t p() const { return ctx.p(); }
};

struct RadicalData {
    GroupPresentation radical;
    IntVec elementary_divisors;        // d_1 | d_2 | ... relative to aligned_basis
    BigInt constant_divisor;           // d_0 = [F_p* : G cap F_p*]
    BigInt index;                      // d_0 * d_1 * ... * d_r
    IntMatrix aligned_basis;           // basis u_i of the radical lattice with d_i u_i spanning G's
};

// Primitive root of F_p and brute-force discrete logarithm.
Residue primitive_root(std::uint32_t p);
std::uint64_t discrete_log(Residue a, std::uint32_t p);
std::uint64_t multiplicative_order(Residue a, std::uint32_t p);
bool in_constant_subgroup(Residue c, const GroupPresentation& g);

GroupPresentation build_group(const std::vector<RatFunc>& gens, const FieldContext& ctx);
// Presentation from a lattice basis in monic coordinates over the given places.
GroupPresentation group_from_lattice(const FieldContext& ctx, const std::vector<Place>& finite_support,
                                     const IntMatrix& basis, const std::vector<Residue>& constants,
                                     std::uint64_t constant_order);

// Monic coordinates of x over the support, or nothing when x has another finite place.
std::optional<MonicCoords> support_coords(const RatFunc& x, const std::vector<Place>& finite_support);
// c * prod P_w^{v_w}; throws ResourceError when the degree exceeds the cap.
RatFunc realize(const std::vector<Place>& finite_support, const MonicCoords& m,
                std::uint64_t degree_cap = kDefaultFrobeniusDegreeCap);
// Height from monic exponents alone.
BigInt monic_height(const std::vector<Place>& finite_support, const IntVec& v);
// Row entry -ord_w * deg(w) for each place of the support (infinity first when present).
IntVec lattice_row(const GroupPresentation& g, const IntVec& v);

std::optional<GroupElement> member(const RatFunc& x, const GroupPresentation& g);
std::optional<GroupElement> member_coords(const MonicCoords& m, const GroupPresentation& g);
MonicCoords element_coords(const GroupElement& e, const GroupPresentation& g);
RatFunc reconstruct(const GroupElement& e, const GroupPresentation& g);

BigInt regulator_sq(const GroupPresentation& g);
// delta(r) = r^(3r)
BigInt delta(std::uint64_t r);

// Basis found by search in order of height; satisfies r * prod h(g_i) <= delta(r) R^2.
std::vector<GroupElement> reduced_basis(const GroupPresentation& g);
// Monic exponent rows of the reduced basis.
IntMatrix reduced_exponents(const GroupPresentation& g);

struct ModDecomposition {
    RatFunc g0;
    GroupElement g0_element;
    GroupElement gp;
};
ModDecomposition decompose_mod_l(const GroupElement& e, const BigInt& l, const GroupPresentation& g);

RadicalData radical(const GroupPresentation& g);

// 4 h(x)^2 R(G)^2 for x outside the radical extended by constants.
BigInt frobenius_depth_bound_sq(const RatFunc& x, const GroupPresentation& g);

inline constexpr std::uint64_t kDefaultEnumerationCap = 1000000;

// Visits every element of height at most b exactly once; throws ResourceError past the cap.
void enumerate_bounded(const GroupPresentation& g, std::int64_t b,
                       const std::function<void(const GroupElement&)>& visit,
                       std::uint64_t cap = kDefaultEnumerationCap);
std::vector<GroupElement> enumerate_bounded(const GroupPresentation& g, std::int64_t b,
                                            std::uint64_t cap = kDefaultEnumerationCap);

// Lattice vectors e * basis with monic height at most b; coefficient vectors are reported.
void enumerate_lattice_bounded(const std::vector<Place>& finite_support, const IntMatrix& basis, std::int64_t b,
                               const std::function<void(const IntVec&)>& visit,
                               std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace sunit
