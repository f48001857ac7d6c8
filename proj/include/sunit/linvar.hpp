#pragma once

// Linear subvarieties of P_n over F_p(t) and diagonal automorphisms.
//
// A variety is cut out by linear forms in X_0, ..., X_n; X_0 = 1 gives the affine chart
// in which solutions live. The canonical forms are the reduced row echelon form with
// pivots taken from the highest-index variables first, so every equation reads
// X_i = sum_j a(i,j) X_j over the free variables.

#include "sunit/heights.hpp"
#include "sunit/linalg.hpp"
#include "sunit/mulgroup.hpp"

#include <compare>
#include <optional>
#include <vector>

namespace sunit {

class LinearVariety {
public:
    // Forms are rows of n+1 coefficients. Throws MathError for dependent forms or when
    // the forms leave no affine points.
    LinearVariety(std::uint32_t p, std::size_t n, const Matrix& forms);

    std::uint32_t p() const { return p_; }
    std::size_t n() const { return n_; }
    std::size_t dim() const { return n_ - forms_.size(); }
    const Matrix& forms() const { return forms_; }
    // Pivot variable of each canonical form, decreasing.
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    const std::vector<std::size_t>& free_variables() const { return free_; }
    // a(i,j) with X_i = sum_j a(i,j) X_j for pivot i and free j.
    RatFunc coefficient(std::size_t pivot_row, std::size_t free_var) const;
    bool is_full_space() const { return forms_.empty(); }

    // Primitive maximal minors of the forms; empty for the full space.
    const std::vector<Poly>& grassmannians() const { return grassmannians_; }
    Height height() const;

    bool contains(const Vec& point) const;  // projective point X_0..X_n
    bool contains(const LinearVariety& w) const;

    friend bool operator==(const LinearVariety& a, const LinearVariety& b) {
        return a.p_ == b.p_ && a.n_ == b.n_ && a.forms_ == b.forms_;
    }
    friend bool operator<(const LinearVariety& a, const LinearVariety& b);

private:
    std::uint32_t p_;
    std::size_t n_;
    Matrix forms_;
    std::vector<std::size_t> pivots_;
    std::vector<std::size_t> free_;
    std::vector<Poly> grassmannians_;
};

LinearVariety triangularize(std::uint32_t p, std::size_t n, const Matrix& forms);
// Variety of the affine equations sum_i a_i x_i = b, given as rows (a_1..a_n, b).
LinearVariety affine_variety(std::uint32_t p, std::size_t n, const Matrix& rows);

// X_i -> g_i X_i. Scalars are nonzero; elements holds their group coordinates when known.
struct DiagonalAutomorphism {
    std::vector<RatFunc> scalars;
    std::vector<GroupElement> elements;

    Height height() const { return proj_height(scalars); }
    DiagonalAutomorphism inverse() const;
    Vec apply(const Vec& point) const;
};

DiagonalAutomorphism identity_automorphism(std::uint32_t p, std::size_t n);

// Image of V; checks h(psi V) <= h(V) + n h(psi) and h(psi^-1) <= n h(psi).
LinearVariety apply_automorphism(const DiagonalAutomorphism& psi, const LinearVariety& v);

bool is_transversal(const LinearVariety& v);

// Variables with a common block satisfy X_i = ratio_i X_{rep}; ratio of a representative is 1.
struct CosetDescription {
    std::vector<std::size_t> block;      // block index of each variable
    std::vector<std::size_t> representative;  // per block
    std::vector<RatFunc> ratio;          // per variable
    std::vector<std::size_t> free_blocks;     // blocks not containing X_0

    bool is_subgroup() const;
    LinearVariety variety(std::uint32_t p) const;
};

std::optional<CosetDescription> coset_form(const LinearVariety& v);

// psi with scalars in g such that psi(V) is defined over F_p, or nothing. Checks
// h(psi) <= n! h(V).
std::optional<DiagonalAutomorphism> isotrivial_witness(const LinearVariety& v, const GroupPresentation& g);

// Nothing when the intersection has no affine points; checks h(V cap W) <= h(V) + h(W).
std::optional<LinearVariety> intersect(const LinearVariety& v, const LinearVariety& w);

// Nonempty proper subsets I with sum_{i in I} a_i X_i = 0, as sorted index lists.
std::vector<std::vector<std::size_t>> vanishing_subsums(const Vec& point, const Vec& coeffs);

}  // namespace sunit
