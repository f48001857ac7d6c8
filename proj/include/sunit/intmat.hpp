#pragma once

// Integer matrices: Smith normal form, row lattices and exact coordinates.

#include "sunit/bigint.hpp"

#include <optional>
#include <vector>

namespace sunit {

using IntVec = std::vector<BigInt>;
using IntMatrix = std::vector<IntVec>;

IntMatrix identity_matrix(std::size_t n);
IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b);
IntVec row_times(const IntVec& v, const IntMatrix& m);
BigInt int_dot(const IntVec& a, const IntVec& b);
BigInt int_det(IntMatrix m);
IntMatrix transpose(const IntMatrix& m, std::size_t cols);

// U * A * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ... positive.
struct SmithForm {
    IntMatrix U, V, V_inv;
    IntVec diagonal;  // the nonzero invariant factors
};
SmithForm smith_form(const IntMatrix& a, std::size_t cols);

// Row echelon form of A with the unimodular transform split into basis rows and relations.
struct HermiteForm {
    IntMatrix basis;      // nonzero echelon rows, pivots positive, entries above pivots reduced
    IntMatrix transform;  // basis = transform * A
    IntMatrix relations;  // generate the left kernel of A
};
HermiteForm hermite_form(const IntMatrix& a, std::size_t cols);

// A Z-basis of the lattice spanned by rows of A.
inline IntMatrix row_lattice_basis(const IntMatrix& a, std::size_t cols) { return hermite_form(a, cols).basis; }

// A full-rank lattice in Z^n with exact coordinate recovery.
class Lattice {
public:
    Lattice() = default;
    Lattice(IntMatrix basis, std::size_t dim);

    std::size_t rank() const { return basis_.size(); }
    std::size_t dim() const { return dim_; }
    const IntMatrix& basis() const { return basis_; }
    // e with e * basis = v, when v lies in the lattice.
    std::optional<IntVec> coords(const IntVec& v) const;
    bool contains(const IntVec& v) const { return coords(v).has_value(); }
    // Basis of the saturation (Q-span intersected with Z^n) and the invariant factors.
    IntMatrix saturation_basis() const;
    const IntVec& invariant_factors() const { return smith_.diagonal; }
    const SmithForm& smith() const { return smith_; }

private:
    IntMatrix basis_;
    std::size_t dim_ = 0;
    SmithForm smith_;
};

}  // namespace sunit
