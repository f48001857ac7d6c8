#pragma once

// Helpers shared by the descent sources.

#include "sunit/descent.hpp"

#include <optional>
#include <vector>

namespace sunit::detail {

using RatVec = std::vector<Rational>;

RatVec to_rat(const IntVec& v);
RatMatrix to_rat(const ExpMatrix& m);
ExpMatrix exponents_of(const ExpPoint& x);
ExpMatrix zero_exponents(std::size_t n, std::size_t f);
bool is_integral(const RatMatrix& m);
ExpMatrix to_int(const RatMatrix& m);  // requires integral entries

RatMatrix add(const RatMatrix& a, const RatMatrix& b);
RatMatrix sub(const RatMatrix& a, const RatMatrix& b);
RatMatrix scale(const RatMatrix& a, const Rational& c);
ExpMatrix add(const ExpMatrix& a, const ExpMatrix& b);
ExpMatrix scale(const ExpMatrix& a, const BigInt& c);

// (q^k - 1) / (q - 1)
BigInt geometric(const BigInt& q, const BigInt& k);

// One Frobenius bracket z -> [k] phi + q^k z with its own q.
struct Bracket {
    ExpMatrix phi;
    BigInt q;
};

// Families before the uniform q is chosen; the exponents live on the reduced coordinates.
struct RawFamily {
    std::vector<Bracket> brackets;
    ExpPoint tail;
    std::vector<std::vector<std::size_t>> blocks;
    std::optional<LinearVariety> carrier;
    std::string provenance;
};

// Per-index selection of Frobenius indices: a fixed value or offset + period * k.
struct IndexSpec {
    BigInt offset;
    BigInt period;  // 0 for a fixed index
};

// Member exponents for the given indices of the brackets.
ExpMatrix apply_brackets(const std::vector<Bracket>& brackets, const ExpMatrix& tail, const std::vector<BigInt>& k);

// Rewrites brackets under the index specs; every progression index must reach the same
// q^period. Fixed indices disappear; the returned brackets share the new q.
struct Reindexed {
    std::vector<Bracket> brackets;
    ExpPoint tail;
    BigInt q;
};
Reindexed reindex(const std::vector<Bracket>& brackets, const ExpPoint& tail, const std::vector<IndexSpec>& specs,
                  const BigInt& fallback_q);

// Fixed point sigma = -phi / (q - 1).
RatMatrix fixed_point(const Bracket& b);

// Solutions c in (F_p^*)^n of the forms at the points c_j * m_j; throws past the cap.
std::vector<std::vector<Residue>> constant_solutions(const Matrix& forms, const Vec& monomials, std::uint32_t p,
                                                     std::uint64_t cap = 1000000);

// Linear test vectors for subgroup blocks: coordinate, minus its block representative when it has one.
struct TestVector {
    std::size_t coord;
    std::optional<std::size_t> ref;
};
std::vector<TestVector> test_vectors(std::size_t n, const std::vector<std::vector<std::size_t>>& blocks);
RatMatrix apply_tests(const std::vector<TestVector>& tests, const RatMatrix& m);
ExpMatrix apply_tests(const std::vector<TestVector>& tests, const ExpMatrix& m);
std::vector<Residue> test_constants(const std::vector<TestVector>& tests, const ExpPoint& x, std::uint32_t p);

// Divides every block coordinate by its representative, leaving the representative at 1.
struct BlockNormalizer {
    std::vector<std::optional<std::size_t>> rep;

    BlockNormalizer(std::size_t n, const std::vector<std::vector<std::size_t>>& blocks);
    ExpMatrix apply(ExpMatrix m) const;
    ExpPoint apply(const ExpPoint& x, std::uint32_t p) const;
};

// Whether some s in S(sqrt(G)) brings x into G^n (the coset x * S has a G-point).
bool coset_meets_group(const DescentContext& ctx, const ExpPoint& x, const std::vector<std::vector<std::size_t>>& blocks);

// Canonical rows of the split system for the class tuple g (g_0 = 1), or nothing when
// the split variety has no torus points.
std::optional<Matrix> split_rows(const Matrix& forms, const std::vector<RatFunc>& g);
bool canonical_feasible(const Matrix& rows);

// Prime factors by trial division and the multiplicative order of a modulo m.
std::vector<BigInt> prime_factors(BigInt n);
BigInt order_mod(const BigInt& a, const BigInt& m);

bool family_key_less(const FrobeniusFamily& a, const FrobeniusFamily& b);

}  // namespace sunit::detail
