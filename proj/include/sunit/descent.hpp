#pragma once

// The solver for V(sqrt(G)) and V(G) with V a linear subvariety of P_n over F_p(t).
//
// Points are affine (X_0 = 1) and handled in monic coordinates over the finite places of
// the group's support, so Frobenius powers are exponent multiplications and heights of
// huge members never require polynomial expansion.
//
// The radical solver is a Frobenius splitting automaton. Every x in sqrt(G)^n is
// x = g * x'^p for a unique class representative g (exponents in [0, p) over a reduced
// basis), and g * x'^p lies on U exactly when x' lies on the split variety U_g obtained
// by writing each coefficient times g_j as sum_i t^i b_i^p. Nodes are canonical
// varieties; cosets (points included) are leaves with explicitly parametrized points.
// Cycles through non-coset nodes become Frobenius brackets, and periodic points of the
// cycles are solved exactly.
//
// A bracket family with steps Phi_1..Phi_h (Phi = psi^(q-1)), base point tau and subgroup
// variety S has members
//     Phi_1^[k_1] * (Phi_2^[k_2] * ( ... tau^(q^k_h) ... )^(q^k_2))^(q^k_1) * s,
// with [k] = (q^k - 1)/(q - 1) and s in S(sqrt(G)). The subgroup factor s is applied
// after the brackets, which keeps products with free coordinates complete.

#include "sunit/linvar.hpp"
#include "sunit/mulgroup.hpp"
#include "sunit/wronskian.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sunit {

using Rational = boost::multiprecision::cpp_rational;

// Affine point x_1..x_n, each coordinate in monic coordinates over a finite support.
struct ExpPoint {
    std::vector<MonicCoords> coords;
    friend bool operator==(const ExpPoint&, const ExpPoint&) = default;
    friend auto operator<=>(const ExpPoint&, const ExpPoint&) = default;
};

// Exponent vectors of the coordinates x_1..x_n; constants are implicitly 1.
using ExpMatrix = std::vector<IntVec>;
using RatMatrix = std::vector<std::vector<Rational>>;

enum class FamilyKind { Bracket, Symmetric };
enum class SolveMode { Radical, Group };

// Original Frobenius index e = offset + period * k, or the fixed value offset when period is 0.
struct IndexConstraint {
    BigInt offset;
    BigInt period;
    friend bool operator==(const IndexConstraint&, const IndexConstraint&) = default;
    friend bool operator<(const IndexConstraint& a, const IndexConstraint& b) {
        return a.offset != b.offset ? a.offset < b.offset : a.period < b.period;
    }
};

// A point of the symmetric form: rational exponents and constants.
struct RatPoint {
    RatMatrix exponents;
    std::vector<Residue> constants;
    friend bool operator==(const RatPoint&, const RatPoint&) = default;
};

struct FrobeniusFamily {
    FamilyKind kind = FamilyKind::Bracket;
    SolveMode mode = SolveMode::Radical;
    BigInt q = 1;
    std::vector<ExpMatrix> steps;                  // Bracket: Phi_i
    ExpPoint tail;                                 // Bracket: tau
    std::vector<std::vector<std::size_t>> subgroup;  // blocks of S (0-based coordinates)
    std::vector<RatPoint> points;                  // Symmetric: pi_0..pi_h
    std::vector<IndexConstraint> congruence;       // group mode: origin of each original index
    std::optional<LinearVariety> carrier;          // first subvariety below the root's own cycle
    std::optional<DiagonalAutomorphism> carrier_witness;  // isotrivial refinement only
    std::string provenance;

    std::size_t h() const { return kind == FamilyKind::Bracket ? steps.size() : points.size() - 1; }
    bool point_tail() const { return subgroup.empty(); }
    // Exponents of psi_i = Phi_i^(1/(q-1)), or nothing when not integral.
    std::optional<ExpMatrix> psi(std::size_t i) const;
    // Rational exponents of sigma_i = psi_i^-1, the fixed point of the i-th bracket.
    RatMatrix sigma(std::size_t i) const;
};

// Canonical order: (h, q, tail, subgroup, steps).
bool family_less(const FrobeniusFamily& a, const FrobeniusFamily& b);
bool family_equal(const FrobeniusFamily& a, const FrobeniusFamily& b);

struct StageBound {
    std::string stage;
    BigInt ceiling;
};

struct BoundCertificate {
    std::size_t n = 0, r = 0, m = 0;
    BigInt q = 1;
    BigInt h_star = 1;      // max(1, h(V))
    BigInt delta;           // 8 n^2 d (10 n^3 delta(n+r))^(2n+1)
    BigInt psi_const;       // 8 n^5 4^n (q/p) d delta(n+r)
    BigInt rho, eta;        // rho(m), eta(m)
    BigInt regulator_sq_radical, regulator_sq_group;
    std::vector<StageBound> stages;
    BigInt f = 1;           // period of the descent to G
    BigInt index = 1;       // [sqrt(G) : G]

    const BigInt& ceiling(const std::string& stage) const;
};

// One node of the splitting automaton.
struct DescentNode {
    LinearVariety variety;
    bool coset = false;
    bool alive = true;  // coset leaves with a ratio outside sqrt(G) are dead
    struct Edge {
        std::vector<std::size_t> classes;  // class index per coordinate
        std::size_t target;
    };
    std::vector<Edge> edges{};
    // Class tuples by the dimension of the split variety: point, smaller, same.
    std::size_t point_cases = 0, subvariety_cases = 0, reduction_cases = 0;
    std::size_t scc = 0;
    std::optional<std::size_t> cycle_edge{};  // edge continuing the node's cycle
};

struct DescentTree {
    LinearVariety root_variety;      // the input variety
    LinearVariety reduced_variety;   // after removing free coordinates and homogeneous blocks
    std::vector<std::size_t> kept;   // input coordinates (0-based) of the reduced variety
    ExpPoint base;                   // tail factor on removed coordinates
    std::vector<std::vector<std::size_t>> removed_blocks;  // blocks of S from removed coordinates
    bool empty = false;              // a removed block has no sqrt(G) points
    std::optional<std::size_t> scale_coordinate;  // a cone dehomogenized at this coordinate
    Matrix removed_forms;            // root forms of the removed blocks
    std::vector<DescentNode> nodes;  // nodes[0] is the reduced root
    std::size_t classes_per_coordinate = 0;
};

struct SolveOptions {
    std::uint64_t max_classes = 10000000;
    std::size_t max_nodes = 20000;
    std::size_t max_families = 200000;
    bool isotrivial_refine = false;
    unsigned threads = 1;
};

struct SolutionSet {
    SolveMode mode = SolveMode::Radical;
    std::vector<FrobeniusFamily> families;
    std::vector<ExpPoint> isolated;  // points of the h = 0 point families
    std::vector<std::string> provenance;
    BoundCertificate certificate;
};

// Shared data for a problem: the group, its radical and the class representatives.
class DescentContext {
public:
    DescentContext(const LinearVariety& v, const GroupPresentation& g);

    const LinearVariety& variety() const { return v_; }
    const GroupPresentation& group() const { return g_; }
    const GroupPresentation& radical_group() const { return rad_.radical; }
    const RadicalData& radical_data() const { return rad_; }
    const std::vector<Place>& support() const { return g_.finite_support; }
    std::uint32_t p() const { return g_.p(); }
    std::size_t n() const { return v_.n(); }

    // Class representatives of sqrt(G) / sqrt(G)^p with constant 1.
    std::size_t class_count() const { return reps_.size(); }
    const IntVec& rep_exponents(std::size_t c) const { return rep_exps_[c]; }
    const RatFunc& rep(std::size_t c) const { return reps_[c]; }
    // Class index of an exponent vector in the radical lattice.
    std::optional<std::size_t> class_of(const IntVec& v) const;
    bool in_radical(const MonicCoords& m) const;
    bool in_group(const MonicCoords& m) const;

private:
    LinearVariety v_;
    GroupPresentation g_;
    RadicalData rad_;
    IntMatrix basis_;  // reduced basis of the radical lattice
    Lattice basis_lattice_;
    std::vector<IntVec> rep_exps_;
    std::vector<RatFunc> reps_;
};

// --- Proposition step (Wronskian form) ---------------------------------------------

struct PropositionCase {
    std::size_t s = 0;                        // dim over K^p of the span of a_j g_j
    bool empty = false;                       // no point of this class lies on V
    std::optional<LinearVariety> subvariety;  // W for s > 1 (a point when s = n)
    std::optional<Vec> point;                 // s = n: affine candidate x_1..x_n
    std::optional<DiagonalAutomorphism> psi;  // s = 1
    std::optional<LinearVariety> reduced;     // s = 1: V' with V = psi(V'^p)
};

// Analysis of the class tuple (class index per coordinate) on a transversal hyperplane
// that lies in no proper coset.
PropositionCase proposition_step(const LinearVariety& v, const DescentContext& ctx,
                                 const std::vector<std::size_t>& classes);

// U_g = {x' : g x'^p in U} computed by Frobenius splitting; nothing when it has no torus points.
std::optional<LinearVariety> split_variety(const LinearVariety& u, const std::vector<RatFunc>& g);
// psi_g(U_g^(p)) as a subvariety of U.
LinearVariety image_variety(const LinearVariety& split, const std::vector<RatFunc>& g);

// --- Congruences ---------------------------------------------------------------------

struct CongruenceConstraint {
    BigInt L, M, N;  // L * Q^e = M (mod N)
};

struct CongruenceSolution {
    bool finite = true;
    std::vector<BigInt> exceptional;  // solutions below start
    BigInt start = 0;                 // Q^e mod N is periodic from here on
    BigInt period = 0;                // minimal period of the solution set beyond start
    std::vector<BigInt> offsets;      // e = offset + k * period, offsets in [start, start + period)
    bool contains(const BigInt& e) const;
};

CongruenceSolution congruence_solve(const BigInt& Q, const std::vector<CongruenceConstraint>& constraints);

// --- Solver --------------------------------------------------------------------------

DescentTree build_descent(const DescentContext& ctx, const SolveOptions& options = {});
SolutionSet assemble_theorem1(const DescentContext& ctx, const DescentTree& tree, const SolveOptions& options = {});
SolutionSet solve_radical(const DescentContext& ctx, const SolveOptions& options = {});
SolutionSet descend_to_G(const DescentContext& ctx, const SolutionSet& radical_solution);
SolutionSet solve(const DescentContext& ctx, SolveMode mode, const SolveOptions& options = {});

FrobeniusFamily symmetrize(const DescentContext& ctx, const FrobeniusFamily& family);
// Point-tailed families only; requires a hyperplane with all coefficients nonzero.
std::vector<FrobeniusFamily> theorem3_filter(const DescentContext& ctx, const std::vector<FrobeniusFamily>& families);

// Member for Frobenius indices k (Bracket) or exponents l (Symmetric), with s = 1.
ExpPoint family_member(const FrobeniusFamily& family, const std::vector<BigInt>& k);

struct ExpandOptions {
    bool nondegenerate = false;  // drop members with a vanishing subsum
    std::uint64_t max_points = 1000000;
};

// All members with projective height at most cap, each verified.
std::vector<ExpPoint> expand_family(const DescentContext& ctx, const FrobeniusFamily& family, const BigInt& cap,
                                    const ExpandOptions& options = {});

struct PointCertificate {
    bool on_variety = false;
    std::vector<bool> in_group;
    bool passed() const;
};

PointCertificate verify_point(const LinearVariety& v, const GroupPresentation& g, const ExpPoint& point);
PointCertificate verify_point(const LinearVariety& v, const GroupPresentation& g, const Vec& affine_point);
// Exact test of the forms on a point with arbitrarily large exponents.
bool on_variety(const Matrix& forms, const std::vector<Place>& support, const ExpPoint& point);

// Projective height of (1, x_1, ..., x_n) from exponents; constants do not matter.
BigInt point_height(const std::vector<Place>& support, const ExpPoint& point);
Rational rational_height(const std::vector<Place>& support, const RatMatrix& exponents);
Vec realize_point(const std::vector<Place>& support, const ExpPoint& point);
std::optional<ExpPoint> point_coords(const Vec& affine_point, const std::vector<Place>& support);

BoundCertificate bound_certificate(const LinearVariety& v, const GroupPresentation& g, const BigInt& q);
// Throws BoundViolation when a family exceeds the certificate.
void check_family_bounds(const DescentContext& ctx, const BoundCertificate& cert, const FrobeniusFamily& family);

std::string to_string(const ExpPoint& point, const std::vector<Place>& support);

}  // namespace sunit
