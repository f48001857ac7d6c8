#pragma once

// Linear dependence over the constants K^p = F_p(t^p) via Wronskians, and over F_q via
// Moore determinants.

#include "sunit/linalg.hpp"
#include "sunit/mulgroup.hpp"

#include <optional>
#include <vector>

namespace sunit {

// Exponent residues mod p over a group's free generators.
using ResidueClass = std::vector<std::uint32_t>;

// higher[k] = (d/dt)^k x / x for a class representative x; higher[0] = 1, higher[1] = u.
struct LogProfile {
    RatFunc u;
    std::vector<RatFunc> higher;
};

// Profile from a logarithmic derivative u; higher[k+1] = higher[k]' + higher[k] u.
LogProfile profile_from_log_derivative(const RatFunc& u, int depth);
LogProfile log_profile(const RatFunc& x, int depth);
LogProfile log_profile(const ResidueClass& rc, const GroupPresentation& g, int depth);

// The Wronskian matrix (D^i x_j), i = 0..m-1.
Matrix wronskian_matrix(const std::vector<RatFunc>& xs);

// A relation sum c_j x_j = 0 with every c_j in K^p, not all zero, or nothing when independent.
std::optional<std::vector<RatFunc>> c_dependence(const std::vector<RatFunc>& xs);

// Solves sum_j higher_i(profile_j) y_j = target_i for i = 0..m-1.
Vec cramer_solve(const std::vector<LogProfile>& profiles, const Vec& target);
// Target e_0: the solution of y_1 + ... + y_m = 1 differentiated m-1 times.
Vec cramer_solve(const std::vector<LogProfile>& profiles);

// 4 m^4 delta(r) R^2 with d = 1.
BigInt class_height_bound(std::uint64_t m, std::uint64_t r, const BigInt& regulator_sq);

// A relation sum c_j y_j = 0 over F_q from the Moore matrix (y_i^(q^j)). Because F_p is
// algebraically closed in F_p(t), such relations have coefficients in F_p.
std::optional<std::vector<Residue>> fq_dependence_moore(const std::vector<RatFunc>& ys, const BigInt& q);

}  // namespace sunit
