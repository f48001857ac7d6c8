#include "descent_internal.hpp"

#include <algorithm>
#include <set>

namespace sunit {

namespace detail {

constexpr std::uint64_t kFactorLimit = std::uint64_t(1) << 62;

// Prime factors of a small positive integer by trial division.
std::vector<BigInt> prime_factors(BigInt n) {
    if (n > kFactorLimit) throw ResourceError("modulus too large to factor by trial division");
    std::vector<BigInt> out;
    for (BigInt d = 2; d * d <= n; ++d) {
        if (n % d != 0) continue;
        out.push_back(d);
        while (n % d == 0) n /= d;
    }
    if (n > 1) out.push_back(n);
    return out;
}

// Order of a modulo m, for gcd(a, m) = 1.
BigInt order_mod(const BigInt& a, const BigInt& m) {
    if (m == 1) return 1;
    BigInt phi = m;
    for (const auto& q : prime_factors(m)) phi = phi / q * (q - 1);
    BigInt ord = phi;
    for (const auto& q : prime_factors(phi))
        while (ord % q == 0 && big_powmod(a, ord / q, m) == 1) ord /= q;
    return ord;
}

}  // namespace detail

namespace {

using detail::order_mod;
using detail::prime_factors;

std::pair<BigInt, unsigned> prime_power_root(const BigInt& q) {
    if (q < 2) throw MathError("Q must be a prime power greater than 1");
    auto f = prime_factors(q);
    if (f.size() != 1) throw MathError("Q must be a prime power");
    unsigned a = 0;
    BigInt x = q;
    while (x % f[0] == 0) {
        x /= f[0];
        ++a;
    }
    return {f[0], a};
}

}  // namespace

bool CongruenceSolution::contains(const BigInt& e) const {
    if (e < 0) return false;
    if (e < start) return std::find(exceptional.begin(), exceptional.end(), e) != exceptional.end();
    if (finite || period == 0) return false;
    BigInt r = start + mod_floor(e - start, period);
    return std::find(offsets.begin(), offsets.end(), r) != offsets.end();
}

CongruenceSolution congruence_solve(const BigInt& Q, const std::vector<CongruenceConstraint>& constraints) {
    const auto [P, a] = prime_power_root(Q);
    BigInt pre = 0, period = 1;
    for (const auto& c : constraints) {
        if (c.N < 1) throw MathError("congruence modulus must be positive");
        BigInt rest = c.N;
        unsigned v = 0;
        while (rest % P == 0) {
            rest /= P;
            ++v;
        }
        pre = std::max(pre, BigInt((v + a - 1) / a));
        period = big_lcm(period, order_mod(Q, rest));
    }
    auto holds = [&](const BigInt& e) {
        for (const auto& c : constraints) {
            BigInt lhs = mod_floor(c.L * big_powmod(Q, e, c.N), c.N);
            if (lhs != mod_floor(c.M, c.N)) return false;
        }
        return true;
    };

    std::set<BigInt> residues;  // e - pre in [0, period)
    for (BigInt e = 0; e < period; ++e)
        if (holds(pre + e)) residues.insert(e);

    // Smallest divisor of the period compatible with the residue set.
    BigInt best = period;
    for (BigInt d = 1; d < period; ++d) {
        if (period % d != 0) continue;
        bool ok = true;
        for (BigInt e = 0; e < period && ok; ++e) ok = residues.count(e) == residues.count(mod_floor(e + d, period));
        if (ok) {
            best = d;
            break;
        }
    }

    CongruenceSolution out;
    out.start = pre;
    out.period = best;
    for (const auto& e : residues)
        if (e < best) out.offsets.push_back(pre + e);
    // Move the start down while the values below it follow the periodic pattern.
    while (out.start > 0) {
        BigInt e = out.start - 1;
        bool periodic_member =
            !out.offsets.empty() &&
            std::find(out.offsets.begin(), out.offsets.end(), out.start + mod_floor(e - out.start, best)) !=
                out.offsets.end();
        if (holds(e) != periodic_member) break;
        out.start = e;
        if (!out.offsets.empty()) {
            // Keep offsets in [start, start + period).
            for (auto& o : out.offsets)
                if (o >= out.start + best) o -= best;
            std::sort(out.offsets.begin(), out.offsets.end());
        }
    }
    for (BigInt e = 0; e < out.start; ++e)
        if (holds(e)) out.exceptional.push_back(e);
    out.finite = out.offsets.empty();
    if (out.finite) out.period = 0;
    return out;
}

}  // namespace sunit
