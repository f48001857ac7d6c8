#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

namespace sunit {

using BigInt = boost::multiprecision::cpp_int;

inline std::string to_decimal(const BigInt& v) { return v.str(); }

// Floor division and nonnegative remainder; cpp_int truncates toward zero.
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    BigInt r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline BigInt mod_floor(const BigInt& a, const BigInt& b) {
    BigInt r = a % b;
    if (r < 0) r += (b < 0 ? -b : b);
    return r;
}

inline BigInt big_gcd(BigInt a, BigInt b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        BigInt t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline BigInt big_lcm(const BigInt& a, const BigInt& b) {
    if (a == 0 || b == 0) return 0;
    BigInt g = big_gcd(a, b);
    BigInt l = a / g * b;
    return l < 0 ? BigInt(-l) : l;
}

inline BigInt big_pow(BigInt base, std::uint64_t e) {
    BigInt r = 1;
    while (e) {
        if (e & 1) r *= base;
        e >>= 1;
        if (e) base *= base;
    }
    return r;
}

inline BigInt big_powmod(BigInt base, BigInt e, const BigInt& m) {
    if (m == 1) return 0;
    BigInt r = 1;
    base = mod_floor(base, m);
    while (e > 0) {
        if ((e & 1) != 0) r = (r * base) % m;
        e >>= 1;
        if (e > 0) base = (base * base) % m;
    }
    return r;
}

inline std::int64_t to_i64(const BigInt& v) { return v.convert_to<std::int64_t>(); }

// Exact residue of a bigint modulo a small positive modulus.
inline std::uint64_t mod_small(const BigInt& v, std::uint64_t m) {
    BigInt r = mod_floor(v, BigInt(m));
    return r.convert_to<std::uint64_t>();
}

}  // namespace sunit
