#pragma once

// Exact arithmetic in F_p, F_p[t] and F_p(t).

#include "sunit/bigint.hpp"
#include "sunit/errors.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace sunit {

using Residue = std::uint32_t;

class FieldContext {
public:
    explicit FieldContext(std::uint32_t p);

    std::uint32_t p() const { return p_; }
    std::uint32_t constant_field_order() const { return p_ - 1; }
    static constexpr int degree_d = 1;
    static constexpr int basis_b = 1;

    friend bool operator==(const FieldContext&, const FieldContext&) = default;

private:
    std::uint32_t p_;
};

bool is_prime(std::uint64_t n);

// Residue helpers; all arguments already reduced mod p.
inline Residue fp_add(Residue a, Residue b, std::uint32_t p) {
    std::uint64_t s = std::uint64_t(a) + b;
    return static_cast<Residue>(s >= p ? s - p : s);
}
inline Residue fp_sub(Residue a, Residue b, std::uint32_t p) { return a >= b ? a - b : a + p - b; }
inline Residue fp_neg(Residue a, std::uint32_t p) { return a == 0 ? 0 : p - a; }
inline Residue fp_mul(Residue a, Residue b, std::uint32_t p) {
    return static_cast<Residue>(std::uint64_t(a) * b % p);
}
Residue fp_pow(Residue a, std::uint64_t e, std::uint32_t p);
Residue fp_inv(Residue a, std::uint32_t p);
Residue fp_from_int(std::int64_t v, std::uint32_t p);
Residue fp_from_big(const BigInt& v, std::uint32_t p);

// Dense univariate polynomial over F_p; coefficient i multiplies t^i.
class Poly {
public:
    explicit Poly(std::uint32_t p = 2) : p_(p) {}
    Poly(std::uint32_t p, std::vector<Residue> coeffs);

    static Poly constant(std::uint32_t p, Residue c);
    static Poly monomial(std::uint32_t p, Residue c, std::size_t deg);
    static Poly t(std::uint32_t p) { return monomial(p, 1, 1); }

    std::uint32_t p() const { return p_; }
    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    Residue lead() const { return c_.empty() ? 0 : c_.back(); }
    Residue coeff(std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
    const std::vector<Residue>& coeffs() const { return c_; }
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }
    bool is_constant() const { return c_.size() <= 1; }

    Poly monic() const;
    Poly scaled(Residue c) const;
    Poly derivative() const;
    Residue eval(Residue x) const;
    Poly pow(std::uint64_t e) const;
    // f(t) -> f(t^k)
    Poly stretch(std::uint64_t k) const;

    Poly operator-() const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(const Poly& o);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const Poly& b) { return a *= b; }

    // Euclidean division; throws MathError on zero divisor.
    std::pair<Poly, Poly> divmod(const Poly& d) const;
    Poly operator/(const Poly& d) const { return divmod(d).first; }
    Poly operator%(const Poly& d) const { return divmod(d).second; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.p_ == b.p_ && a.c_ == b.c_; }
    // Orders by degree, then coefficients from the top down.
    friend std::strong_ordering operator<=>(const Poly& a, const Poly& b);

    std::string to_string(const std::string& var = "t") const;

private:
    void trim();
    std::uint32_t p_;
    std::vector<Residue> c_;
};

Poly poly_gcd(Poly a, Poly b);  // monic, or zero when both are zero
// Returns (g, s, u) with s*a + u*b = g monic.
std::tuple<Poly, Poly, Poly> poly_xgcd(const Poly& a, const Poly& b);
Poly poly_powmod(const Poly& base, const BigInt& e, const Poly& mod);
bool is_irreducible(const Poly& f);

struct Factorization {
    Residue unit = 1;
    std::vector<std::pair<Poly, int>> factors;  // monic irreducible, sorted
};

Factorization factor_poly(const Poly& f);

// Canonical element of F_p(t): monic denominator, coprime numerator.
class RatFunc {
public:
    explicit RatFunc(std::uint32_t p = 2);
    RatFunc(const Poly& num);
    RatFunc(const Poly& num, const Poly& den);

    static RatFunc constant(std::uint32_t p, std::int64_t c);
    static RatFunc t(std::uint32_t p) { return RatFunc(Poly::t(p)); }

    std::uint32_t p() const { return num_.p(); }
    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const { return den_.degree() == 0 && num_.degree() == 0 && num_.lead() == 1; }
    bool is_constant() const { return num_.degree() <= 0 && den_.degree() == 0; }
    // Value of a constant; requires is_constant().
    Residue constant_value() const { return num_.lead(); }

    RatFunc inverse() const;
    RatFunc pow(const BigInt& e) const;
    RatFunc pow(std::int64_t e) const { return pow(BigInt(e)); }

    RatFunc operator-() const;
    RatFunc& operator+=(const RatFunc& o);
    RatFunc& operator-=(const RatFunc& o);
    RatFunc& operator*=(const RatFunc& o);
    RatFunc& operator/=(const RatFunc& o);
    friend RatFunc operator+(RatFunc a, const RatFunc& b) { return a += b; }
    friend RatFunc operator-(RatFunc a, const RatFunc& b) { return a -= b; }
    friend RatFunc operator*(RatFunc a, const RatFunc& b) { return a *= b; }
    friend RatFunc operator/(RatFunc a, const RatFunc& b) { return a /= b; }

    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const RatFunc& a, const RatFunc& b);

    std::string to_string(const std::string& var = "t") const;

private:
    void normalize();
    Poly num_;
    Poly den_;
};

class Place {
public:
    static Place infinity(std::uint32_t p) { return Place(Poly(p), true); }
    // Requires a monic irreducible polynomial.
    static Place finite(const Poly& irreducible);

    bool is_infinity() const { return inf_; }
    const Poly& poly() const { return poly_; }
    int degree() const { return inf_ ? 1 : poly_.degree(); }

    friend bool operator==(const Place& a, const Place& b) = default;
    // Infinity first, then finite places by polynomial order.
    friend std::strong_ordering operator<=>(const Place& a, const Place& b);

    std::string to_string() const;

private:
    Place(Poly poly, bool inf) : poly_(std::move(poly)), inf_(inf) {}
    Poly poly_;
    bool inf_;
};

using Divisor = std::map<Place, std::int64_t>;

std::int64_t ord_at(const RatFunc& x, const Place& w);
Divisor divisor(const RatFunc& x);
std::int64_t divisor_degree(const Divisor& d);

RatFunc derivative(const RatFunc& x);
std::optional<RatFunc> pth_root(const RatFunc& x);

inline constexpr std::uint64_t kDefaultFrobeniusDegreeCap = 1000000;

// x^(q^e) for q a power of p, expanded; throws ResourceError beyond the degree cap.
RatFunc frobenius_power(const RatFunc& x, const BigInt& q, const BigInt& e,
                        std::uint64_t degree_cap = kDefaultFrobeniusDegreeCap);

// Components b_0..b_{p-1} with x = sum_i t^i * b_i^p.
std::vector<RatFunc> frobenius_split(const RatFunc& x);

// Monic factorization coordinates: x = c * prod P_w^{v_w} over finite places.
struct MonicFactors {
    Residue constant = 1;
    std::map<Place, std::int64_t> orders;
};
MonicFactors monic_factors(const RatFunc& x);

}  // namespace sunit
