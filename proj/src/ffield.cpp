#include "sunit/ffield.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace sunit {

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

FieldContext::FieldContext(std::uint32_t p) : p_(p) {
    if (!is_prime(p)) throw MathError("field characteristic " + std::to_string(p) + " is not prime");
}

Residue fp_pow(Residue a, std::uint64_t e, std::uint32_t p) {
    std::uint64_t r = 1 % p, b = a % p;
    while (e) {
        if (e & 1) r = r * b % p;
        b = b * b % p;
        e >>= 1;
    }
    return static_cast<Residue>(r);
}

Residue fp_inv(Residue a, std::uint32_t p) {
    if (a % p == 0) throw MathError("inverse of zero in F_p");
    return fp_pow(a, p - 2, p);
}

Residue fp_from_int(std::int64_t v, std::uint32_t p) {
    std::int64_t r = v % static_cast<std::int64_t>(p);
    if (r < 0) r += p;
    return static_cast<Residue>(r);
}

Residue fp_from_big(const BigInt& v, std::uint32_t p) { return static_cast<Residue>(mod_small(v, p)); }

// ---------------------------------------------------------------- Poly

Poly::Poly(std::uint32_t p, std::vector<Residue> coeffs) : p_(p), c_(std::move(coeffs)) {
    for (auto& c : c_) c %= p_;
    trim();
}

Poly Poly::constant(std::uint32_t p, Residue c) { return Poly(p, {c % p}); }

Poly Poly::monomial(std::uint32_t p, Residue c, std::size_t deg) {
    std::vector<Residue> v(deg + 1, 0);
    v[deg] = c % p;
    return Poly(p, std::move(v));
}

void Poly::trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Poly Poly::monic() const {
    if (is_zero()) return *this;
    return scaled(fp_inv(lead(), p_));
}

Poly Poly::scaled(Residue c) const {
    Poly r(p_);
    if (c % p_ == 0) return r;
    r.c_ = c_;
    for (auto& x : r.c_) x = fp_mul(x, c, p_);
    return r;
}

Poly Poly::derivative() const {
    Poly r(p_);
    if (c_.size() <= 1) return r;
    r.c_.resize(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) r.c_[i - 1] = fp_mul(c_[i], static_cast<Residue>(i % p_), p_);
    r.trim();
    return r;
}

Residue Poly::eval(Residue x) const {
    std::uint64_t acc = 0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = (acc * x + c_[i]) % p_;
    return static_cast<Residue>(acc);
}

Poly Poly::pow(std::uint64_t e) const {
    Poly r = constant(p_, 1), b = *this;
    while (e) {
        if (e & 1) r *= b;
        e >>= 1;
        if (e) b *= b;
    }
    return r;
}

Poly Poly::stretch(std::uint64_t k) const {
    if (k == 1 || c_.size() <= 1) return *this;
    Poly r(p_);
    r.c_.assign((c_.size() - 1) * k + 1, 0);
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i * k] = c_[i];
    return r;
}

Poly Poly::operator-() const {
    Poly r = *this;
    for (auto& x : r.c_) x = fp_neg(x, p_);
    return r;
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = fp_add(c_[i], o.c_[i], p_);
    trim();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = fp_sub(c_[i], o.c_[i], p_);
    trim();
    return *this;
}

Poly& Poly::operator*=(const Poly& o) {
    if (is_zero() || o.is_zero()) {
        c_.clear();
        return *this;
    }
    std::vector<std::uint64_t> acc(c_.size() + o.c_.size() - 1, 0);
    const std::uint64_t p = p_;
    // Accumulate with periodic reduction so the sums never overflow.
    const std::uint64_t limit = (~std::uint64_t(0)) / ((p - 1) * (p - 1) + 1);
    std::uint64_t pending = 0;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        for (std::size_t j = 0; j < o.c_.size(); ++j) acc[i + j] += std::uint64_t(c_[i]) * o.c_[j];
        if (++pending + 1 >= limit) {
            for (auto& a : acc) a %= p;
            pending = 0;
        }
    }
    c_.resize(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) c_[i] = static_cast<Residue>(acc[i] % p);
    trim();
    return *this;
}

std::pair<Poly, Poly> Poly::divmod(const Poly& d) const {
    if (d.is_zero()) throw MathError("polynomial division by zero");
    if (degree() < d.degree()) return {Poly(p_), *this};
    Poly q(p_), r = *this;
    q.c_.assign(c_.size() - d.c_.size() + 1, 0);
    const Residue inv = fp_inv(d.lead(), p_);
    const std::size_t dd = d.c_.size() - 1;
    for (std::size_t i = r.c_.size(); i-- > dd;) {
        Residue coef = fp_mul(r.c_[i], inv, p_);
        if (coef == 0) continue;
        q.c_[i - dd] = coef;
        for (std::size_t j = 0; j <= dd; ++j)
            r.c_[i - dd + j] = fp_sub(r.c_[i - dd + j], fp_mul(coef, d.c_[j], p_), p_);
    }
    q.trim();
    r.trim();
    return {q, r};
}

std::strong_ordering operator<=>(const Poly& a, const Poly& b) {
    if (auto c = a.p_ <=> b.p_; c != 0) return c;
    if (auto c = a.c_.size() <=> b.c_.size(); c != 0) return c;
    for (std::size_t i = a.c_.size(); i-- > 0;)
        if (auto c = a.c_[i] <=> b.c_[i]; c != 0) return c;
    return std::strong_ordering::equal;
}

std::string Poly::to_string(const std::string& var) const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = c_.size(); i-- > 0;) {
        Residue c = c_[i];
        if (c == 0) continue;
        if (!first) os << " + ";
        first = false;
        if (i == 0 || c != 1) os << c;
        if (i > 0) {
            if (c != 1) os << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

Poly poly_gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a.monic();
}

std::tuple<Poly, Poly, Poly> poly_xgcd(const Poly& a, const Poly& b) {
    const std::uint32_t p = a.p();
    Poly r0 = a, r1 = b, s0 = Poly::constant(p, 1), s1(p), u0(p), u1 = Poly::constant(p, 1);
    while (!r1.is_zero()) {
        auto [q, r] = r0.divmod(r1);
        r0 = std::move(r1);
        r1 = std::move(r);
        Poly s2 = s0 - q * s1, u2 = u0 - q * u1;
        s0 = std::move(s1);
        s1 = std::move(s2);
        u0 = std::move(u1);
        u1 = std::move(u2);
    }
    if (r0.is_zero()) return {r0, s0, u0};
    Residue inv = fp_inv(r0.lead(), p);
    return {r0.scaled(inv), s0.scaled(inv), u0.scaled(inv)};
}

Poly poly_powmod(const Poly& base, const BigInt& e, const Poly& mod) {
    Poly r = Poly::constant(base.p(), 1) % mod, b = base % mod;
    BigInt k = e;
    while (k > 0) {
        if ((k & 1) != 0) r = (r * b) % mod;
        k >>= 1;
        if (k > 0) b = (b * b) % mod;
    }
    return r;
}

namespace {

std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d) continue;
        out.push_back(d);
        while (n % d == 0) n /= d;
    }
    if (n > 1) out.push_back(n);
    return out;
}

// t^(p^k) mod f by repeated p-th powering.
Poly frob_iterate(const Poly& f, int k) {
    Poly h = Poly::t(f.p()) % f;
    for (int i = 0; i < k; ++i) h = poly_powmod(h, BigInt(f.p()), f);
    return h;
}

void square_free_parts(const Poly& f, int mult, std::vector<std::pair<Poly, int>>& out) {
    const std::uint32_t p = f.p();
    if (f.degree() <= 0) return;
    Poly c = poly_gcd(f, f.derivative());
    Poly w = f / c;
    int i = 1;
    while (w.degree() > 0) {
        Poly y = poly_gcd(w, c);
        Poly fac = w / y;
        if (fac.degree() > 0) out.emplace_back(fac.monic(), i * mult);
        w = y;
        c = c / y;
        ++i;
    }
    if (c.degree() > 0) {
        // c is a p-th power: take the root coefficientwise.
        std::vector<Residue> root;
        for (std::size_t k = 0; k < c.coeffs().size(); k += p) root.push_back(c.coeffs()[k]);
        square_free_parts(Poly(p, std::move(root)), mult * static_cast<int>(p), out);
    }
}

void equal_degree_split(const Poly& g, int d, std::mt19937_64& rng, std::vector<Poly>& out) {
    const std::uint32_t p = g.p();
    if (g.degree() == d) {
        out.push_back(g.monic());
        return;
    }
    if (d == 1 && g.degree() == 2 && p <= (1u << 16)) {
        for (Residue x = 0; x < p; ++x) {
            if (g.eval(x) != 0) continue;
            Poly lin(p, {fp_neg(x, p), 1});
            out.push_back(lin);
            out.push_back((g / lin).monic());
            return;
        }
    }
    std::uniform_int_distribution<std::uint32_t> dist(0, p - 1);
    const int n = g.degree();
    while (true) {
        std::vector<Residue> coeffs(n);
        for (auto& c : coeffs) c = dist(rng);
        Poly a(p, coeffs);
        if (a.degree() <= 0) continue;
        Poly b(p);
        if (p == 2) {
            Poly acc = a % g, term = a % g;
            for (int i = 1; i < d; ++i) {
                term = (term * term) % g;
                acc += term;
            }
            b = acc;
        } else {
            BigInt e = (big_pow(BigInt(p), d) - 1) / 2;
            b = poly_powmod(a, e, g) - Poly::constant(p, 1);
        }
        Poly h = poly_gcd(b, g);
        if (h.degree() > 0 && h.degree() < n) {
            equal_degree_split(h, d, rng, out);
            equal_degree_split(g / h, d, rng, out);
            return;
        }
    }
}

}  // namespace

bool is_irreducible(const Poly& f) {
    const int n = f.degree();
    if (n <= 0) return false;
    if (n == 1) return true;
    Poly g = f.monic();
    const Poly t = Poly::t(f.p());
    if (frob_iterate(g, n) != t % g) return false;
    for (auto q : prime_divisors(static_cast<std::uint64_t>(n))) {
        Poly h = frob_iterate(g, n / static_cast<int>(q)) - t;
        if (poly_gcd(h, g).degree() != 0) return false;
    }
    return true;
}

Factorization factor_poly(const Poly& f) {
    if (f.is_zero()) throw MathError("factor_poly of the zero polynomial");
    const std::uint32_t p = f.p();
    Factorization out;
    out.unit = f.lead();
    std::vector<std::pair<Poly, int>> sqf;
    square_free_parts(f.monic(), 1, sqf);
    std::mt19937_64 rng(0x5eed5eedULL);
    std::map<Poly, int> acc;
    for (auto& [part, mult] : sqf) {
        Poly rest = part;
        Poly h = Poly::t(p) % rest;
        for (int d = 1; rest.degree() >= 2 * d; ++d) {
            h = poly_powmod(h, BigInt(p), rest);
            Poly g = poly_gcd(h - Poly::t(p), rest);
            if (g.degree() > 0) {
                std::vector<Poly> pieces;
                equal_degree_split(g, d, rng, pieces);
                for (auto& pc : pieces) acc[pc] += mult;
                rest = rest / g;
                h = h % rest;
            }
        }
        if (rest.degree() > 0) acc[rest.monic()] += mult;
    }
    for (auto& [poly, m] : acc) out.factors.emplace_back(poly, m);
    return out;
}

// ---------------------------------------------------------------- RatFunc

RatFunc::RatFunc(std::uint32_t p) : num_(p), den_(Poly::constant(p, 1)) {}

RatFunc::RatFunc(const Poly& num) : num_(num), den_(Poly::constant(num.p(), 1)) {}

RatFunc::RatFunc(const Poly& num, const Poly& den) : num_(num), den_(den) { normalize(); }

RatFunc RatFunc::constant(std::uint32_t p, std::int64_t c) {
    return RatFunc(Poly::constant(p, fp_from_int(c, p)));
}

void RatFunc::normalize() {
    if (den_.is_zero()) throw MathError("rational function with zero denominator");
    if (num_.is_zero()) {
        den_ = Poly::constant(num_.p(), 1);
        return;
    }
    if (den_.degree() > 0) {
        Poly g = poly_gcd(num_, den_);
        if (g.degree() > 0) {
            num_ = num_ / g;
            den_ = den_ / g;
        }
    }
    Residue inv = fp_inv(den_.lead(), den_.p());
    if (inv != 1) {
        num_ = num_.scaled(inv);
        den_ = den_.scaled(inv);
    }
}

RatFunc RatFunc::inverse() const {
    if (is_zero()) throw MathError("inverse of zero rational function");
    return RatFunc(den_, num_);
}

RatFunc RatFunc::pow(const BigInt& e) const {
    if (e < 0) return inverse().pow(BigInt(-e));
    if (e == 0) return constant(p(), 1);
    if (is_zero()) return *this;
    const int deg = std::max(num_.degree(), den_.degree());
    if (deg > 0 && e * deg > BigInt(kDefaultFrobeniusDegreeCap))
        throw ResourceError("power would exceed the polynomial degree cap");
    std::uint64_t k = e.convert_to<std::uint64_t>();
    RatFunc r(p());
    r.num_ = num_.pow(k);
    r.den_ = den_.pow(k);  // coprime and monic stay so
    return r;
}

RatFunc RatFunc::operator-() const {
    RatFunc r = *this;
    r.num_ = -r.num_;
    return r;
}

RatFunc& RatFunc::operator+=(const RatFunc& o) {
    if (den_ == o.den_) {
        num_ += o.num_;
    } else {
        num_ = num_ * o.den_ + o.num_ * den_;
        den_ = den_ * o.den_;
    }
    normalize();
    return *this;
}

RatFunc& RatFunc::operator-=(const RatFunc& o) { return *this += -o; }

RatFunc& RatFunc::operator*=(const RatFunc& o) {
    if (is_zero() || o.is_zero()) {
        *this = RatFunc(p());
        return *this;
    }
    // Cross-cancel before multiplying to keep degrees small.
    Poly g1 = poly_gcd(num_, o.den_), g2 = poly_gcd(o.num_, den_);
    num_ = (num_ / g1) * (o.num_ / g2);
    den_ = (den_ / g2) * (o.den_ / g1);
    Residue inv = fp_inv(den_.lead(), den_.p());
    if (inv != 1) {
        num_ = num_.scaled(inv);
        den_ = den_.scaled(inv);
    }
    return *this;
}

RatFunc& RatFunc::operator/=(const RatFunc& o) { return *this *= o.inverse(); }

std::strong_ordering operator<=>(const RatFunc& a, const RatFunc& b) {
    if (auto c = a.num_ <=> b.num_; c != 0) return c;
    return a.den_ <=> b.den_;
}

std::string RatFunc::to_string(const std::string& var) const {
    auto wrap = [&](const Poly& q) {
        std::string s = q.to_string(var);
        bool single = q.degree() <= 0 || (q.coeffs().size() > 0 &&
                                          std::count_if(q.coeffs().begin(), q.coeffs().end(),
                                                        [](Residue c) { return c != 0; }) == 1);
        return single ? s : "(" + s + ")";
    };
    if (den_.degree() == 0) return num_.to_string(var);
    return wrap(num_) + "/" + wrap(den_);
}

// ---------------------------------------------------------------- places

Place Place::finite(const Poly& irreducible) {
    if (!irreducible.is_monic() || !is_irreducible(irreducible))
        throw MathError("finite place requires a monic irreducible polynomial");
    return Place(irreducible, false);
}

std::strong_ordering operator<=>(const Place& a, const Place& b) {
    if (a.inf_ != b.inf_) return a.inf_ ? std::strong_ordering::less : std::strong_ordering::greater;
    return a.poly_ <=> b.poly_;
}

std::string Place::to_string() const { return inf_ ? "inf" : "(" + poly_.to_string() + ")"; }

namespace {

std::int64_t multiplicity(Poly f, const Poly& q) {
    std::int64_t k = 0;
    while (!f.is_zero() && f.degree() >= q.degree()) {
        auto [quo, rem] = f.divmod(q);
        if (!rem.is_zero()) break;
        f = std::move(quo);
        ++k;
    }
    return k;
}

}  // namespace

std::int64_t ord_at(const RatFunc& x, const Place& w) {
    if (x.is_zero()) throw MathError("valuation of zero");
    if (w.is_infinity()) return x.den().degree() - x.num().degree();
    return multiplicity(x.num(), w.poly()) - multiplicity(x.den(), w.poly());
}

Divisor divisor(const RatFunc& x) {
    if (x.is_zero()) throw MathError("divisor of zero");
    Divisor d;
    for (auto& [q, m] : factor_poly(x.num()).factors) d[Place::finite(q)] += m;
    if (x.den().degree() > 0)
        for (auto& [q, m] : factor_poly(x.den()).factors) d[Place::finite(q)] -= m;
    std::int64_t inf = x.den().degree() - x.num().degree();
    if (inf != 0) d[Place::infinity(x.p())] = inf;
    return d;
}

std::int64_t divisor_degree(const Divisor& d) {
    std::int64_t s = 0;
    for (auto& [w, k] : d) s += w.degree() * k;
    return s;
}

MonicFactors monic_factors(const RatFunc& x) {
    if (x.is_zero()) throw MathError("monic factors of zero");
    MonicFactors out;
    out.constant = x.num().lead();
    for (auto& [q, m] : factor_poly(x.num()).factors) out.orders[Place::finite(q)] += m;
    if (x.den().degree() > 0)
        for (auto& [q, m] : factor_poly(x.den()).factors) out.orders[Place::finite(q)] -= m;
    return out;
}

RatFunc derivative(const RatFunc& x) {
    if (x.is_zero()) return x;
    const Poly& n = x.num();
    const Poly& d = x.den();
    return RatFunc(n.derivative() * d - n * d.derivative(), d * d);
}

std::optional<RatFunc> pth_root(const RatFunc& x) {
    if (x.is_zero()) throw MathError("p-th root of zero");
    const std::uint32_t p = x.p();
    auto root = [p](const Poly& f) -> std::optional<Poly> {
        std::vector<Residue> r;
        const auto& c = f.coeffs();
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (i % p == 0)
                r.push_back(c[i]);
            else if (c[i] != 0)
                return std::nullopt;
        }
        return Poly(p, std::move(r));
    };
    auto n = root(x.num());
    auto d = root(x.den());
    if (!n || !d) return std::nullopt;
    return RatFunc(*n, *d);
}

RatFunc frobenius_power(const RatFunc& x, const BigInt& q, const BigInt& e, std::uint64_t degree_cap) {
    const std::uint32_t p = x.p();
    if (q < 1 || e < 0) throw MathError("frobenius_power needs q >= 1 and e >= 0");
    BigInt k = q;
    while (k > 1) {
        if (k % p != 0) throw MathError("frobenius_power: q is not a power of p");
        k /= p;
    }
    if (x.is_constant() || q == 1 || e == 0) return x;
    const int deg = std::max(x.num().degree(), x.den().degree());
    if (e > 64) throw ResourceError("frobenius_power exceeds the degree cap");
    BigInt power = big_pow(q, e.convert_to<std::uint64_t>());
    if (power * deg > degree_cap) throw ResourceError("frobenius_power exceeds the degree cap");
    std::uint64_t s = power.convert_to<std::uint64_t>();
    return RatFunc(x.num().stretch(s), x.den().stretch(s));
}

std::vector<RatFunc> frobenius_split(const RatFunc& x) {
    const std::uint32_t p = x.p();
    std::vector<RatFunc> out(p, RatFunc(p));
    if (x.is_zero()) return out;
    // x = num * den^(p-1) / den(t^p), and den(t^p) = den(t)^p.
    Poly full = x.num() * x.den().pow(p - 1);
    std::vector<std::vector<Residue>> parts(p);
    const auto& c = full.coeffs();
    for (std::size_t i = 0; i < c.size(); ++i) {
        auto& v = parts[i % p];
        std::size_t j = i / p;
        if (v.size() <= j) v.resize(j + 1, 0);
        v[j] = c[i];
    }
    for (std::uint32_t i = 0; i < p; ++i) out[i] = RatFunc(Poly(p, parts[i]), x.den());
    return out;
}

}  // namespace sunit
