#include "sunit/mulgroup.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <numeric>
#include <set>

namespace sunit {

using Rational = boost::multiprecision::cpp_rational;

Residue primitive_root(std::uint32_t p) {
    if (p == 2) return 1;
    const std::uint64_t n = p - 1;
    std::vector<std::uint64_t> primes;
    std::uint64_t m = n;
    for (std::uint64_t d = 2; d * d <= m; ++d) {
        if (m % d) continue;
        primes.push_back(d);
        while (m % d == 0) m /= d;
    }
    if (m > 1) primes.push_back(m);
    for (Residue g = 2; g < p; ++g) {
        bool ok = true;
        for (auto q : primes)
            if (fp_pow(g, n / q, p) == 1) {
                ok = false;
                break;
            }
        if (ok) return g;
    }
    throw MathError("no primitive root found");
}

std::uint64_t discrete_log(Residue a, std::uint32_t p) {
    a %= p;
    if (a == 0) throw MathError("discrete log of zero");
    const Residue g = primitive_root(p);
    Residue x = 1;
    for (std::uint64_t k = 0; k < p - 1; ++k) {
        if (x == a) return k;
        x = fp_mul(x, g, p);
    }
    throw MathError("discrete log failed");
}

std::uint64_t multiplicative_order(Residue a, std::uint32_t p) {
    const std::uint64_t k = discrete_log(a, p);
    return (p - 1) / std::gcd<std::uint64_t>(k, p - 1);
}

bool in_constant_subgroup(Residue c, const GroupPresentation& g) {
    const std::uint32_t p = g.p();
    if (c % p == 0) return false;
    return fp_pow(c, g.constant_order, p) == 1;
}

namespace {

Residue constant_power(Residue c, const BigInt& e, std::uint32_t p) {
    const std::uint64_t k = mod_small(e, p - 1);
    return fp_pow(c, k, p);
}

// Smallest residue in the coset c * <gamma>.
Residue canonical_constant(Residue c, Residue gamma, std::uint64_t order, std::uint32_t p) {
    Residue best = c, x = c;
    for (std::uint64_t j = 1; j < order; ++j) {
        x = fp_mul(x, gamma, p);
        best = std::min(best, x);
    }
    return best;
}

IntVec full_divisor(const std::vector<Place>& fs, const IntVec& v) {
    IntVec f = v;
    BigInt inf = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) inf -= BigInt(fs[i].degree()) * v[i];
    f.push_back(inf);
    return f;
}

}  // namespace

BigInt monic_height(const std::vector<Place>& fs, const IntVec& v) {
    BigInt h = 0, total = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const BigInt d = fs[i].degree();
        if (v[i] < 0) h -= d * v[i];
        total += d * v[i];
    }
    if (total > 0) h += total;
    return h;
}

IntVec lattice_row(const GroupPresentation& g, const IntVec& v) {
    IntVec row;
    std::size_t fi = 0;
    for (const auto& w : g.support) {
        if (w.is_infinity()) {
            BigInt s = 0;
            for (std::size_t i = 0; i < g.finite_support.size(); ++i)
                s += BigInt(g.finite_support[i].degree()) * v[i];
            row.push_back(s);
        } else {
            row.push_back(-BigInt(w.degree()) * v[fi++]);
        }
    }
    return row;
}

std::optional<MonicCoords> support_coords(const RatFunc& x, const std::vector<Place>& fs) {
    if (x.is_zero()) throw MathError("monic coordinates of zero");
    MonicFactors mf = monic_factors(x);
    MonicCoords out;
    out.constant = mf.constant;
    out.exponents.assign(fs.size(), 0);
    for (auto& [w, k] : mf.orders) {
        auto it = std::lower_bound(fs.begin(), fs.end(), w);
        if (it == fs.end() || !(*it == w)) return std::nullopt;
        out.exponents[static_cast<std::size_t>(it - fs.begin())] = k;
    }
    return out;
}

RatFunc realize(const std::vector<Place>& fs, const MonicCoords& m, std::uint64_t degree_cap) {
    if (fs.empty()) throw MathError("realize needs at least one place");
    const std::uint32_t p = fs[0].poly().p();
    BigInt total = 0;
    for (std::size_t i = 0; i < fs.size(); ++i) total += BigInt(fs[i].degree()) * (m.exponents[i] < 0 ? BigInt(-m.exponents[i]) : m.exponents[i]);
    if (total > degree_cap) throw ResourceError("element degree exceeds the expansion cap");
    Poly num = Poly::constant(p, m.constant), den = Poly::constant(p, 1);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const std::int64_t k = to_i64(m.exponents[i]);
        if (k > 0) num = num * fs[i].poly().pow(static_cast<std::uint64_t>(k));
        if (k < 0) den = den * fs[i].poly().pow(static_cast<std::uint64_t>(-k));
    }
    return RatFunc(num, den);
}

GroupPresentation group_from_lattice(const FieldContext& ctx, const std::vector<Place>& fs, const IntMatrix& basis,
                                     const std::vector<Residue>& constants, std::uint64_t constant_order) {
    const std::uint32_t p = ctx.p();
    if ((p - 1) % constant_order != 0) throw MathError("constant order must divide p-1");
    GroupPresentation g;
    g.ctx = ctx;
    g.finite_support = fs;
    g.constant_order = constant_order;
    g.constant_generator = fp_pow(primitive_root(p), (p - 1) / constant_order, p);
    g.generator_exponents = basis;
    g.lattice = Lattice(basis, fs.size());
    bool has_inf = false;
    for (const auto& row : basis) {
        BigInt s = 0;
        for (std::size_t i = 0; i < fs.size(); ++i) s += BigInt(fs[i].degree()) * row[i];
        if (s != 0) has_inf = true;
    }
    if (has_inf) g.support.push_back(Place::infinity(p));
    g.support.insert(g.support.end(), fs.begin(), fs.end());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        Residue c = canonical_constant(constants[i], g.constant_generator, constant_order, p);
        g.generator_constants.push_back(c);
        g.free_generators.push_back(realize(fs, MonicCoords{c, basis[i]}));
        g.lattice_basis.push_back(lattice_row(g, basis[i]));
    }
    return g;
}

GroupPresentation build_group(const std::vector<RatFunc>& gens, const FieldContext& ctx) {
    const std::uint32_t p = ctx.p();
    std::vector<MonicFactors> facs;
    std::set<Place> places;
    for (const auto& x : gens) {
        if (x.is_zero()) throw MathError("group generator is zero");
        if (x.p() != p) throw MathError("group generator over a different field");
        facs.push_back(monic_factors(x));
        for (auto& [w, k] : facs.back().orders) places.insert(w);
    }
    std::vector<Place> fs(places.begin(), places.end());
    IntMatrix a;
    for (const auto& f : facs) {
        IntVec row(fs.size(), 0);
        for (auto& [w, k] : f.orders) row[static_cast<std::size_t>(std::lower_bound(fs.begin(), fs.end(), w) - fs.begin())] = k;
        a.push_back(std::move(row));
    }
    HermiteForm h = hermite_form(a, fs.size());
    auto combined_constant = [&](const IntVec& coeffs) {
        Residue c = 1;
        for (std::size_t k = 0; k < facs.size(); ++k) c = fp_mul(c, constant_power(facs[k].constant, coeffs[k], p), p);
        return c;
    };
    std::uint64_t g0 = p - 1;
    for (const auto& rel : h.relations) g0 = std::gcd<std::uint64_t>(g0, discrete_log(combined_constant(rel), p));
    const std::uint64_t order = (p - 1) / g0;
    std::vector<Residue> consts;
    for (const auto& tr : h.transform) consts.push_back(combined_constant(tr));
    return group_from_lattice(ctx, fs, h.basis, consts, order);
}

std::optional<GroupElement> member(const RatFunc& x, const GroupPresentation& g) {
    if (x.is_zero()) throw MathError("membership of zero");
    auto mc = support_coords(x, g.finite_support);
    if (!mc) return std::nullopt;
    return member_coords(*mc, g);
}

std::optional<GroupElement> member_coords(const MonicCoords& m, const GroupPresentation& g) {
    const MonicCoords* mc = &m;
    auto e = g.lattice.coords(mc->exponents);
    if (!e) return std::nullopt;
    const std::uint32_t p = g.p();
    Residue c = mc->constant;
    for (std::size_t i = 0; i < e->size(); ++i)
        c = fp_mul(c, fp_inv(constant_power(g.generator_constants[i], (*e)[i], p), p), p);
    if (!in_constant_subgroup(c, g)) return std::nullopt;
    return GroupElement{*e, c};
}

MonicCoords element_coords(const GroupElement& e, const GroupPresentation& g) {
    const std::uint32_t p = g.p();
    MonicCoords m;
    m.exponents = g.rank() ? row_times(e.exponents, g.generator_exponents) : IntVec(g.finite_support.size(), 0);
    m.constant = e.constant;
    for (std::size_t i = 0; i < e.exponents.size(); ++i)
        m.constant = fp_mul(m.constant, constant_power(g.generator_constants[i], e.exponents[i], p), p);
    return m;
}

RatFunc reconstruct(const GroupElement& e, const GroupPresentation& g) {
    MonicCoords m = element_coords(e, g);
    if (g.finite_support.empty()) return RatFunc::constant(g.p(), m.constant);
    return realize(g.finite_support, m);
}

BigInt regulator_sq(const GroupPresentation& g) {
    if (g.rank() == 0) return 1;
    const std::size_t r = g.rank();
    IntMatrix gram(r, IntVec(r, 0));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) gram[i][j] = int_dot(g.lattice_basis[i], g.lattice_basis[j]);
    return int_det(gram);
}

BigInt delta(std::uint64_t r) { return big_pow(BigInt(r), 3 * r); }

void enumerate_lattice_bounded(const std::vector<Place>& fs, const IntMatrix& basis, std::int64_t b,
                               const std::function<void(const IntVec&)>& visit, std::uint64_t cap) {
    if (b < 0) throw MathError("height bound must be nonnegative");
    const std::size_t r = basis.size();
    if (r == 0) {
        visit(IntVec{});
        return;
    }
    // Full divisor vectors satisfy |f|_2 <= |f|_1 <= 2 h, so a Euclidean ball of radius 2b covers the set.
    std::vector<IntVec> f;
    for (const auto& row : basis) f.push_back(full_divisor(fs, row));
    std::vector<std::vector<Rational>> mu(r, std::vector<Rational>(r, 0));
    std::vector<Rational> bstar_norm(r);
    std::vector<std::vector<Rational>> bstar(r);
    for (std::size_t i = 0; i < r; ++i) {
        std::vector<Rational> v(f[i].begin(), f[i].end());
        for (std::size_t j = 0; j < i; ++j) {
            Rational num = 0;
            for (std::size_t k = 0; k < v.size(); ++k) num += Rational(f[i][k]) * bstar[j][k];
            mu[i][j] = num / bstar_norm[j];
            for (std::size_t k = 0; k < v.size(); ++k) v[k] -= mu[i][j] * bstar[j][k];
        }
        Rational n = 0;
        for (auto& x : v) n += x * x;
        bstar[i] = std::move(v);
        bstar_norm[i] = n;
    }
    const Rational bound = Rational(4) * Rational(b) * Rational(b);
    IntVec x(r, 0);
    std::uint64_t visited = 0;
    std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t level, const Rational& budget) {
        const std::size_t i = level - 1;
        Rational c = 0;
        for (std::size_t j = i + 1; j < r; ++j) c -= mu[j][i] * Rational(x[j]);
        Rational q = budget / bstar_norm[i];
        BigInt s = boost::multiprecision::sqrt(BigInt(boost::multiprecision::numerator(q) / boost::multiprecision::denominator(q))) + 1;
        BigInt lo = floor_div(boost::multiprecision::numerator(c), boost::multiprecision::denominator(c)) - s;
        BigInt hi = floor_div(boost::multiprecision::numerator(c), boost::multiprecision::denominator(c)) + s + 1;
        for (BigInt xi = lo; xi <= hi; ++xi) {
            Rational d = Rational(xi) - c;
            Rational used = d * d * bstar_norm[i];
            if (used > budget) continue;
            x[i] = xi;
            if (i == 0) {
                IntVec v = row_times(x, basis);
                if (monic_height(fs, v) <= b) {
                    if (++visited > cap) throw ResourceError("bounded enumeration exceeds the cap");
                    visit(x);
                }
            } else {
                rec(i, budget - used);
            }
        }
        x[i] = 0;
    };
    rec(r, bound);
}

void enumerate_bounded(const GroupPresentation& g, std::int64_t b, const std::function<void(const GroupElement&)>& visit,
                       std::uint64_t cap) {
    const std::uint32_t p = g.p();
    std::uint64_t count = 0;
    enumerate_lattice_bounded(
        g.finite_support, g.generator_exponents, b,
        [&](const IntVec& e) {
            Residue c = 1;
            for (std::uint64_t j = 0; j < g.constant_order; ++j) {
                if (++count > cap) throw ResourceError("bounded enumeration exceeds the cap");
                visit(GroupElement{e, c});
                c = fp_mul(c, g.constant_generator, p);
            }
        },
        cap);
}

std::vector<GroupElement> enumerate_bounded(const GroupPresentation& g, std::int64_t b, std::uint64_t cap) {
    std::vector<GroupElement> out;
    enumerate_bounded(g, b, [&](const GroupElement& e) { out.push_back(e); }, cap);
    std::sort(out.begin(), out.end());
    return out;
}

namespace {

// Whether the rows extend to a basis of Z^r: the gcd of maximal minors is 1.
bool is_primitive(const IntMatrix& rows, std::size_t r) {
    const std::size_t k = rows.size();
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    BigInt g = 0;
    while (true) {
        IntMatrix sub(k, IntVec(k));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) sub[i][j] = rows[i][idx[j]];
        g = big_gcd(g, int_det(sub));
        if (g == 1) return true;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == r - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return g == 1;
}

struct Candidate {
    BigInt height;
    IntVec exponents;  // monic, sign-normalized
    IntVec coeffs;
    std::size_t support_size() const {
        return static_cast<std::size_t>(std::count_if(exponents.begin(), exponents.end(), [](const BigInt& z) { return z != 0; }));
    }
    bool operator<(const Candidate& o) const {
        if (height != o.height) return height < o.height;
        if (support_size() != o.support_size()) return support_size() < o.support_size();
        return exponents < o.exponents;
    }
};

IntMatrix reduced_coefficients(const GroupPresentation& g) {
    const std::size_t r = g.rank();
    if (r == 0) throw MathError("reduced basis of a rank 0 group");
    BigInt max_h = 0;
    for (const auto& row : g.generator_exponents) max_h = std::max(max_h, monic_height(g.finite_support, row));
    for (std::int64_t bound = 1;; bound *= 2) {
        std::vector<Candidate> cands;
        enumerate_lattice_bounded(g.finite_support, g.generator_exponents, bound, [&](const IntVec& e) {
            IntVec v = row_times(e, g.generator_exponents);
            auto first = std::find_if(v.begin(), v.end(), [](const BigInt& z) { return z != 0; });
            if (first == v.end() || *first < 0) return;
            cands.push_back(Candidate{monic_height(g.finite_support, v), v, e});
        });
        std::sort(cands.begin(), cands.end());
        IntMatrix chosen;
        for (const auto& c : cands) {
            chosen.push_back(c.coeffs);
            if (!is_primitive(chosen, r)) chosen.pop_back();
            if (chosen.size() == r) return chosen;
        }
        if (BigInt(bound) > 64 * max_h + 64) throw ResourceError("reduced basis search did not terminate");
    }
}

}  // namespace

IntMatrix reduced_exponents(const GroupPresentation& g) {
    return mat_mul(reduced_coefficients(g), g.generator_exponents);
}

std::vector<GroupElement> reduced_basis(const GroupPresentation& g) {
    IntMatrix coeffs = reduced_coefficients(g);
    const std::size_t r = g.rank();
    BigInt prod = 1;
    std::vector<GroupElement> out;
    for (const auto& c : coeffs) {
        prod *= monic_height(g.finite_support, row_times(c, g.generator_exponents));
        out.push_back(GroupElement{c, 1});
    }
    if (BigInt(r) * prod > delta(r) * regulator_sq(g))
        throw BoundViolation("reduced basis violates the height product bound");
    return out;
}

ModDecomposition decompose_mod_l(const GroupElement& e, const BigInt& l, const GroupPresentation& g) {
    if (l < 1) throw MathError("decompose_mod_l needs l >= 1");
    const std::size_t r = g.rank();
    ModDecomposition out;
    if (r == 0) {
        out.g0_element = GroupElement{{}, e.constant};
        out.gp = GroupElement{{}, 1};
        out.g0 = reconstruct(out.g0_element, g);
        return out;
    }
    IntMatrix coeffs = reduced_coefficients(g);
    Lattice red(coeffs, r);
    IntVec y = *red.coords(e.exponents);
    IntVec rho(r), quo(r);
    for (std::size_t i = 0; i < r; ++i) {
        rho[i] = mod_floor(y[i], l);
        quo[i] = (y[i] - rho[i]) / l;
    }
    out.g0_element = GroupElement{row_times(rho, coeffs), e.constant};
    out.gp = GroupElement{row_times(quo, coeffs), 1};
    out.g0 = reconstruct(out.g0_element, g);
    if (monic_height(g.finite_support, element_coords(out.g0_element, g).exponents) > l * delta(r) * regulator_sq(g))
        throw BoundViolation("remainder violates the height bound");
    return out;
}

RadicalData radical(const GroupPresentation& g) {
    RadicalData out;
    const std::uint32_t p = g.p();
    const std::size_t f = g.finite_support.size();
    out.aligned_basis = g.lattice.saturation_basis();
    out.elementary_divisors = g.lattice.invariant_factors();
    IntMatrix hnf = g.rank() ? row_lattice_basis(out.aligned_basis, f) : IntMatrix{};
    out.radical = group_from_lattice(g.ctx, g.finite_support, hnf, std::vector<Residue>(hnf.size(), 1), p - 1);
    out.constant_divisor = BigInt((p - 1) / g.constant_order);
    out.index = out.constant_divisor;
    for (const auto& d : out.elementary_divisors) out.index *= d;
    return out;
}

BigInt frobenius_depth_bound_sq(const RatFunc& x, const GroupPresentation& g) {
    auto mc = support_coords(x, g.finite_support);
    if (mc) {
        RadicalData rd = radical(g);
        if (rd.radical.lattice.contains(mc->exponents))
            throw MathError("element lies in the radical extended by constants");
    }
    BigInt h = height(x);
    return 4 * h * h * regulator_sq(g);
}

}  // namespace sunit
