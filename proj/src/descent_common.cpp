#include "descent_internal.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace sunit {

namespace detail {

RatVec to_rat(const IntVec& v) { return RatVec(v.begin(), v.end()); }

RatMatrix to_rat(const ExpMatrix& m) {
    RatMatrix out;
    for (const auto& row : m) out.push_back(to_rat(row));
    return out;
}

ExpMatrix exponents_of(const ExpPoint& x) {
    ExpMatrix out;
    for (const auto& c : x.coords) out.push_back(c.exponents);
    return out;
}

ExpMatrix zero_exponents(std::size_t n, std::size_t f) { return ExpMatrix(n, IntVec(f, 0)); }

bool is_integral(const RatMatrix& m) {
    for (const auto& row : m)
        for (const auto& x : row)
            if (denominator(x) != 1) return false;
    return true;
}

ExpMatrix to_int(const RatMatrix& m) {
    ExpMatrix out;
    for (const auto& row : m) {
        IntVec r;
        for (const auto& x : row) {
            if (denominator(x) != 1) throw MathError("exponent is not integral");
            r.push_back(numerator(x));
        }
        out.push_back(std::move(r));
    }
    return out;
}

RatMatrix add(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] += b[i][j];
    return out;
}

RatMatrix sub(const RatMatrix& a, const RatMatrix& b) {
    RatMatrix out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] -= b[i][j];
    return out;
}

RatMatrix scale(const RatMatrix& a, const Rational& c) {
    RatMatrix out = a;
    for (auto& row : out)
        for (auto& x : row) x *= c;
    return out;
}

ExpMatrix add(const ExpMatrix& a, const ExpMatrix& b) {
    ExpMatrix out = a;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] += b[i][j];
    return out;
}

ExpMatrix scale(const ExpMatrix& a, const BigInt& c) {
    ExpMatrix out = a;
    for (auto& row : out)
        for (auto& x : row) x *= c;
    return out;
}

BigInt geometric(const BigInt& q, const BigInt& k) {
    if (k < 0) throw MathError("negative Frobenius index");
    return (big_pow(q, k.convert_to<std::uint64_t>()) - 1) / (q - 1);
}

RatMatrix fixed_point(const Bracket& b) { return scale(to_rat(b.phi), Rational(-1) / Rational(b.q - 1)); }

ExpMatrix apply_brackets(const std::vector<Bracket>& brackets, const ExpMatrix& tail, const std::vector<BigInt>& k) {
    if (k.size() != brackets.size()) throw MathError("wrong number of Frobenius indices");
    ExpMatrix z = tail;
    for (std::size_t i = brackets.size(); i-- > 0;) {
        const auto& b = brackets[i];
        z = add(scale(b.phi, geometric(b.q, k[i])), scale(z, big_pow(b.q, k[i].convert_to<std::uint64_t>())));
    }
    return z;
}

Reindexed reindex(const std::vector<Bracket>& brackets, const ExpPoint& tail, const std::vector<IndexSpec>& specs,
                  const BigInt& fallback_q) {
    if (specs.size() != brackets.size()) throw MathError("wrong number of index specifications");
    const RatMatrix zero = to_rat(zero_exponents(tail.coords.size(), tail.coords.empty() ? 0 : tail.coords[0].exponents.size()));
    RatMatrix alpha = zero;
    BigInt mu = 1;
    std::optional<BigInt> q_new;
    std::vector<RatMatrix> fixed_points;
    for (std::size_t i = 0; i < brackets.size(); ++i) {
        const auto& b = brackets[i];
        const RatMatrix sigma = fixed_point(b);
        auto compose = [&](const BigInt& k) {
            const BigInt qk = big_pow(b.q, k.convert_to<std::uint64_t>());
            alpha = add(alpha, scale(sigma, Rational(mu * (1 - qk))));
            mu *= qk;
        };
        if (specs[i].period == 0) {
            compose(specs[i].offset);
            continue;
        }
        const BigInt qi = big_pow(b.q, specs[i].period.convert_to<std::uint64_t>());
        if (q_new && *q_new != qi) throw MathError("progressions do not share a common Frobenius power");
        q_new = qi;
        fixed_points.push_back(add(alpha, scale(sigma, Rational(mu))));
        compose(specs[i].offset);
    }
    Reindexed out;
    out.q = q_new.value_or(fallback_q);
    for (const auto& s : fixed_points) out.brackets.push_back(Bracket{to_int(scale(s, Rational(1 - out.q))), out.q});
    const RatMatrix t = add(alpha, scale(to_rat(exponents_of(tail)), Rational(mu)));
    out.tail = tail;
    const ExpMatrix ti = to_int(t);
    for (std::size_t j = 0; j < ti.size(); ++j) out.tail.coords[j].exponents = ti[j];
    return out;
}

std::vector<std::vector<Residue>> constant_solutions(const Matrix& forms, const Vec& monomials, std::uint32_t p,
                                                     std::uint64_t cap) {
    const std::size_t n = monomials.size() - 1;
    // Rows over F_p in the unknowns c_1..c_n followed by the constant column.
    std::vector<std::vector<Residue>> rows;
    for (const auto& form : forms) {
        Poly den = Poly::constant(p, 1);
        for (std::size_t j = 0; j <= n; ++j) {
            RatFunc h = form[j] * monomials[j];
            den = den * (h.den() / poly_gcd(den, h.den()));
        }
        std::vector<Poly> nums;
        std::size_t width = 0;
        for (std::size_t j = 0; j <= n; ++j) {
            RatFunc h = form[j] * monomials[j] * RatFunc(den);
            if (h.den().degree() != 0) throw MathError("common denominator failed");
            Poly num = h.num().scaled(fp_inv(h.den().lead(), p));
            width = std::max(width, num.coeffs().size());
            nums.push_back(std::move(num));
        }
        for (std::size_t d = 0; d < width; ++d) {
            std::vector<Residue> row(n + 1, 0);
            for (std::size_t j = 1; j <= n; ++j) row[j - 1] = nums[j].coeff(d);
            row[n] = fp_neg(nums[0].coeff(d), p);
            rows.push_back(std::move(row));
        }
    }
    // Gaussian elimination mod p.
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        std::size_t piv = r;
        while (piv < rows.size() && rows[piv][c] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[r]);
        Residue inv = fp_inv(rows[r][c], p);
        for (auto& x : rows[r]) x = fp_mul(x, inv, p);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            Residue f = rows[i][c];
            for (std::size_t j = 0; j <= n; ++j) rows[i][j] = fp_sub(rows[i][j], fp_mul(f, rows[r][j], p), p);
        }
        pivots.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows.size(); ++i)
        if (rows[i][n] != 0) return {};
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < n; ++c)
        if (std::find(pivots.begin(), pivots.end(), c) == pivots.end()) free.push_back(c);
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < free.size(); ++i) {
        count *= p;
        if (count > cap) throw ResourceError("too many constant solutions to enumerate");
    }
    std::vector<std::vector<Residue>> out;
    std::vector<Residue> assign(free.size(), 0);
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        std::uint64_t v = idx;
        for (auto& a : assign) {
            a = static_cast<Residue>(v % p);
            v /= p;
        }
        std::vector<Residue> c(n, 0);
        for (std::size_t i = 0; i < free.size(); ++i) c[free[i]] = assign[i];
        for (std::size_t k = 0; k < pivots.size(); ++k) {
            Residue val = rows[k][n];
            for (std::size_t i = 0; i < free.size(); ++i)
                val = fp_sub(val, fp_mul(rows[k][free[i]], assign[i], p), p);
            c[pivots[k]] = val;
        }
        if (std::all_of(c.begin(), c.end(), [](Residue x) { return x != 0; })) out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<TestVector> test_vectors(std::size_t n, const std::vector<std::vector<std::size_t>>& blocks) {
    std::vector<std::optional<std::size_t>> rep(n);
    std::vector<bool> in_block(n, false);
    for (const auto& b : blocks)
        for (auto j : b) {
            in_block[j] = true;
            rep[j] = b.front();
        }
    std::vector<TestVector> out;
    for (std::size_t j = 0; j < n; ++j) {
        if (!in_block[j]) out.push_back({j, std::nullopt});
        else if (*rep[j] != j) out.push_back({j, rep[j]});
    }
    return out;
}

RatMatrix apply_tests(const std::vector<TestVector>& tests, const RatMatrix& m) {
    RatMatrix out;
    for (const auto& t : tests) {
        RatVec row = m[t.coord];
        if (t.ref)
            for (std::size_t w = 0; w < row.size(); ++w) row[w] -= m[*t.ref][w];
        out.push_back(std::move(row));
    }
    return out;
}

ExpMatrix apply_tests(const std::vector<TestVector>& tests, const ExpMatrix& m) {
    ExpMatrix out;
    for (const auto& t : tests) {
        IntVec row = m[t.coord];
        if (t.ref)
            for (std::size_t w = 0; w < row.size(); ++w) row[w] -= m[*t.ref][w];
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<Residue> test_constants(const std::vector<TestVector>& tests, const ExpPoint& x, std::uint32_t p) {
    std::vector<Residue> out;
    for (const auto& t : tests) {
        Residue c = x.coords[t.coord].constant;
        if (t.ref) c = fp_mul(c, fp_inv(x.coords[*t.ref].constant, p), p);
        out.push_back(c);
    }
    return out;
}

BlockNormalizer::BlockNormalizer(std::size_t n, const std::vector<std::vector<std::size_t>>& blocks) : rep(n) {
    for (const auto& b : blocks)
        for (auto j : b) rep[j] = b.front();
}

ExpMatrix BlockNormalizer::apply(ExpMatrix m) const {
    for (std::size_t j = 0; j < m.size(); ++j)
        if (rep[j] && *rep[j] != j)
            for (std::size_t w = 0; w < m[j].size(); ++w) m[j][w] -= m[*rep[j]][w];
    for (std::size_t j = 0; j < m.size(); ++j)
        if (rep[j] && *rep[j] == j) std::fill(m[j].begin(), m[j].end(), BigInt(0));
    return m;
}

ExpPoint BlockNormalizer::apply(const ExpPoint& x, std::uint32_t p) const {
    ExpPoint out = x;
    const ExpMatrix e = apply(exponents_of(x));
    for (std::size_t j = 0; j < out.coords.size(); ++j) {
        out.coords[j].exponents = e[j];
        if (!rep[j]) continue;
        if (*rep[j] == j) out.coords[j].constant = 1;
        else out.coords[j].constant = fp_mul(x.coords[j].constant, fp_inv(x.coords[*rep[j]].constant, p), p);
    }
    return out;
}

bool coset_meets_group(const DescentContext& ctx, const ExpPoint& x, const std::vector<std::vector<std::size_t>>& blocks) {
    const auto tests = test_vectors(x.coords.size(), blocks);
    const ExpMatrix e = apply_tests(tests, exponents_of(x));
    const auto c = test_constants(tests, x, ctx.p());
    for (std::size_t i = 0; i < tests.size(); ++i)
        if (!ctx.in_group(MonicCoords{c[i], e[i]})) return false;
    return true;
}

bool family_key_less(const FrobeniusFamily& a, const FrobeniusFamily& b) {
    if (a.h() != b.h()) return a.h() < b.h();
    if (a.q != b.q) return a.q < b.q;
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.tail != b.tail) return a.tail < b.tail;
    if (a.subgroup != b.subgroup) return a.subgroup < b.subgroup;
    if (a.steps != b.steps) return a.steps < b.steps;
    if (a.points.size() != b.points.size()) return a.points.size() < b.points.size();
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        if (a.points[i].exponents != b.points[i].exponents) return a.points[i].exponents < b.points[i].exponents;
        if (a.points[i].constants != b.points[i].constants) return a.points[i].constants < b.points[i].constants;
    }
    return a.congruence < b.congruence;
}

}  // namespace detail

using namespace detail;

// --- Families -------------------------------------------------------------------------

std::optional<ExpMatrix> FrobeniusFamily::psi(std::size_t i) const {
    RatMatrix s = sigma(i);
    if (!is_integral(s)) return std::nullopt;
    ExpMatrix out = to_int(s);
    for (auto& row : out)
        for (auto& x : row) x = -x;
    return out;
}

RatMatrix FrobeniusFamily::sigma(std::size_t i) const {
    if (kind != FamilyKind::Bracket) throw MathError("fixed points belong to bracket families");
    return fixed_point(Bracket{steps.at(i), q});
}

bool family_less(const FrobeniusFamily& a, const FrobeniusFamily& b) { return family_key_less(a, b); }

bool family_equal(const FrobeniusFamily& a, const FrobeniusFamily& b) {
    return !family_key_less(a, b) && !family_key_less(b, a);
}

const BigInt& BoundCertificate::ceiling(const std::string& stage) const {
    for (const auto& s : stages)
        if (s.stage == stage) return s.ceiling;
    throw MathError("unknown certificate stage " + stage);
}

bool PointCertificate::passed() const {
    return on_variety && std::all_of(in_group.begin(), in_group.end(), [](bool b) { return b; });
}

// --- Context --------------------------------------------------------------------------

DescentContext::DescentContext(const LinearVariety& v, const GroupPresentation& g)
    : v_(v), g_(g), rad_(radical(g)) {
    if (v.p() != g.p()) throw MathError("variety and group live over different fields");
    const std::size_t f = g_.finite_support.size();
    const std::uint32_t p = g_.p();
    basis_ = rad_.radical.rank() ? reduced_exponents(rad_.radical) : IntMatrix{};
    basis_lattice_ = Lattice(basis_, f);
    const std::size_t r = basis_.size();
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < r; ++i) {
        count *= p;
        if (count > 1000000) throw ResourceError("too many residue classes modulo p-th powers");
    }
    for (std::uint64_t idx = 0; idx < count; ++idx) {
        IntVec e(f, 0);
        std::uint64_t x = idx;
        for (std::size_t i = 0; i < r; ++i) {
            const BigInt digit = x % p;
            x /= p;
            if (digit == 0) continue;
            for (std::size_t w = 0; w < f; ++w) e[w] += digit * basis_[i][w];
        }
        reps_.push_back(f ? realize(g_.finite_support, MonicCoords{1, e}) : RatFunc::constant(p, 1));
        rep_exps_.push_back(std::move(e));
    }
}

std::optional<std::size_t> DescentContext::class_of(const IntVec& v) const {
    if (basis_.empty()) {
        for (const auto& x : v)
            if (x != 0) return std::nullopt;
        return 0;
    }
    auto c = basis_lattice_.coords(v);
    if (!c) return std::nullopt;
    std::size_t idx = 0, mul = 1;
    for (const auto& x : *c) {
        idx += mod_small(x, p()) * mul;
        mul *= p();
    }
    return idx;
}

bool DescentContext::in_radical(const MonicCoords& m) const { return class_of(m.exponents).has_value(); }

bool DescentContext::in_group(const MonicCoords& m) const { return member_coords(m, g_).has_value(); }

// --- Points ---------------------------------------------------------------------------

Rational rational_height(const std::vector<Place>& support, const RatMatrix& exponents) {
    Rational h = 0;
    Rational inf = 0;
    for (std::size_t w = 0; w < support.size(); ++w) {
        Rational worst = 0;
        for (const auto& row : exponents) worst = std::max(worst, Rational(-row[w]));
        h += worst * support[w].degree();
    }
    for (const auto& row : exponents) {
        Rational s = 0;
        for (std::size_t w = 0; w < support.size(); ++w) s += row[w] * support[w].degree();
        inf = std::max(inf, s);
    }
    return h + inf;
}

BigInt point_height(const std::vector<Place>& support, const ExpPoint& point) {
    Rational h = rational_height(support, to_rat(exponents_of(point)));
    return numerator(h);
}

Vec realize_point(const std::vector<Place>& support, const ExpPoint& point) {
    Vec out;
    for (const auto& c : point.coords) out.push_back(realize(support, c));
    return out;
}

std::optional<ExpPoint> point_coords(const Vec& affine_point, const std::vector<Place>& support) {
    ExpPoint out;
    for (const auto& x : affine_point) {
        if (x.is_zero()) return std::nullopt;
        auto m = support_coords(x, support);
        if (!m) return std::nullopt;
        out.coords.push_back(std::move(*m));
    }
    return out;
}

namespace {

std::vector<std::size_t> descending(std::size_t n) {
    std::vector<std::size_t> order(n + 1);
    std::iota(order.rbegin(), order.rend(), 0);
    return order;
}

bool has_unit_row(const Matrix& rows) {
    for (const auto& row : rows) {
        std::size_t nz = 0;
        for (const auto& x : row) nz += !x.is_zero();
        if (nz == 1) return true;
    }
    return false;
}

constexpr std::int64_t kRealizeDegree = 4096;

}  // namespace

namespace detail {

std::optional<Matrix> split_rows(const Matrix& forms, const std::vector<RatFunc>& g) {
    if (forms.empty()) return Matrix{};
    const std::size_t cols = forms[0].size();
    const std::uint32_t p = forms[0][0].p();
    Matrix rows(p, Vec(cols, RatFunc(p)));
    Matrix stacked;
    for (const auto& form : forms) {
        for (auto& r : rows)
            for (auto& x : r) x = RatFunc(p);
        for (std::size_t j = 0; j < cols; ++j) {
            if (form[j].is_zero()) continue;
            auto comps = frobenius_split(form[j] * g[j]);
            for (std::uint32_t i = 0; i < p; ++i) rows[i][j] = std::move(comps[i]);
        }
        for (const auto& r : rows)
            if (std::any_of(r.begin(), r.end(), [](const RatFunc& x) { return !x.is_zero(); })) stacked.push_back(r);
    }
    Echelon e = rref(stacked, descending(cols - 1));
    if (has_unit_row(e.rows)) return std::nullopt;
    return e.rows;
}

bool canonical_feasible(const Matrix& rows) { return !has_unit_row(rows); }

}  // namespace detail

std::optional<LinearVariety> split_variety(const LinearVariety& u, const std::vector<RatFunc>& g) {
    if (g.size() != u.n() + 1) throw MathError("class tuple has the wrong size");
    auto rows = split_rows(u.forms(), g);
    if (!rows) return std::nullopt;
    return LinearVariety(u.p(), u.n(), *rows);
}

LinearVariety image_variety(const LinearVariety& split, const std::vector<RatFunc>& g) {
    const std::uint32_t p = split.p();
    Matrix forms = split.forms();
    for (auto& row : forms)
        for (auto& x : row) x = frobenius_power(x, BigInt(p), BigInt(1));
    LinearVariety frob(p, split.n(), forms);
    return apply_automorphism(DiagonalAutomorphism{g, {}}, frob);
}

bool on_variety(const Matrix& forms_in, const std::vector<Place>& support, const ExpPoint& point_in) {
    if (forms_in.empty()) return true;
    const std::size_t n = point_in.coords.size();
    if (forms_in[0].size() != n + 1) throw MathError("point has the wrong dimension");
    const std::uint32_t p = forms_in[0][0].p();
    Matrix forms = forms_in;
    ExpPoint point = point_in;
    while (true) {
        if (forms.empty()) return true;
        BigInt degree = 0;
        for (const auto& c : point.coords)
            for (std::size_t w = 0; w < support.size(); ++w) degree += abs(c.exponents[w]) * support[w].degree();
        if (degree <= kRealizeDegree) {
            Vec x{RatFunc::constant(p, 1)};
            for (const auto& c : point.coords) x.push_back(realize(support, c));
            for (const auto& f : forms)
                if (!dot(f, x).is_zero()) return false;
            return true;
        }
        // x_j = g_j * x_j'^p with digits of the exponents in g_j.
        std::vector<RatFunc> g{RatFunc::constant(p, 1)};
        ExpPoint next;
        for (const auto& c : point.coords) {
            MonicCoords digit{c.constant, IntVec(support.size())};
            MonicCoords rest{1, IntVec(support.size())};
            for (std::size_t w = 0; w < support.size(); ++w) {
                digit.exponents[w] = mod_floor(c.exponents[w], BigInt(p));
                rest.exponents[w] = (c.exponents[w] - digit.exponents[w]) / p;
            }
            g.push_back(realize(support, digit));
            next.coords.push_back(std::move(rest));
        }
        auto rows = split_rows(forms, g);
        if (!rows) return false;
        forms = std::move(*rows);
        point = std::move(next);
    }
}

PointCertificate verify_point(const LinearVariety& v, const GroupPresentation& g, const ExpPoint& point) {
    PointCertificate out;
    out.on_variety = on_variety(v.forms(), g.finite_support, point);
    for (const auto& c : point.coords) out.in_group.push_back(member_coords(c, g).has_value());
    return out;
}

PointCertificate verify_point(const LinearVariety& v, const GroupPresentation& g, const Vec& affine_point) {
    if (affine_point.size() != v.n()) throw MathError("point has the wrong dimension");
    if (auto coords = point_coords(affine_point, g.finite_support)) return verify_point(v, g, *coords);
    PointCertificate out;
    Vec x{RatFunc::constant(v.p(), 1)};
    x.insert(x.end(), affine_point.begin(), affine_point.end());
    out.on_variety = v.contains(x);
    for (const auto& c : affine_point) out.in_group.push_back(!c.is_zero() && member(c, g).has_value());
    return out;
}

std::string to_string(const ExpPoint& point, const std::vector<Place>& support) {
    std::ostringstream os;
    os << "(";
    for (std::size_t j = 0; j < point.coords.size(); ++j) {
        if (j) os << ", ";
        const auto& c = point.coords[j];
        std::string s = std::to_string(c.constant);
        for (std::size_t w = 0; w < support.size(); ++w) {
            if (c.exponents[w] == 0) continue;
            s += "*" + support[w].to_string();
            if (c.exponents[w] != 1) s += "^" + to_decimal(c.exponents[w]);
        }
        os << s;
    }
    os << ")";
    return os.str();
}

}  // namespace sunit
