#include "descent_internal.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace sunit {

using namespace detail;

namespace {

RatFunc one(std::uint32_t p) { return RatFunc::constant(p, 1); }

bool is_hyperplane_with_full_support(const LinearVariety& v) {
    if (v.forms().size() != 1) return false;
    for (const auto& x : v.forms()[0])
        if (x.is_zero()) return false;
    return true;
}

const GroupPresentation& family_group(const DescentContext& ctx, const FrobeniusFamily& fam) {
    return fam.mode == SolveMode::Group ? ctx.group() : ctx.radical_group();
}

BigInt ceil_height(const std::vector<Place>& support, const RatMatrix& m) {
    Rational h = rational_height(support, m);
    BigInt q = numerator(h) / denominator(h);
    if (Rational(q) < h) ++q;
    return q;
}

}  // namespace

// --- Proposition step ------------------------------------------------------------------

PropositionCase proposition_step(const LinearVariety& v, const DescentContext& ctx, const std::vector<std::size_t>& classes) {
    const std::size_t n = v.n();
    const std::uint32_t p = v.p();
    if (v.forms().size() != 1) throw MathError("proposition step needs a hyperplane");
    const Vec& form = v.forms()[0];
    for (std::size_t j = 1; j <= n; ++j)
        if (form[j].is_zero()) throw MathError("proposition step needs a transversal hyperplane");
    if (form[0].is_zero()) throw MathError("proposition step needs an affine equation with nonzero right side");
    if (coset_form(v)) throw MathError("proposition step needs a variety outside proper cosets");
    if (n > p) throw MathError("proposition step needs n <= p for ordinary Wronskians");
    if (classes.size() != n) throw MathError("class tuple has the wrong size");

    // sum_j w_j y_j^p = 1 with x_j = g_j y_j^p.
    const RatFunc b = -form[0];
    std::vector<RatFunc> g, w;
    std::vector<LogProfile> prof;
    for (std::size_t j = 0; j < n; ++j) {
        g.push_back(ctx.rep(classes[j]));
        w.push_back(form[j + 1] * g.back() / b);
        prof.push_back(profile_from_log_derivative(derivative(w.back()) / w.back(), static_cast<int>(n) - 1));
    }
    auto profiles_of = [&](const std::vector<std::size_t>& idx) {
        std::vector<LogProfile> out;
        for (auto j : idx) {
            LogProfile lp = prof[j];
            lp.higher.resize(idx.size());
            out.push_back(std::move(lp));
        }
        return out;
    };
    std::vector<std::size_t> basis;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> trial = basis;
        trial.push_back(j);
        Matrix a(trial.size(), Vec());
        for (std::size_t i = 0; i < trial.size(); ++i)
            for (auto k : trial) a[i].push_back(prof[k].higher[i]);
        if (!determinant(a).is_zero()) basis = std::move(trial);
    }

    PropositionCase out;
    out.s = basis.size();
    const auto bprof = profiles_of(basis);
    const Vec z = cramer_solve(bprof);
    std::vector<RatFunc> mu;
    RatFunc total(p);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        mu.push_back(z[i] / w[basis[i]]);
        total += mu.back() * w[basis[i]];
        if (!derivative(mu.back()).is_zero()) {
            out.empty = true;
            return out;
        }
    }
    if (!total.is_one()) {
        out.empty = true;
        return out;
    }
    // lambda[k][i]: w_k = sum_i lambda[k][i] w_{basis_i}.
    std::vector<std::vector<RatFunc>> lambda(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (std::find(basis.begin(), basis.end(), k) != basis.end()) continue;
        Vec target;
        for (std::size_t i = 0; i < basis.size(); ++i) target.push_back(prof[k].higher[i] * w[k]);
        const Vec y = cramer_solve(bprof, target);
        for (std::size_t i = 0; i < basis.size(); ++i) lambda[k].push_back(y[i] / w[basis[i]]);
    }

    if (out.s == 1) {
        DiagonalAutomorphism psi{{one(p)}, {}};
        for (auto& x : g) psi.scalars.push_back(x);
        Matrix rows(1, Vec());
        for (std::size_t j = 0; j < n; ++j) {
            auto r = pth_root(w[j]);
            if (!r) throw MathError("coefficient of the reduced equation is not a p-th power");
            rows[0].push_back(*r);
        }
        rows[0].push_back(one(p));
        out.psi = std::move(psi);
        out.reduced = affine_variety(p, n, rows);
        return out;
    }

    Matrix forms;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        Vec row(n + 1, RatFunc(p));
        row[0] = -mu[i];
        row[basis[i] + 1] = g[basis[i]].inverse();
        for (std::size_t k = 0; k < n; ++k)
            if (!lambda[k].empty()) row[k + 1] = lambda[k][i] / g[k];
        forms.push_back(std::move(row));
    }
    out.subvariety = LinearVariety(p, n, forms);
    if (out.s == n) {
        Vec x;
        for (std::size_t j = 0; j < n; ++j) x.push_back(g[j] * mu[j]);
        bool keep = true;
        for (const auto& c : x) {
            auto m = c.is_zero() ? std::nullopt : support_coords(c, ctx.support());
            keep = keep && m && ctx.in_radical(*m);
        }
        Vec proj{one(p)};
        proj.insert(proj.end(), x.begin(), x.end());
        keep = keep && v.contains(proj);
        if (!keep) {
            out.empty = true;
            out.subvariety.reset();
            return out;
        }
        out.point = std::move(x);
    }
    return out;
}

// --- Members ---------------------------------------------------------------------------

ExpPoint family_member(const FrobeniusFamily& family, const std::vector<BigInt>& k) {
    if (family.kind == FamilyKind::Bracket) {
        std::vector<Bracket> brackets;
        for (const auto& s : family.steps) brackets.push_back(Bracket{s, family.q});
        ExpPoint out = family.tail;
        const ExpMatrix e = apply_brackets(brackets, exponents_of(family.tail), k);
        for (std::size_t j = 0; j < e.size(); ++j) out.coords[j].exponents = e[j];
        return out;
    }
    if (k.size() != family.h()) throw MathError("wrong number of exponents for a symmetric family");
    RatMatrix e = family.points[0].exponents;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] < 0) throw MathError("negative Frobenius index");
        e = add(e, scale(family.points[i + 1].exponents, Rational(big_pow(family.q, k[i].convert_to<std::uint64_t>()))));
    }
    ExpPoint out;
    const ExpMatrix ei = to_int(e);
    // Only the last point carries constants.
    for (std::size_t j = 0; j < ei.size(); ++j) out.coords.push_back(MonicCoords{family.points.back().constants[j], ei[j]});
    return out;
}

// --- Symmetric form --------------------------------------------------------------------

FrobeniusFamily symmetrize(const DescentContext& ctx, const FrobeniusFamily& family) {
    if (family.kind != FamilyKind::Bracket) throw MathError("symmetrize needs a bracket family");
    const std::size_t h = family.h();
    const std::size_t n = family.tail.coords.size();
    const RatMatrix tau = to_rat(exponents_of(family.tail));
    std::vector<RatMatrix> sigma;
    for (std::size_t i = 0; i < h; ++i) sigma.push_back(family.sigma(i));

    FrobeniusFamily out = family;
    out.kind = FamilyKind::Symmetric;
    out.steps.clear();
    std::vector<RatMatrix> pis;
    if (h == 0) {
        pis.push_back(tau);
    } else {
        pis.push_back(sigma[0]);
        for (std::size_t i = 1; i < h; ++i) pis.push_back(sub(sigma[i], sigma[i - 1]));
        pis.push_back(sub(tau, sigma[h - 1]));
    }
    std::vector<Residue> ones(n, 1), tail_constants;
    for (const auto& c : family.tail.coords) tail_constants.push_back(c.constant);
    for (std::size_t i = 0; i < pis.size(); ++i)
        out.points.push_back(RatPoint{pis[i], i + 1 == pis.size() ? tail_constants : ones});

    // (q-1) pi_j and the product must lie in the group.
    const GroupPresentation& grp = family_group(ctx, family);
    auto in_group = [&](const RatMatrix& e, const std::vector<Residue>& c) {
        if (!is_integral(e)) return false;
        const ExpMatrix ei = to_int(e);
        for (std::size_t j = 0; j < n; ++j)
            if (!member_coords(MonicCoords{c[j], ei[j]}, grp)) return false;
        return true;
    };
    RatMatrix product = pis[0];
    for (std::size_t i = 1; i < pis.size(); ++i) product = add(product, pis[i]);
    if (!in_group(product, tail_constants)) throw MathError("product of the symmetric points leaves the group");
    for (const auto& pi : pis)
        if (!in_group(scale(pi, Rational(family.q - 1)), ones)) throw MathError("a symmetric point is not a root of a group element");

    // Every tuple l in [0, 2]^h gives a point of the variety.
    std::uint64_t tuples = 1;
    for (std::size_t i = 0; i < h; ++i) tuples *= 3;
    for (std::uint64_t idx = 0; idx < tuples; ++idx) {
        std::vector<BigInt> l;
        std::uint64_t x = idx;
        for (std::size_t i = 0; i < h; ++i) {
            l.push_back(BigInt(x % 3));
            x /= 3;
        }
        RatMatrix e = pis[0];
        for (std::size_t i = 0; i < h; ++i)
            e = add(e, scale(pis[i + 1], Rational(big_pow(family.q, l[i].convert_to<std::uint64_t>()))));
        if (!is_integral(e)) throw MathError("symmetric member is not integral");
        ExpPoint pt;
        const ExpMatrix ei = to_int(e);
        for (std::size_t j = 0; j < n; ++j) pt.coords.push_back(MonicCoords{tail_constants[j], ei[j]});
        if (!on_variety(ctx.variety().forms(), ctx.support(), pt))
            throw MathError("symmetric member leaves the variety");
    }
    return out;
}

// --- Nondegenerate filter --------------------------------------------------------------

std::vector<FrobeniusFamily> theorem3_filter(const DescentContext& ctx, const std::vector<FrobeniusFamily>& families) {
    const LinearVariety& v = ctx.variety();
    if (!is_hyperplane_with_full_support(v)) throw MathError("nondegenerate filter needs a hyperplane with all coefficients nonzero");
    std::vector<FrobeniusFamily> out;
    for (const auto& fam : families) {
        if (fam.point_tail()) {
            out.push_back(fam);
            continue;
        }
        // A coset tail forces a vanishing block sum; spot-check the first members.
        for (BigInt k = 0; k < 2; ++k) {
            std::vector<BigInt> idx(fam.h(), k);
            const ExpPoint x = family_member(fam, idx);
            std::int64_t degree = 0;
            for (const auto& c : x.coords)
                for (std::size_t w = 0; w < c.exponents.size(); ++w)
                    degree += static_cast<std::int64_t>(abs(c.exponents[w]).convert_to<std::uint64_t>()) * ctx.support()[w].degree();
            if (degree > 4096) break;
            Vec pt{one(v.p())};
            for (const auto& c : realize_point(ctx.support(), x)) pt.push_back(c);
            if (vanishing_subsums(pt, v.forms()[0]).empty())
                throw BoundViolation("dropped family has a member without a vanishing subsum");
        }
    }
    return out;
}

// --- Expansion -------------------------------------------------------------------------

std::vector<ExpPoint> expand_family(const DescentContext& ctx, const FrobeniusFamily& family, const BigInt& cap,
                                    const ExpandOptions& options) {
    if (family.kind != FamilyKind::Bracket) throw MathError("expansion is implemented for bracket families");
    if (cap < 0) return {};
    const auto& fs = ctx.support();
    const std::size_t h = family.h();
    const GroupPresentation& grp = family_group(ctx, family);

    std::vector<RatMatrix> sigma;
    std::vector<BigInt> caps{cap};
    for (std::size_t i = 0; i < h; ++i) {
        sigma.push_back(family.sigma(i));
        caps.push_back(caps.back() + ceil_height(fs, sigma.back()) + ceil_height(fs, scale(sigma.back(), Rational(-1))));
    }

    std::uint64_t produced = 0;
    auto count = [&] {
        if (++produced > options.max_points) throw ResourceError("expansion exceeds the point limit");
    };

    // Innermost level: the tail times subgroup elements.
    std::vector<ExpPoint> level;
    const BigInt& tail_cap = caps[h];
    if (family.point_tail()) {
        if (point_height(fs, family.tail) <= tail_cap) level.push_back(family.tail);
    } else {
        BigInt bound = tail_cap;
        for (const auto& c : family.tail.coords) bound += monic_height(fs, c.exponents);
        if (bound > BigInt(std::numeric_limits<std::int64_t>::max() / 2)) throw ResourceError("subgroup enumeration bound too large");
        std::vector<MonicCoords> elems;
        for (const auto& e : enumerate_bounded(grp, bound.convert_to<std::int64_t>())) elems.push_back(element_coords(e, grp));
        const auto& blocks = family.subgroup;
        std::vector<std::size_t> pick(blocks.size(), 0);
        while (true) {
            ExpPoint x = family.tail;
            for (std::size_t b = 0; b < blocks.size(); ++b)
                for (auto j : blocks[b]) {
                    auto& c = x.coords[j];
                    c.constant = fp_mul(c.constant, elems[pick[b]].constant, ctx.p());
                    for (std::size_t w = 0; w < fs.size(); ++w) c.exponents[w] += elems[pick[b]].exponents[w];
                }
            if (point_height(fs, x) <= tail_cap) {
                count();
                level.push_back(std::move(x));
            }
            std::size_t b = 0;
            while (b < pick.size() && ++pick[b] == elems.size()) pick[b++] = 0;
            if (b == pick.size() || elems.empty()) break;
        }
    }

    // Outward through the brackets: member = Phi [k] + q^k z.
    for (std::size_t i = h; i-- > 0;) {
        const ExpMatrix& phi = family.steps[i];
        const RatMatrix minus_sigma = scale(sigma[i], Rational(-1));
        const BigInt neg_sigma_height = ceil_height(fs, minus_sigma);
        std::vector<ExpPoint> next;
        for (const auto& z : level) {
            const RatMatrix d = sub(to_rat(exponents_of(z)), sigma[i]);
            const Rational hd = rational_height(fs, d);
            BigInt qk = 1, geo = 0;
            for (BigInt k = 0;; ++k) {
                if (k > 0 && hd * Rational(qk) - Rational(neg_sigma_height) > Rational(caps[i])) break;
                ExpPoint x = z;
                const ExpMatrix e = add(scale(phi, geo), scale(exponents_of(z), qk));
                for (std::size_t j = 0; j < e.size(); ++j) x.coords[j].exponents = e[j];
                if (point_height(fs, x) <= caps[i]) {
                    count();
                    next.push_back(std::move(x));
                }
                if (hd == 0) break;
                geo += qk;
                qk *= family.q;
            }
        }
        level = std::move(next);
    }

    std::set<ExpPoint> unique(level.begin(), level.end());
    std::vector<ExpPoint> out;
    const LinearVariety& v = ctx.variety();
    for (const auto& x : unique) {
        if (options.nondegenerate) {
            if (!is_hyperplane_with_full_support(v)) throw MathError("nondegenerate expansion needs a hyperplane with all coefficients nonzero");
            Vec pt{one(v.p())};
            for (const auto& c : realize_point(fs, x)) pt.push_back(c);
            if (!vanishing_subsums(pt, v.forms()[0]).empty()) continue;
        }
        if (!verify_point(v, grp, x).passed()) throw BoundViolation("expanded member fails verification");
        out.push_back(x);
    }
    return out;
}

// --- Certificates ----------------------------------------------------------------------

BoundCertificate bound_certificate(const LinearVariety& v, const GroupPresentation& g, const BigInt& q) {
    const std::uint32_t p = g.p();
    if (q < p || q % p != 0) throw MathError("certificate q must be a power of p");
    BoundCertificate c;
    c.n = v.n();
    c.r = g.rank();
    c.m = v.dim() + 1;
    c.q = q;
    c.h_star = std::max<BigInt>(1, BigInt(v.height()));
    const BigInt n = c.n;
    const std::uint64_t nn = c.n;
    const BigInt dl = delta(c.n + c.r);
    c.delta = 8 * n * n * big_pow(10 * n * n * n * dl, 2 * nn + 1);
    const BigInt four_n = big_pow(BigInt(4), nn);
    c.psi_const = 8 * big_pow(n, 5) * four_n * (q / p) * dl;
    const BigInt two_n = 2 * n;
    c.eta = big_pow(two_n, c.m);
    c.rho = (c.eta - 1) / (two_n - 1);
    const RadicalData rd = radical(g);
    c.regulator_sq_group = regulator_sq(g);
    c.regulator_sq_radical = regulator_sq(rd.radical);
    c.index = rd.index;
    const std::uint64_t rho = c.rho.convert_to<std::uint64_t>();
    const std::uint64_t eta = c.eta.convert_to<std::uint64_t>();
    const BigInt hs_eta = big_pow(c.h_star, eta);
    const BigInt theorem1 =
        big_pow(2 * q * q * c.delta * big_pow(c.regulator_sq_group, 3 * nn + 1), rho) * hs_eta;
    c.stages.push_back({"theorem1", theorem1});
    c.stages.push_back({"theorem2", (n + 1) * theorem1});
    c.stages.push_back({"W", big_pow(c.delta * big_pow(c.regulator_sq_radical, 3 * nn + 1), rho) * hs_eta});
    c.stages.push_back({"proposition_W", 8 * big_pow(n, 5) * four_n * dl * big_pow(c.h_star, 2 * nn) * c.regulator_sq_radical});
    c.stages.push_back({"proposition_psi", n * p * dl * c.regulator_sq_radical});
    return c;
}

void check_family_bounds(const DescentContext& ctx, const BoundCertificate& cert, const FrobeniusFamily& family) {
    const auto& fs = ctx.support();
    if (ctx.n() == 0 || family.h() > ctx.n() - 1)
        throw BoundViolation("family depth " + std::to_string(family.h()) + " exceeds n - 1");
    const BigInt& top = cert.ceiling("theorem1");
    if (family.kind == FamilyKind::Bracket) {
        for (std::size_t i = 0; i < family.h(); ++i) {
            const RatMatrix psi = scale(family.sigma(i), Rational(-1));
            if (ceil_height(fs, psi) > top) throw BoundViolation("automorphism height exceeds the certificate");
        }
        if (point_height(fs, family.tail) > top) throw BoundViolation("tail height exceeds the certificate");
    }
    if (family.carrier && BigInt(family.carrier->height()) > cert.ceiling("W"))
        throw BoundViolation("carrier variety height exceeds the certificate");
}

}  // namespace sunit
