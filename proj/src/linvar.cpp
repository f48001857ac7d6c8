#include "sunit/linvar.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <numeric>

namespace sunit {

namespace {

using Rational = boost::multiprecision::cpp_rational;

std::vector<std::size_t> descending_order(std::size_t n) {
    std::vector<std::size_t> order(n + 1);
    std::iota(order.rbegin(), order.rend(), 0);
    return order;
}

// e modulo the row space of an echelon form with unit pivots.
Vec reduce_by(const Matrix& rows, const std::vector<std::size_t>& pivots, Vec e) {
    for (std::size_t k = 0; k < rows.size(); ++k) {
        if (e[pivots[k]].is_zero()) continue;
        RatFunc f = e[pivots[k]];
        for (std::size_t j = 0; j < e.size(); ++j)
            if (!rows[k][j].is_zero()) e[j] -= f * rows[k][j];
    }
    return e;
}

Vec unit_vector(std::uint32_t p, std::size_t size, std::size_t i) {
    Vec e(size, RatFunc(p));
    e[i] = RatFunc::constant(p, 1);
    return e;
}

bool is_zero_vec(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](const RatFunc& x) { return x.is_zero(); });
}

// Subsets of size k of {0..n-1} in lexicographic order, matching maximal_minors.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        out.push_back(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

BigInt factorial(std::size_t n) {
    BigInt f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= i;
    return f;
}

// Unique rational solution of a square-or-tall consistent system, or nothing when the
// columns are dependent. Right-hand sides are the columns of rhs.
std::optional<std::vector<std::vector<Rational>>> rational_solve(std::vector<std::vector<Rational>> a,
                                                                  std::vector<std::vector<Rational>> rhs,
                                                                  std::size_t cols) {
    const std::size_t rows = a.size();
    const std::size_t width = rhs.empty() ? 0 : rhs[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols; ++c) {
        std::size_t piv = r;
        while (piv < rows && a[piv][c] == 0) ++piv;
        if (piv == rows) return std::nullopt;
        std::swap(a[piv], a[r]);
        std::swap(rhs[piv], rhs[r]);
        Rational inv = 1 / a[r][c];
        for (auto& x : a[r]) x *= inv;
        for (auto& x : rhs[r]) x *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = 0; j < cols; ++j) a[i][j] -= f * a[r][j];
            for (std::size_t j = 0; j < width; ++j) rhs[i][j] -= f * rhs[r][j];
        }
        ++r;
    }
    for (std::size_t i = r; i < rows; ++i)
        for (const auto& x : rhs[i])
            if (x != 0) return std::nullopt;
    rhs.resize(cols);
    return rhs;
}

}  // namespace

LinearVariety::LinearVariety(std::uint32_t p, std::size_t n, const Matrix& forms) : p_(p), n_(n) {
    for (const auto& row : forms) {
        if (row.size() != n + 1) throw MathError("linear form has the wrong number of coefficients");
        for (const auto& x : row)
            if (x.p() != p) throw MathError("linear form over the wrong field");
    }
    Echelon e = rref(forms, descending_order(n));
    if (e.rows.size() != forms.size()) throw MathError("defining forms are dependent");
    if (std::find(e.pivots.begin(), e.pivots.end(), 0) != e.pivots.end())
        throw MathError("defining forms have no affine points");
    forms_ = std::move(e.rows);
    pivots_ = std::move(e.pivots);
    for (std::size_t j = 0; j <= n; ++j)
        if (std::find(pivots_.begin(), pivots_.end(), j) == pivots_.end()) free_.push_back(j);
    if (!forms_.empty()) grassmannians_ = grassmann_coordinates(forms_);
}

RatFunc LinearVariety::coefficient(std::size_t pivot_row, std::size_t free_var) const {
    return -forms_.at(pivot_row).at(free_var);
}

Height LinearVariety::height() const {
    Height h = 0;
    for (const auto& q : grassmannians_) h = std::max<Height>(h, q.degree());
    return h;
}

bool LinearVariety::contains(const Vec& point) const {
    if (point.size() != n_ + 1) throw MathError("point has the wrong dimension");
    return std::all_of(forms_.begin(), forms_.end(), [&](const Vec& f) { return dot(f, point).is_zero(); });
}

bool LinearVariety::contains(const LinearVariety& w) const {
    if (w.n_ != n_ || w.p_ != p_) throw MathError("varieties live in different spaces");
    return std::all_of(forms_.begin(), forms_.end(),
                       [&](const Vec& f) { return is_zero_vec(reduce_by(w.forms_, w.pivots_, f)); });
}

bool operator<(const LinearVariety& a, const LinearVariety& b) {
    if (a.p_ != b.p_) return a.p_ < b.p_;
    if (a.n_ != b.n_) return a.n_ < b.n_;
    return a.forms_ < b.forms_;
}

LinearVariety triangularize(std::uint32_t p, std::size_t n, const Matrix& forms) {
    return LinearVariety(p, n, forms);
}

LinearVariety affine_variety(std::uint32_t p, std::size_t n, const Matrix& rows) {
    Matrix forms;
    for (const auto& row : rows) {
        if (row.size() != n + 1) throw MathError("affine equation has the wrong number of coefficients");
        Vec f{-row[n]};
        f.insert(f.end(), row.begin(), row.begin() + static_cast<std::ptrdiff_t>(n));
        forms.push_back(std::move(f));
    }
    return LinearVariety(p, n, forms);
}

DiagonalAutomorphism DiagonalAutomorphism::inverse() const {
    DiagonalAutomorphism out;
    for (const auto& g : scalars) out.scalars.push_back(g.inverse());
    if (!scalars.empty()) {
        const std::uint32_t p = scalars[0].p();
        for (const auto& e : elements) {
            GroupElement inv{e.exponents, fp_inv(e.constant, p)};
            for (auto& x : inv.exponents) x = -x;
            out.elements.push_back(std::move(inv));
        }
    }
    return out;
}

Vec DiagonalAutomorphism::apply(const Vec& point) const {
    if (point.size() != scalars.size()) throw MathError("point has the wrong dimension");
    Vec out;
    for (std::size_t i = 0; i < point.size(); ++i) out.push_back(point[i] * scalars[i]);
    return out;
}

DiagonalAutomorphism identity_automorphism(std::uint32_t p, std::size_t n) {
    return DiagonalAutomorphism{Vec(n + 1, RatFunc::constant(p, 1)), {}};
}

LinearVariety apply_automorphism(const DiagonalAutomorphism& psi, const LinearVariety& v) {
    if (psi.scalars.size() != v.n() + 1) throw MathError("automorphism has the wrong dimension");
    for (const auto& g : psi.scalars)
        if (g.is_zero()) throw MathError("automorphism scalar is zero");
    Matrix forms = v.forms();
    for (auto& row : forms)
        for (std::size_t j = 0; j < row.size(); ++j) row[j] /= psi.scalars[j];
    LinearVariety out(v.p(), v.n(), forms);
    const Height hpsi = psi.height();
    const Height n = static_cast<Height>(v.n());
    if (out.height() > v.height() + n * hpsi) throw BoundViolation("automorphism image height exceeds h(V) + n h(psi)");
    if (psi.inverse().height() > n * hpsi) throw BoundViolation("inverse automorphism height exceeds n h(psi)");
    return out;
}

bool is_transversal(const LinearVariety& v) {
    for (std::size_t j = 0; j <= v.n(); ++j)
        if (std::all_of(v.forms().begin(), v.forms().end(), [&](const Vec& f) { return f[j].is_zero(); }))
            return false;
    return true;
}

bool CosetDescription::is_subgroup() const {
    return std::all_of(ratio.begin(), ratio.end(), [](const RatFunc& a) { return a.is_one(); });
}

LinearVariety CosetDescription::variety(std::uint32_t p) const {
    const std::size_t size = block.size();
    Matrix forms;
    for (std::size_t i = 0; i < size; ++i) {
        std::size_t rep = representative[block[i]];
        if (rep == i) continue;
        Vec f(size, RatFunc(p));
        f[i] = RatFunc::constant(p, 1);
        f[rep] = -ratio[i];
        forms.push_back(std::move(f));
    }
    return LinearVariety(p, size - 1, forms);
}

std::optional<CosetDescription> coset_form(const LinearVariety& v) {
    const std::size_t size = v.n() + 1;
    const std::uint32_t p = v.p();
    std::vector<Vec> rem;
    for (std::size_t i = 0; i < size; ++i) {
        rem.push_back(reduce_by(v.forms(), v.pivots(), unit_vector(p, size, i)));
        // X_i = 0 on V is not a binary equation with a nonzero ratio.
        if (is_zero_vec(rem.back())) return std::nullopt;
    }
    // X_i - a X_j vanishes on V iff the remainders satisfy rem_i = a rem_j.
    auto ratio_of = [&](std::size_t i, std::size_t j) -> std::optional<RatFunc> {
        std::size_t k = 0;
        while (rem[j][k].is_zero()) ++k;
        RatFunc a = rem[i][k] / rem[j][k];
        for (std::size_t c = 0; c < size; ++c)
            if (rem[i][c] != a * rem[j][c]) return std::nullopt;
        return a;
    };
    CosetDescription out;
    out.block.assign(size, size);
    out.ratio.assign(size, RatFunc::constant(p, 1));
    for (std::size_t i = 0; i < size; ++i) {
        if (out.block[i] != size) continue;
        out.block[i] = out.representative.size();
        out.representative.push_back(i);
        for (std::size_t j = i + 1; j < size; ++j) {
            if (out.block[j] != size) continue;
            if (auto a = ratio_of(j, i)) {
                out.block[j] = out.block[i];
                out.ratio[j] = *a;
            }
        }
    }
    // The binary equations span a space of dimension size - #blocks inside the forms.
    if (size - out.representative.size() != v.forms().size()) return std::nullopt;
    for (std::size_t b = 0; b < out.representative.size(); ++b)
        if (out.representative[b] != 0) out.free_blocks.push_back(b);
    return out;
}

std::optional<DiagonalAutomorphism> isotrivial_witness(const LinearVariety& v, const GroupPresentation& g) {
    const std::size_t n = v.n();
    const std::uint32_t p = v.p();
    if (v.is_full_space()) return identity_automorphism(p, n);
    const std::size_t k = v.forms().size();
    const auto subsets = combinations(n + 1, k);
    const auto& coords = v.grassmannians();
    const std::size_t fdim = g.finite_support.size();
    const std::size_t r = g.rank();

    // Exponent rows of A(I)/A(I0) and indicator differences over X_1..X_n.
    std::size_t i0 = 0;
    while (coords[i0].is_zero()) ++i0;
    IntMatrix diff;
    IntMatrix rhs;
    for (std::size_t s = 0; s < subsets.size(); ++s) {
        if (s == i0 || coords[s].is_zero()) continue;
        RatFunc q = RatFunc(coords[s]) / RatFunc(coords[i0]);
        auto mc = support_coords(q, g.finite_support);
        if (!mc) return std::nullopt;
        IntVec row(n, 0);
        for (auto i : subsets[s])
            if (i > 0) row[i - 1] += 1;
        for (auto i : subsets[i0])
            if (i > 0) row[i - 1] -= 1;
        diff.push_back(std::move(row));
        rhs.push_back(mc->exponents);
    }

    // Integer system over the lattice coordinates z_i of Y_i = z_i * B.
    const IntMatrix& basis = g.generator_exponents;
    IntMatrix m;
    IntVec b;
    for (std::size_t e = 0; e < diff.size(); ++e)
        for (std::size_t w = 0; w < fdim; ++w) {
            IntVec row(n * r, 0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t l = 0; l < r; ++l) row[i * r + l] = diff[e][i] * basis[l][w];
            m.push_back(std::move(row));
            b.push_back(rhs[e][w]);
        }
    std::vector<IntVec> exponents(n, IntVec(fdim, 0));
    if (!m.empty() && n * r > 0) {
        SmithForm sf = smith_form(m, n * r);
        IntVec ub(m.size(), 0);
        for (std::size_t i = 0; i < m.size(); ++i) ub[i] = int_dot(sf.U[i], b);
        IntVec wv(n * r, 0);
        for (std::size_t i = 0; i < ub.size(); ++i) {
            if (i < sf.diagonal.size()) {
                if (ub[i] % sf.diagonal[i] != 0) return std::nullopt;
                wv[i] = ub[i] / sf.diagonal[i];
            } else if (ub[i] != 0) {
                return std::nullopt;
            }
        }
        IntVec z(n * r, 0);
        for (std::size_t i = 0; i < n * r; ++i) z[i] = int_dot(sf.V[i], wv);
        for (std::size_t i = 0; i < n; ++i)
            exponents[i] = row_times(IntVec(z.begin() + static_cast<std::ptrdiff_t>(i * r),
                                            z.begin() + static_cast<std::ptrdiff_t>((i + 1) * r)),
                                     basis);
    } else if (std::any_of(b.begin(), b.end(), [](const BigInt& x) { return x != 0; })) {
        return std::nullopt;
    }

    auto build = [&](const std::vector<IntVec>& ys) {
        DiagonalAutomorphism psi;
        psi.scalars.push_back(RatFunc::constant(p, 1));
        psi.elements.push_back(GroupElement{IntVec(r, 0), 1});
        for (const auto& y : ys) {
            GroupElement e{*g.lattice.coords(y), 1};
            psi.scalars.push_back(reconstruct(e, g));
            psi.elements.push_back(std::move(e));
        }
        return psi;
    };
    DiagonalAutomorphism best = build(exponents);
    Height best_height = best.height();

    // Completing the equations by X_k = X_0 for a set of k fixes the solution; keep the
    // lowest choice that lands in the lattice.
    const std::size_t rk = diff.empty() ? 0 : smith_form(diff, n).diagonal.size();
    for (const auto& extra : combinations(n, n - rk)) {
        std::vector<std::vector<Rational>> a;
        std::vector<std::vector<Rational>> rh;
        for (std::size_t e = 0; e < diff.size(); ++e) {
            a.emplace_back(diff[e].begin(), diff[e].end());
            rh.emplace_back(rhs[e].begin(), rhs[e].end());
        }
        for (auto kx : extra) {
            std::vector<Rational> row(n, 0);
            row[kx] = 1;
            a.push_back(std::move(row));
            rh.emplace_back(fdim, Rational(0));
        }
        auto sol = rational_solve(std::move(a), std::move(rh), n);
        if (!sol) continue;
        std::vector<IntVec> ys;
        for (const auto& row : *sol) {
            IntVec y;
            for (const auto& x : row) {
                if (denominator(x) != 1) break;
                y.push_back(numerator(x));
            }
            if (y.size() != fdim || !g.lattice.contains(y)) break;
            ys.push_back(std::move(y));
        }
        if (ys.size() != n) continue;
        DiagonalAutomorphism cand = build(ys);
        if (cand.height() < best_height) {
            best_height = cand.height();
            best = std::move(cand);
        }
    }

    LinearVariety image = apply_automorphism(best, v);
    for (const auto& row : image.forms())
        for (const auto& x : row)
            if (!x.is_constant()) throw BoundViolation("isotrivial witness does not trivialize the variety");
    if (BigInt(best_height) > factorial(n) * v.height()) throw BoundViolation("isotrivial witness exceeds n! h(V)");
    return best;
}

std::optional<LinearVariety> intersect(const LinearVariety& v, const LinearVariety& w) {
    if (v.n() != w.n() || v.p() != w.p()) throw MathError("varieties live in different spaces");
    Matrix stacked = v.forms();
    stacked.insert(stacked.end(), w.forms().begin(), w.forms().end());
    if (stacked.empty()) return v;
    Echelon e = rref(stacked, descending_order(v.n()));
    if (std::find(e.pivots.begin(), e.pivots.end(), 0) != e.pivots.end()) return std::nullopt;
    LinearVariety out(v.p(), v.n(), e.rows);
    if (out.height() > v.height() + w.height()) throw BoundViolation("intersection height exceeds h(V) + h(W)");
    return out;
}

std::vector<std::vector<std::size_t>> vanishing_subsums(const Vec& point, const Vec& coeffs) {
    if (point.size() != coeffs.size() || point.empty()) throw MathError("point and hyperplane sizes differ");
    const std::size_t size = point.size();
    if (size > 20) throw ResourceError("too many terms for subset enumeration");
    Vec terms;
    for (std::size_t i = 0; i < size; ++i) terms.push_back(point[i] * coeffs[i]);
    RatFunc total(point[0].p());
    for (const auto& x : terms) total += x;
    if (!total.is_zero()) throw MathError("point is not on the hyperplane");
    std::vector<std::vector<std::size_t>> out;
    const std::uint64_t full = (std::uint64_t(1) << size) - 1;
    for (std::uint64_t mask = 1; mask < full; ++mask) {
        RatFunc s(point[0].p());
        std::vector<std::size_t> subset;
        for (std::size_t i = 0; i < size; ++i)
            if (mask >> i & 1) {
                s += terms[i];
                subset.push_back(i);
            }
        if (s.is_zero()) out.push_back(std::move(subset));
    }
    return out;
}

}  // namespace sunit
