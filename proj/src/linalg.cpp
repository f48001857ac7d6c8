#include "sunit/linalg.hpp"

#include <numeric>

namespace sunit {

Matrix zero_matrix(std::uint32_t p, std::size_t rows, std::size_t cols) {
    return Matrix(rows, Vec(cols, RatFunc(p)));
}

Echelon rref(const Matrix& m, const std::vector<std::size_t>& column_order) {
    Echelon out;
    if (m.empty()) return out;
    const std::size_t cols = m[0].size();
    std::vector<std::size_t> order = column_order;
    if (order.empty()) {
        order.resize(cols);
        std::iota(order.begin(), order.end(), 0);
    }
    Matrix a = m;
    std::size_t r = 0;
    for (std::size_t col : order) {
        if (r == a.size()) break;
        std::size_t piv = r;
        while (piv < a.size() && a[piv][col].is_zero()) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[r], a[piv]);
        RatFunc inv = a[r][col].inverse();
        for (auto& x : a[r]) x *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == r || a[i][col].is_zero()) continue;
            RatFunc f = a[i][col];
            for (std::size_t j = 0; j < cols; ++j)
                if (!a[r][j].is_zero()) a[i][j] -= f * a[r][j];
        }
        out.pivots.push_back(col);
        ++r;
    }
    a.resize(r);
    out.rows = std::move(a);
    return out;
}

std::size_t rank(const Matrix& m) { return rref(m).rows.size(); }

RatFunc determinant(Matrix a) {
    const std::size_t n = a.size();
    if (n == 0) throw MathError("determinant of an empty matrix");
    const std::uint32_t p = a[0][0].p();
    RatFunc det = RatFunc::constant(p, 1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        while (piv < n && a[piv][c].is_zero()) ++piv;
        if (piv == n) return RatFunc(p);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            det = -det;
        }
        det *= a[c][c];
        RatFunc inv = a[c][c].inverse();
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c].is_zero()) continue;
            RatFunc f = a[i][c] * inv;
            for (std::size_t j = c; j < n; ++j)
                if (!a[c][j].is_zero()) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

Matrix kernel(const Matrix& m, std::size_t cols) {
    if (m.empty()) {
        throw MathError("kernel of an empty matrix needs an explicit field");
    }
    const std::uint32_t p = m[0][0].p();
    Echelon e = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : e.pivots) is_pivot[c] = true;
    Matrix basis;
    for (std::size_t f = 0; f < cols; ++f) {
        if (is_pivot[f]) continue;
        Vec v(cols, RatFunc(p));
        v[f] = RatFunc::constant(p, 1);
        for (std::size_t i = 0; i < e.rows.size(); ++i) v[e.pivots[i]] = -e.rows[i][f];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<Vec> solve(const Matrix& m, const Vec& b) {
    if (m.empty()) throw MathError("solve with an empty matrix");
    const std::uint32_t p = m[0][0].p();
    const std::size_t cols = m[0].size();
    Matrix aug = m;
    for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
    Echelon e = rref(aug);
    Vec x(cols, RatFunc(p));
    for (std::size_t i = 0; i < e.rows.size(); ++i) {
        if (e.pivots[i] == cols) return std::nullopt;
        x[e.pivots[i]] = e.rows[i][cols];
    }
    return x;
}

std::vector<RatFunc> maximal_minors(const Matrix& m) {
    const std::size_t k = m.size();
    if (k == 0) throw MathError("minors of an empty matrix");
    const std::size_t n = m[0].size();
    std::vector<RatFunc> out;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        Matrix sub(k, Vec());
        for (std::size_t i = 0; i < k; ++i)
            for (auto c : idx) sub[i].push_back(m[i][c]);
        out.push_back(determinant(std::move(sub)));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

Vec mat_vec(const Matrix& m, const Vec& v) {
    Vec out;
    out.reserve(m.size());
    for (const auto& row : m) out.push_back(dot(row, v));
    return out;
}

RatFunc dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size() || a.empty()) throw MathError("dot product of mismatched vectors");
    RatFunc s(a[0].p());
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].is_zero() && !b[i].is_zero()) s += a[i] * b[i];
    return s;
}

std::vector<Poly> primitive_polys(const Vec& v) {
    if (v.empty()) throw MathError("primitive form of an empty vector");
    const std::uint32_t p = v[0].p();
    Poly l = Poly::constant(p, 1);
    bool any = false;
    for (const auto& x : v) {
        if (x.is_zero()) continue;
        any = true;
        l = l / poly_gcd(l, x.den()) * x.den();
    }
    if (!any) throw MathError("primitive form of the zero vector");
    std::vector<Poly> out;
    Poly g(p);
    for (const auto& x : v) {
        Poly q = x.is_zero() ? Poly(p) : x.num() * (l / x.den());
        g = poly_gcd(g, q);
        out.push_back(std::move(q));
    }
    Residue lead = 0;
    for (auto& q : out) {
        if (!q.is_zero()) q = q / g;
        if (lead == 0 && !q.is_zero()) lead = q.lead();
    }
    Residue inv = fp_inv(lead, p);
    for (auto& q : out) q = q.scaled(inv);
    return out;
}

}  // namespace sunit
