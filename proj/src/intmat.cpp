#include "sunit/intmat.hpp"
#include "sunit/errors.hpp"

#include <algorithm>

namespace sunit {

IntMatrix identity_matrix(std::size_t n) {
    IntMatrix m(n, IntVec(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b) {
    if (a.empty()) return {};
    const std::size_t inner = b.size();
    const std::size_t cols = b.empty() ? 0 : b[0].size();
    IntMatrix out(a.size(), IntVec(cols, 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < inner; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < cols; ++j) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

IntVec row_times(const IntVec& v, const IntMatrix& m) {
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    IntVec out(cols, 0);
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] == 0) continue;
        for (std::size_t j = 0; j < cols; ++j) out[j] += v[k] * m[k][j];
    }
    return out;
}

BigInt int_dot(const IntVec& a, const IntVec& b) {
    BigInt s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

BigInt int_det(IntMatrix m) {
    // Bareiss fraction-free elimination.
    const std::size_t n = m.size();
    if (n == 0) return 1;
    BigInt sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && m[s][k] == 0) ++s;
            if (s == n) return 0;
            std::swap(m[s], m[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

IntMatrix transpose(const IntMatrix& m, std::size_t cols) {
    IntMatrix t(cols, IntVec(m.size(), 0));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) t[j][i] = m[i][j];
    return t;
}

namespace {

BigInt babs(const BigInt& x) { return x < 0 ? BigInt(-x) : x; }

}  // namespace

SmithForm smith_form(const IntMatrix& input, std::size_t cols) {
    const std::size_t rows = input.size();
    IntMatrix a = input;
    SmithForm s;
    s.U = identity_matrix(rows);
    s.V = identity_matrix(cols);
    s.V_inv = identity_matrix(cols);

    auto swap_cols = [&](std::size_t x, std::size_t y) {
        if (x == y) return;
        for (auto& row : a) std::swap(row[x], row[y]);
        for (auto& row : s.V) std::swap(row[x], row[y]);
        std::swap(s.V_inv[x], s.V_inv[y]);
    };
    auto swap_rows = [&](std::size_t x, std::size_t y) {
        if (x == y) return;
        std::swap(a[x], a[y]);
        std::swap(s.U[x], s.U[y]);
    };
    // row_i -= q * row_t
    auto row_op = [&](std::size_t i, std::size_t t, const BigInt& q) {
        if (q == 0) return;
        for (std::size_t j = 0; j < cols; ++j) a[i][j] -= q * a[t][j];
        for (std::size_t j = 0; j < rows; ++j) s.U[i][j] -= q * s.U[t][j];
    };
    // col_j -= q * col_t
    auto col_op = [&](std::size_t j, std::size_t t, const BigInt& q) {
        if (q == 0) return;
        for (std::size_t i = 0; i < rows; ++i) a[i][j] -= q * a[i][t];
        for (std::size_t i = 0; i < cols; ++i) s.V[i][j] -= q * s.V[i][t];
        for (std::size_t i = 0; i < cols; ++i) s.V_inv[t][i] += q * s.V_inv[j][i];
    };

    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
        while (true) {
            // Smallest nonzero entry of the remaining block becomes the pivot.
            std::size_t bi = rows, bj = cols;
            for (std::size_t i = t; i < rows; ++i)
                for (std::size_t j = t; j < cols; ++j)
                    if (a[i][j] != 0 && (bi == rows || babs(a[i][j]) < babs(a[bi][bj]))) bi = i, bj = j;
            if (bi == rows) break;
            swap_rows(t, bi);
            swap_cols(t, bj);
            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                row_op(i, t, a[i][t] / a[t][t]);
                if (a[i][t] != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                col_op(j, t, a[t][j] / a[t][t]);
                if (a[t][j] != 0) clean = false;
            }
            if (!clean) continue;
            std::size_t bad = rows;
            for (std::size_t i = t + 1; i < rows && bad == rows; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (a[i][j] % a[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (bad == rows) break;
            row_op(t, bad, BigInt(-1));
        }
        if (a[t][t] == 0) break;
        if (a[t][t] < 0) {
            for (auto& x : a[t]) x = -x;
            for (auto& x : s.U[t]) x = -x;
        }
        s.diagonal.push_back(a[t][t]);
    }
    return s;
}

HermiteForm hermite_form(const IntMatrix& a, std::size_t cols) {
    const std::size_t rows = a.size();
    // Work on [A | I] and only pivot on the A part.
    IntMatrix m(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        m[i] = a[i];
        m[i].resize(cols + rows, 0);
        m[i][cols + i] = 1;
    }
    const std::size_t width = cols + rows;
    auto sub = [&](std::size_t i, std::size_t r, const BigInt& q) {
        for (std::size_t j = 0; j < width; ++j) m[i][j] -= q * m[r][j];
    };
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        while (true) {
            std::size_t best = rows;
            for (std::size_t i = r; i < rows; ++i)
                if (m[i][c] != 0 && (best == rows || babs(m[i][c]) < babs(m[best][c]))) best = i;
            if (best == rows) break;
            std::swap(m[r], m[best]);
            bool done = true;
            for (std::size_t i = r + 1; i < rows; ++i) {
                if (m[i][c] == 0) continue;
                sub(i, r, m[i][c] / m[r][c]);
                if (m[i][c] != 0) done = false;
            }
            if (done) break;
        }
        if (m[r][c] == 0) continue;
        if (m[r][c] < 0)
            for (auto& x : m[r]) x = -x;
        for (std::size_t i = 0; i < r; ++i) sub(i, r, floor_div(m[i][c], m[r][c]));
        ++r;
    }
    HermiteForm h;
    for (std::size_t i = 0; i < rows; ++i) {
        IntVec left(m[i].begin(), m[i].begin() + static_cast<std::ptrdiff_t>(cols));
        IntVec right(m[i].begin() + static_cast<std::ptrdiff_t>(cols), m[i].end());
        if (i < r) {
            h.basis.push_back(std::move(left));
            h.transform.push_back(std::move(right));
        } else {
            h.relations.push_back(std::move(right));
        }
    }
    return h;
}

Lattice::Lattice(IntMatrix basis, std::size_t dim) : basis_(std::move(basis)), dim_(dim) {
    for (const auto& row : basis_)
        if (row.size() != dim_) throw MathError("lattice basis row has the wrong length");
    smith_ = smith_form(basis_, dim_);
    if (smith_.diagonal.size() != basis_.size()) throw MathError("lattice basis rows are dependent");
}

std::optional<IntVec> Lattice::coords(const IntVec& v) const {
    if (v.size() != dim_) throw MathError("vector has the wrong length for the lattice");
    // basis = U^-1 D V^-1, so e * basis = v iff (e U^-1) D = v V.
    IntVec w = row_times(v, smith_.V);
    const std::size_t r = basis_.size();
    for (std::size_t j = r; j < dim_; ++j)
        if (w[j] != 0) return std::nullopt;
    IntVec f(r, 0);
    for (std::size_t i = 0; i < r; ++i) {
        if (w[i] % smith_.diagonal[i] != 0) return std::nullopt;
        f[i] = w[i] / smith_.diagonal[i];
    }
    return row_times(f, smith_.U);
}

IntMatrix Lattice::saturation_basis() const {
    IntMatrix out(smith_.V_inv.begin(), smith_.V_inv.begin() + static_cast<std::ptrdiff_t>(basis_.size()));
    return out;
}

}  // namespace sunit
