#include "sunit/wronskian.hpp"

namespace sunit {

LogProfile profile_from_log_derivative(const RatFunc& u, int depth) {
    LogProfile out{u, {RatFunc::constant(u.p(), 1)}};
    for (int k = 0; k < depth; ++k) out.higher.push_back(derivative(out.higher[k]) + out.higher[k] * u);
    return out;
}

LogProfile log_profile(const RatFunc& x, int depth) {
    if (x.is_zero()) throw MathError("log profile of zero");
    return profile_from_log_derivative(derivative(x) / x, depth);
}

LogProfile log_profile(const ResidueClass& rc, const GroupPresentation& g, int depth) {
    if (rc.size() != g.rank()) throw MathError("residue class has the wrong length");
    const std::uint32_t p = g.p();
    RatFunc u(p);
    for (std::size_t i = 0; i < rc.size(); ++i) {
        if (rc[i] % p == 0) continue;
        const RatFunc& gi = g.free_generators[i];
        u += RatFunc::constant(p, rc[i] % p) * derivative(gi) / gi;
    }
    return profile_from_log_derivative(u, depth);
}

Matrix wronskian_matrix(const std::vector<RatFunc>& xs) {
    const std::size_t m = xs.size();
    Matrix w(m, Vec());
    std::vector<RatFunc> cur = xs;
    for (std::size_t i = 0; i < m; ++i) {
        w[i] = cur;
        for (auto& x : cur) x = derivative(x);
    }
    return w;
}

std::optional<std::vector<RatFunc>> c_dependence(const std::vector<RatFunc>& xs) {
    const std::size_t m = xs.size();
    if (m == 0) return std::nullopt;
    for (const auto& x : xs)
        if (x.is_zero()) throw MathError("c_dependence needs nonzero entries");
    const std::uint32_t p = xs[0].p();
    // Shortest dependent prefix: its Wronskian kernel is one-dimensional and lies in K^p.
    for (std::size_t j = 2; j <= m; ++j) {
        std::vector<RatFunc> prefix(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(j));
        Matrix w = wronskian_matrix(prefix);
        if (!determinant(w).is_zero()) continue;
        Matrix ker = kernel(w, j);
        if (ker.size() != 1) throw MathError("Wronskian kernel is not one-dimensional");
        Vec c = ker[0];
        RatFunc scale = c[j - 1].inverse();
        for (auto& x : c) x *= scale;
        RatFunc check(p);
        for (std::size_t k = 0; k < j; ++k) {
            if (!derivative(c[k]).is_zero()) throw MathError("Wronskian relation is not over the constants");
            check += c[k] * xs[k];
        }
        if (!check.is_zero()) throw MathError("Wronskian relation failed verification");
        c.resize(m, RatFunc(p));
        return c;
    }
    return std::nullopt;
}

Vec cramer_solve(const std::vector<LogProfile>& profiles, const Vec& target) {
    const std::size_t m = profiles.size();
    if (m == 0 || target.size() != m) throw MathError("cramer_solve needs matching sizes");
    Matrix a(m, Vec());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (profiles[j].higher.size() < m) throw MathError("profile depth too small for cramer_solve");
            a[i].push_back(profiles[j].higher[i]);
        }
    RatFunc w0 = determinant(a);
    if (w0.is_zero()) throw MathError("Wronskian matrix is singular");
    Vec y;
    for (std::size_t j = 0; j < m; ++j) {
        Matrix aj = a;
        for (std::size_t i = 0; i < m; ++i) aj[i][j] = target[i];
        y.push_back(determinant(std::move(aj)) / w0);
    }
    return y;
}

Vec cramer_solve(const std::vector<LogProfile>& profiles) {
    if (profiles.empty()) throw MathError("cramer_solve needs at least one profile");
    const std::uint32_t p = profiles[0].u.p();
    Vec target(profiles.size(), RatFunc(p));
    target[0] = RatFunc::constant(p, 1);
    return cramer_solve(profiles, target);
}

BigInt class_height_bound(std::uint64_t m, std::uint64_t r, const BigInt& regulator_sq) {
    if (m < 2) throw MathError("class_height_bound needs m >= 2");
    return 4 * big_pow(BigInt(m), 4) * delta(r) * regulator_sq;
}

std::optional<std::vector<Residue>> fq_dependence_moore(const std::vector<RatFunc>& ys, const BigInt& q) {
    const std::size_t m = ys.size();
    if (m == 0) return std::nullopt;
    for (const auto& y : ys)
        if (y.is_zero()) throw MathError("fq_dependence_moore needs nonzero entries");
    const std::uint32_t p = ys[0].p();
    for (std::size_t j = 2; j <= m; ++j) {
        Matrix moore(j, Vec());
        for (std::size_t i = 0; i < j; ++i)
            for (std::size_t k = 0; k < j; ++k) moore[i].push_back(frobenius_power(ys[k], q, BigInt(i)));
        if (!determinant(moore).is_zero()) continue;
        Matrix ker = kernel(moore, j);
        if (ker.size() != 1) throw MathError("Moore kernel is not one-dimensional");
        Vec c = ker[0];
        RatFunc scale = c[j - 1].inverse();
        std::vector<Residue> out(m, 0);
        RatFunc check(p);
        for (std::size_t k = 0; k < j; ++k) {
            c[k] *= scale;
            if (!c[k].is_constant()) throw MathError("Moore relation has non-constant coefficients");
            out[k] = c[k].constant_value();
            check += c[k] * ys[k];
        }
        if (!check.is_zero()) throw MathError("Moore relation failed verification");
        return out;
    }
    return std::nullopt;
}

}  // namespace sunit
