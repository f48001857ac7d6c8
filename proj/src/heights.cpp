#include "sunit/heights.hpp"

#include <algorithm>

namespace sunit {

Height height(const RatFunc& x) {
    if (x.is_zero()) throw MathError("height of zero");
    return std::max(x.num().degree(), x.den().degree());
}

Height height_vec(const std::vector<RatFunc>& xs) {
    bool any = false;
    Height at_infinity = 0;
    Poly common(2);
    for (const auto& x : xs) {
        if (x.is_zero()) continue;
        if (!any) common = Poly::constant(x.p(), 1);
        any = true;
        common = common / poly_gcd(common, x.den()) * x.den();
        at_infinity = std::max<Height>(at_infinity, x.num().degree() - x.den().degree());
    }
    if (!any) throw MathError("height of the zero vector");
    return common.degree() + at_infinity;
}

Height proj_height(const std::vector<RatFunc>& point) {
    Height h = 0;
    for (const auto& q : primitive_polys(point)) h = std::max<Height>(h, q.degree());
    return h;
}

Height height_i(const RatFunc& x, int i) {
    if (x.is_zero()) throw MathError("height_i of zero");
    if (i < 0) throw MathError("height_i needs i >= 0");
    std::vector<RatFunc> v{RatFunc::constant(x.p(), 1)};
    RatFunc d = x;
    for (int k = 1; k <= i; ++k) {
        d = derivative(d);
        v.push_back(d / x);
    }
    return height_vec(v);
}

std::vector<Poly> grassmann_coordinates(const Matrix& forms) {
    if (forms.empty()) throw MathError("variety height of the full space");
    if (rank(forms) != forms.size()) throw MathError("defining forms are dependent");
    if (forms.size() >= forms[0].size()) throw MathError("variety height of the empty variety");
    return primitive_polys(maximal_minors(forms));
}

Height variety_height(const Matrix& forms) {
    Height h = 0;
    for (const auto& q : grassmann_coordinates(forms)) h = std::max<Height>(h, q.degree());
    return h;
}

}  // namespace sunit
