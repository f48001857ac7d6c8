#pragma once

#include "sunit/ffield.hpp"

#include <random>

namespace sunit::testing {

inline Poly random_poly(std::mt19937_64& rng, std::uint32_t p, int max_deg, bool nonzero = true) {
    std::uniform_int_distribution<int> deg_dist(0, max_deg);
    std::uniform_int_distribution<std::uint32_t> c(0, p - 1);
    while (true) {
        int d = deg_dist(rng);
        std::vector<Residue> v(d + 1);
        for (auto& x : v) x = c(rng);
        Poly f(p, v);
        if (!nonzero || !f.is_zero()) return f;
    }
}

inline RatFunc random_ratfunc(std::mt19937_64& rng, std::uint32_t p, int max_deg) {
    return RatFunc(random_poly(rng, p, max_deg), random_poly(rng, p, max_deg));
}

inline RatFunc rf(std::uint32_t p, std::vector<Residue> num, std::vector<Residue> den = {1}) {
    return RatFunc(Poly(p, std::move(num)), Poly(p, std::move(den)));
}

}  // namespace sunit::testing
